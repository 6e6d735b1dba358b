"""Centre-of-mass kinematics for the six 2->2 processes.

Frame conventions: incoming particle 1 along +z with momentum magnitude p,
incoming particle 2 along -z; outgoing particle 1 in the xz-plane (phi = 0)
at polar angle theta, outgoing particle 2 opposite. theta is taken modulo
2 pi, so the full [0, 2 pi) range of the scans is representable.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
import math

import numpy as np

from .constants import Constants, DEFAULT
from .dirac import FourVector
from .errors import BelowThresholdError, InvalidKinematicsError


class ProcessKind(Enum):
    MOLLER = "moller"            # e- e-  -> e- e-
    MUON_PAIR = "muon-pair"      # e- e+  -> mu- mu+
    ANNIHILATION = "annihilation"  # e- e+ -> gamma gamma
    BHABHA = "bhabha"            # e- e+  -> e- e+
    ELECTRON_MUON = "electron-muon"  # e- mu- -> e- mu-
    COMPTON = "compton"          # e- gamma -> e- gamma


@dataclass(frozen=True)
class ParticleSpec:
    """External leg descriptor: field statistics and mass lookup key."""

    name: str
    field: str                  # "u" (fermion) | "v" (antifermion) | "photon"
    mass_key: str               # "e" | "mu" | "photon"

    def mass(self, consts: Constants) -> float:
        if self.mass_key == "e":
            return consts.m_e
        if self.mass_key == "mu":
            return consts.m_mu
        return 0.0


_E = ParticleSpec("e-", "u", "e")
_EP = ParticleSpec("e+", "v", "e")
_MU = ParticleSpec("mu-", "u", "mu")
_MUP = ParticleSpec("mu+", "v", "mu")
_PH = ParticleSpec("gamma", "photon", "photon")

#: incoming pair, outgoing pair, and polar angles of poles of the
#: photon-propagator channels (only channels whose denominator can vanish
#: exactly at physical kinematics; fermion propagators never do).
PROCESS_TABLE: dict[ProcessKind, dict] = {
    ProcessKind.MOLLER: {"in": (_E, _E), "out": (_E, _E), "pole_thetas": (0.0, math.pi)},
    ProcessKind.MUON_PAIR: {"in": (_E, _EP), "out": (_MU, _MUP), "pole_thetas": ()},
    ProcessKind.ANNIHILATION: {"in": (_E, _EP), "out": (_PH, _PH), "pole_thetas": ()},
    ProcessKind.BHABHA: {"in": (_E, _EP), "out": (_E, _EP), "pole_thetas": (0.0,)},
    ProcessKind.ELECTRON_MUON: {"in": (_E, _MU), "out": (_E, _MU), "pole_thetas": (0.0,)},
    ProcessKind.COMPTON: {"in": (_E, _PH), "out": (_E, _PH), "pole_thetas": ()},
}


def process_masses(process: ProcessKind, consts: Constants = DEFAULT) -> tuple[float, float, float, float]:
    info = PROCESS_TABLE[process]
    return tuple(spec.mass(consts) for spec in info["in"] + info["out"])  # type: ignore[return-value]


def threshold_momentum(process: ProcessKind, consts: Constants = DEFAULT) -> float:
    """Smallest incoming COM momentum with enough energy for the outgoing pair.

    Only the muon pair has a non-zero threshold, p = sqrt(m_mu^2 - m_e^2).
    """
    if process is ProcessKind.MUON_PAIR:
        return math.sqrt(consts.m_mu ** 2 - consts.m_e ** 2)
    return 0.0


@dataclass(frozen=True)
class KinematicPoint:
    process: ProcessKind
    p: float                    # incoming COM 3-momentum magnitude [MeV]
    theta: float                # scattering angle of outgoing particle 1 [rad]
    p1: FourVector
    p2: FourVector
    q1: FourVector
    q2: FourVector
    s: float
    t: float
    u: float
    q_out: float
    masses: tuple[float, float, float, float]
    constants: Constants = field(default=DEFAULT, repr=False)


def _com_energies(process: ProcessKind, p: np.ndarray, consts: Constants):
    """Batch energies (E1, E2, E3, E4) and outgoing momentum q for |p| = p.

    q is NaN below threshold.
    """
    m1, m2, m3, m4 = process_masses(process, consts)
    p = np.asarray(p, dtype=float)
    e1 = np.sqrt(p ** 2 + m1 ** 2)
    e2 = np.sqrt(p ** 2 + m2 ** 2)
    rs = e1 + e2
    s = rs ** 2
    lam = (s - (m3 + m4) ** 2) * (s - (m3 - m4) ** 2)
    with np.errstate(invalid="ignore"):
        q = np.sqrt(lam) / (2.0 * rs)
    e3 = np.sqrt(q ** 2 + m3 ** 2)
    e4 = np.sqrt(q ** 2 + m4 ** 2)
    return e1, e2, e3, e4, q


def build_kinematics(process: ProcessKind, p: float, theta: float,
                     consts: Constants = DEFAULT) -> KinematicPoint:
    """COM kinematics for scattering (p, theta).

    Raises BelowThresholdError if the COM energy cannot produce the outgoing
    pair, InvalidKinematicsError for non-finite or non-positive inputs.
    """
    if not (math.isfinite(p) and math.isfinite(theta)):
        raise InvalidKinematicsError(f"non-finite inputs p={p}, theta={theta}")
    if p <= 0.0:
        raise InvalidKinematicsError(f"incoming momentum must be positive, got {p}")
    theta = theta % (2.0 * math.pi)

    m1, m2, m3, m4 = process_masses(process, consts)
    p_thr = threshold_momentum(process, consts)
    if p < p_thr and not math.isclose(p, p_thr, rel_tol=1e-15):
        raise BelowThresholdError(
            f"{process.value}: p = {p} MeV below threshold {p_thr:.6f} MeV")

    e1, e2, e3, e4, q = _com_energies(process, np.asarray(p), consts)
    e1, e2, e3, e4 = float(e1), float(e2), float(e3), float(e4)
    q = float(q) if math.isfinite(float(q)) else 0.0

    st, ct = math.sin(theta), math.cos(theta)
    p1 = FourVector(e1, 0.0, 0.0, p)
    p2 = FourVector(e2, 0.0, 0.0, -p)
    q1 = FourVector(e3, q * st, 0.0, q * ct)
    q2 = FourVector(e4, -q * st, 0.0, -q * ct)

    s = (p1 + p2).mass2()
    t = (p1 - q1).mass2()
    u = (p1 - q2).mass2()
    return KinematicPoint(process, p, theta, p1, p2, q1, q2, s, t, u, q,
                          (m1, m2, m3, m4), consts)


def mandelstam(kin: KinematicPoint) -> tuple[float, float, float]:
    """(s, t, u) recomputed from the stored momenta."""
    s = (kin.p1 + kin.p2).mass2()
    t = (kin.p1 - kin.q1).mass2()
    u = (kin.p1 - kin.q2).mass2()
    return s, t, u


def mandelstam_batch(process: ProcessKind, p: np.ndarray, theta: np.ndarray,
                     consts: Constants = DEFAULT):
    """Vectorized (s, t, u) plus energies and q_out over (p, theta) arrays."""
    p = np.asarray(p, dtype=float)
    theta = np.asarray(theta, dtype=float)
    m1, m2, m3, m4 = process_masses(process, consts)
    e1, e2, e3, e4, q = _com_energies(process, p, consts)
    ct = np.cos(theta)
    s = (e1 + e2) ** 2
    t = m1 ** 2 + m3 ** 2 - 2.0 * (e1 * e3 - p * q * ct)
    u = m1 ** 2 + m4 ** 2 - 2.0 * (e1 * e4 + p * q * ct)
    return s, t, u, e1, e2, e3, e4, q
