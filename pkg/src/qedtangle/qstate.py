"""Two-qubit helicity density matrices and their evolution through scattering.

The basis is fixed to (LL, LR, RL, RR), first letter = particle 1. Evolution
implements filtered scattering: rho_out = M rho_in M+ / Tr(M rho_in M+),
the unique linear extension of the diagonal-mixture filtering formula to
arbitrary input states. Overall constants and phases of M drop out.
"""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .errors import UnfilterableStateError
from .linalg import hermitian_eigenvalues

BASIS = ("LL", "LR", "RL", "RR")

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
#: Tr(M rho M+) below this times |M|_F^2 counts as no outgoing flux
FLUX_TOL = 1e-30


@dataclass(frozen=True)
class DensityMatrix:
    """4x4 complex Hermitian, unit-trace, PSD matrix over (LL, LR, RL, RR)."""

    entries: np.ndarray

    @staticmethod
    def from_matrix(matrix: np.ndarray, validate: bool = True) -> "DensityMatrix":
        m = np.asarray(matrix, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError(f"density matrix must be 4x4, got {m.shape}")
        if validate:
            dev = np.max(np.abs(m - m.conj().T))
            if dev > HERMITICITY_TOL:
                raise ValueError(f"not Hermitian: max deviation {dev:.3e}")
            tr = np.trace(m).real
            if abs(tr - 1.0) > TRACE_TOL:
                raise ValueError(f"trace must be 1, got {tr!r}")
            lo = hermitian_eigenvalues(0.5 * (m + m.conj().T))[0]
            if lo < -PSD_TOL:
                raise ValueError(f"not positive semidefinite: min eigenvalue {lo:.3e}")
        return DensityMatrix(m)

    def purity(self) -> float:
        return float(np.einsum('ij,ji->', self.entries, self.entries).real)


@dataclass(frozen=True)
class InitialState:
    density: DensityMatrix
    description: str


def unpolarized() -> InitialState:
    """Maximally mixed input, weight 1/4 per helicity pair."""
    return InitialState(DensityMatrix(np.eye(4, dtype=complex) / 4.0), "unpolarized")


def pure(pair: str) -> InitialState:
    """Pure helicity product state |pair>, pair in {LL, LR, RL, RR}."""
    pair = pair.upper()
    if pair not in BASIS:
        raise ValueError(f"helicity pair must be one of {BASIS}, got {pair!r}")
    m = np.zeros((4, 4), dtype=complex)
    m[BASIS.index(pair), BASIS.index(pair)] = 1.0
    return InitialState(DensityMatrix(m), f"pure({pair})")


def diagonal(weights) -> InitialState:
    """Diagonal mixture with the given four weights (nonnegative, sum 1)."""
    w = np.asarray(weights, dtype=float)
    if w.shape != (4,):
        raise ValueError("diagonal mixture needs exactly 4 weights")
    if np.any(w < 0):
        raise ValueError(f"weights must be nonnegative, got {w.tolist()}")
    if abs(w.sum() - 1.0) > 1e-12:
        raise ValueError(f"weights must sum to 1, got {w.sum()!r}")
    return InitialState(DensityMatrix(np.diag(w).astype(complex)),
                        "diag:" + ",".join(f"{x:g}" for x in w))


def werner_symmetric() -> InitialState:
    """Unpolarized state projected onto the symmetric subspace.

    (|LL><LL| + |psi+><psi+| + |RR><RR|)/3, eigenvalues {1/3, 1/3, 1/3, 0}.
    """
    psi_plus = np.array([0.0, 1.0, 1.0, 0.0], dtype=complex) / math.sqrt(2.0)
    m = (np.diag([1.0, 0, 0, 0]).astype(complex)
         + np.outer(psi_plus, psi_plus.conj())
         + np.diag([0, 0, 0, 1.0]).astype(complex)) / 3.0
    return InitialState(DensityMatrix(m), "werner")


def from_matrix(matrix: np.ndarray, description: str = "custom-matrix") -> InitialState:
    return InitialState(DensityMatrix.from_matrix(matrix), description)


def _entries(m) -> np.ndarray:
    if hasattr(m, "entries"):
        return np.asarray(m.entries, dtype=complex)
    return np.asarray(m, dtype=complex)


def evolve(amplitude, init) -> DensityMatrix:
    """Filtered scattering evolution M rho M+ / Tr(...).

    `amplitude` may be an AmplitudeMatrix or a bare 4x4 array; `init` an
    InitialState or DensityMatrix. Raises UnfilterableStateError when the
    trace is below FLUX_TOL * |M|_F^2 (no flux into the filtered momenta).
    """
    m = _entries(amplitude)
    rho_in = _entries(init.density if isinstance(init, InitialState) else init)
    out = m @ rho_in @ m.conj().T
    norm = np.trace(out).real
    if norm <= FLUX_TOL * float(np.sum(np.abs(m) ** 2)):
        raise UnfilterableStateError(
            f"no outgoing flux: Tr(M rho M+) = {norm:.3e}")
    out = out / norm
    out = 0.5 * (out + out.conj().T)
    return DensityMatrix(out)


def evolve_batch(amps: np.ndarray, rho_in: np.ndarray):
    """Batch evolution, (N,4,4) amplitudes -> (N,4,4) states + flux-ok mask.

    Rows with no outgoing flux are left unnormalized and flagged False.
    """
    out = np.einsum('nab,bc,ndc->nad', amps, rho_in, amps.conj())
    norm = np.einsum('naa->n', out).real
    flux_ok = norm > FLUX_TOL * np.sum(np.abs(amps) ** 2, axis=(1, 2))
    safe = np.where(flux_ok, norm, 1.0)
    out /= safe[:, None, None]
    out = 0.5 * (out + out.conj().transpose(0, 2, 1))
    return out, flux_ok
