"""Peres-Horodecki test and entanglement / mixedness measures for two qubits.

Conventions: negativity N = sum (|l| - l)/2 over partial-transpose
eigenvalues; logarithmic negativity E_N = log2(2N + 1) (base 2, max 1 for two
qubits); von Neumann entropy S = -sum nu ln nu in natural log (max ln 4).
Bell-state fidelities are reported both raw and maximized over local
diagonal phase rotations diag(1, e^{ia}) (x) diag(1, e^{ib}), since helicity
phase conventions move weight between phi+/phi- and psi+/psi- freely.
"""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .constants import Constants, DEFAULT
from .linalg import hermitian_eigenvalues, hermitian_eigenvalues_batch
from .qstate import DensityMatrix

PPT_TOL = 1e-10

_SQ2 = math.sqrt(2.0)
BELL_STATES = {
    "phi+": np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) / _SQ2,
    "phi-": np.array([1.0, 0.0, 0.0, -1.0], dtype=complex) / _SQ2,
    "psi+": np.array([0.0, 1.0, 1.0, 0.0], dtype=complex) / _SQ2,
    "psi-": np.array([0.0, 1.0, -1.0, 0.0], dtype=complex) / _SQ2,
}


@dataclass(frozen=True)
class EntanglementReport:
    pt_eigenvalues: tuple          # 4 reals, ascending
    negativity: float
    log_negativity: float
    entropy: float
    purity: float
    entangled: bool
    switching_potential: bool
    closest_bell: tuple            # (label, raw fidelity)
    closest_bell_phase_opt: tuple  # (label, fidelity maximized over local phases)


def _entries(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return rho.entries
    return np.asarray(rho, dtype=complex)


def partial_transpose(rho) -> np.ndarray:
    """Transpose on the second qubit: ((a,b),(c,d)) -> ((a,d),(c,b))."""
    m = _entries(rho)
    return m.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)


def partial_transpose_batch(rho: np.ndarray) -> np.ndarray:
    n = rho.shape[0]
    return rho.reshape(n, 2, 2, 2, 2).transpose(0, 1, 4, 3, 2).reshape(n, 4, 4)


def bell_fidelities(rho) -> dict:
    """Raw fidelities <B|rho|B> for the four Bell states."""
    m = _entries(rho)
    return {label: float((b.conj() @ m @ b).real) for label, b in BELL_STATES.items()}


def bell_fidelities_phase_opt(rho) -> dict:
    """Fidelities maximized over local diagonal phase rotations.

    The maximum over diag(1, e^{ia}) (x) diag(1, e^{ib}) has the closed form
    (rho_00 + rho_33)/2 + |rho_03| for the phi pair and the analogous
    expression on the inner block for the psi pair.
    """
    m = _entries(rho)
    phi = float((m[0, 0] + m[3, 3]).real / 2.0 + abs(m[0, 3]))
    psi = float((m[1, 1] + m[2, 2]).real / 2.0 + abs(m[1, 2]))
    return {"phi+": phi, "phi-": phi, "psi+": psi, "psi-": psi}


def entropy_from_eigenvalues(nu: np.ndarray) -> float:
    """Von Neumann entropy -sum nu ln nu with 0 ln 0 := 0."""
    nu = np.clip(np.asarray(nu, dtype=float), 0.0, None)
    positive = nu[nu > 0.0]
    return float(-np.sum(positive * np.log(positive)))


def analyze(rho, tol: float = PPT_TOL, consts: Constants = DEFAULT) -> EntanglementReport:
    """Full entanglement and mixedness report for one state.

    `entangled` is min(PT eigenvalues) < -tol; `switching_potential` flags
    |min PT eigenvalue| <= alpha^3, where loop corrections could flip the
    tree-level verdict.
    """
    m = _entries(rho)
    pt_eigs = hermitian_eigenvalues(partial_transpose(m))
    negativity = float(np.sum((np.abs(pt_eigs) - pt_eigs) / 2.0))
    log_negativity = math.log2(2.0 * negativity + 1.0)
    nu = hermitian_eigenvalues(m)
    entropy = entropy_from_eigenvalues(nu)
    purity = float(np.einsum('ij,ji->', m, m).real)

    raw = bell_fidelities(m)
    raw_label = max(raw, key=raw.get)
    opt = bell_fidelities_phase_opt(m)
    # report the raw-best label within the winning (phi or psi) family
    if opt["phi+"] >= opt["psi+"]:
        opt_label = "phi+" if raw["phi+"] >= raw["phi-"] else "phi-"
    else:
        opt_label = "psi+" if raw["psi+"] >= raw["psi-"] else "psi-"

    min_eig = float(pt_eigs[0])
    return EntanglementReport(
        pt_eigenvalues=tuple(float(x) for x in pt_eigs),
        negativity=negativity,
        log_negativity=log_negativity,
        entropy=entropy,
        purity=purity,
        entangled=min_eig < -tol,
        switching_potential=abs(min_eig) <= consts.alpha3,
        closest_bell=(raw_label, raw[raw_label]),
        closest_bell_phase_opt=(opt_label, opt[opt_label]),
    )


def measures_batch(rho: np.ndarray, tol: float = PPT_TOL,
                   consts: Constants = DEFAULT) -> dict:
    """Vectorized scan measures for a batch (N,4,4) of states.

    Returns arrays: min_pt_eig, negativity, log_negativity, entropy,
    entangled, switching.
    """
    pt_eigs = hermitian_eigenvalues_batch(partial_transpose_batch(rho))
    negativity = np.sum((np.abs(pt_eigs) - pt_eigs) / 2.0, axis=1)
    log_negativity = np.log2(2.0 * negativity + 1.0)
    nu = np.clip(hermitian_eigenvalues_batch(rho), 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(nu > 0.0, nu * np.log(nu), 0.0)
    entropy = -np.sum(terms, axis=1)
    min_eig = pt_eigs[:, 0]
    return {
        "min_pt_eig": min_eig,
        "negativity": negativity,
        "log_negativity": log_negativity,
        "entropy": entropy,
        "entangled": min_eig < -tol,
        "switching": np.abs(min_eig) <= consts.alpha3,
    }
