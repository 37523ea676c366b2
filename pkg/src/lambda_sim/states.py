"""Conversions between the 8-component state vector and the 3x3 density matrix.

The master equation works on the vector
    [rho_gg, rho_ge, rho_gs, rho_eg, rho_ee, rho_es, rho_sg, rho_se]
with rho_ss eliminated through the trace condition rho_gg+rho_ee+rho_ss = 1.
Indices 0..2 label (g, e, s).
"""
from __future__ import annotations

import numpy as np

G, E, S = 0, 1, 2

VEC_LABELS = ("gg", "ge", "gs", "eg", "ee", "es", "sg", "se")

# (row, col) of each vector entry inside the 3x3 matrix
VEC_INDEX = ((0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2), (2, 0), (2, 1))

# position of the conjugate partner of each entry (ge<->eg, gs<->sg, es<->se)
PAIR_SWAP = (0, 3, 6, 1, 4, 7, 2, 5)

HERM_TOL = 1e-9
POSITIVITY_FLOOR = -1e-8
TRACE_TOL = 1e-9


def sigma(a: int, b: int) -> np.ndarray:
    """Atomic transition operator |a><b| as a 3x3 complex matrix."""
    m = np.zeros((3, 3), dtype=complex)
    m[a, b] = 1.0
    return m


def pairing_defect(v: np.ndarray) -> float:
    """Largest violation of the conjugate-pairing structure of an 8-vector."""
    v = np.asarray(v, dtype=complex)
    return float(np.abs(v - np.conj(v[list(PAIR_SWAP)])).max())


def vec_to_mat(v: np.ndarray, check: bool = True) -> np.ndarray:
    """Rebuild the 3x3 density matrix, with rho_ss = 1 - rho_gg - rho_ee.

    With ``check`` enabled the reconstruction is validated: Hermiticity within
    HERM_TOL and smallest eigenvalue >= POSITIVITY_FLOOR.
    """
    v = np.asarray(v, dtype=complex)
    if v.shape != (8,):
        raise ValueError("state vector must have shape (8,)")
    m = np.empty((3, 3), dtype=complex)
    for k, (i, j) in enumerate(VEC_INDEX):
        m[i, j] = v[k]
    m[2, 2] = 1.0 - v[0] - v[4]
    if check:
        asym = np.abs(m - m.conj().T).max()
        if asym > HERM_TOL:
            raise ValueError(f"reconstructed matrix not Hermitian: max asymmetry {asym:.3e}")
        min_eig = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min())
        if min_eig < POSITIVITY_FLOOR:
            raise ValueError(f"reconstructed matrix not positive: min eigenvalue {min_eig:.3e}")
    return m


def mat_to_vec(m: np.ndarray) -> np.ndarray:
    """Extract the 8 independent entries of a Hermitian, trace-one matrix."""
    m = np.asarray(m, dtype=complex)
    if m.shape != (3, 3):
        raise ValueError("density matrix must have shape (3, 3)")
    tr = m.trace()
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"trace must be 1 within {TRACE_TOL:g}, got {tr}")
    return np.array([m[i, j] for (i, j) in VEC_INDEX], dtype=complex)


def populations(v: np.ndarray) -> tuple[float, float, float]:
    """Bare populations (rho_gg, rho_ee, rho_ss); rho_ss closes the trace."""
    gg = float(np.real(v[0]))
    ee = float(np.real(v[4]))
    return gg, ee, 1.0 - gg - ee


def ground_state_vec() -> np.ndarray:
    """Vectorized |g><g|."""
    v = np.zeros(8, dtype=complex)
    v[0] = 1.0
    return v


def dark_state_matrix() -> np.ndarray:
    """Density matrix of the dark superposition (|g> - |s>)/sqrt(2)."""
    k = np.array([1.0, 0.0, -1.0], dtype=complex) / np.sqrt(2.0)
    return np.outer(k, k.conj())
