"""Incoherent fluorescence spectrum from the regression theorem and resolvent.

Fluctuation operators delta_sigma = sigma - <sigma>_st inherit the homogeneous
evolution dy/dtau = Q y, so the one-sided Fourier transform of the two-time
correlations is a resolvent solve,

    Y_k(omega) = -(i omega I + Q)^{-1} y_k(0),      k = g, s,

and the incoherent spectrum (per the mu_es . mu_eg* ~ 0 orthogonal-dipole
assumption that removes cross terms) is

    S_inc(omega) = mu_sq * Re[ Y_g(omega)[ge] + Y_s(omega)[se] ],

with frequencies measured relative to the coherent drive.  The elastic
delta-function component never appears because only fluctuations are evolved.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import scipy.linalg
from scipy.signal import find_peaks

from .generator import AffineGenerator, constructed_generator
from .noise import compute_coeffs
from .params import AtomParams, NoiseParams, generalized_rabi
from .steady import SteadyState, solve_steady
from .states import vec_to_mat

DEFAULT_GRID_POINTS = 2001
PEAK_PROMINENCE_FRAC = 0.01

# (row, col) of the operator sigma_{c d} at each slot of the correlation
# vector; same ordering as the state vector (sigma_gg, sigma_eg, sigma_sg,
# sigma_ge, sigma_ee, sigma_se, sigma_gs, sigma_es).
_OPERATOR_INDEX = ((0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1), (0, 2), (1, 2))

# slots carrying sigma_ge and sigma_se, whose correlators feed the spectrum
_GE_SLOT = 3
_SE_SLOT = 5


@dataclass(frozen=True)
class CorrelationInit:
    """Equal-time fluctuation correlations seeding the g and s channels."""

    y_g0: np.ndarray
    y_s0: np.ndarray


@dataclass(frozen=True)
class SpectrumResult:
    omegas: np.ndarray
    values: np.ndarray
    peaks: list[tuple[float, float]]
    params: dict[str, Any] = field(default_factory=dict)


def initial_correlations(ss: SteadyState) -> CorrelationInit:
    """Equal-time correlations <delta_sigma_ek delta_sigma_cd>_st for k = g, s.

    Products reduce through sigma_ab sigma_cd = delta_bc sigma_ad and
    expectations through <sigma_ab>_st = rho_ba, so slot j of channel k is
    delta_{k,c_j} rho_{d_j,e} - rho_{k,e} rho_{d_j,c_j}.
    """
    rho = vec_to_mat(ss.vec)
    out = []
    for k in (0, 2):  # g and s channels
        y = np.empty(8, dtype=complex)
        for j, (c, d) in enumerate(_OPERATOR_INDEX):
            first = rho[d, 1] if c == k else 0.0
            y[j] = first - rho[k, 1] * rho[d, c]
        out.append(y)
    return CorrelationInit(y_g0=out[0], y_s0=out[1])


def resolvent_response(g: AffineGenerator, omega: float, y0: np.ndarray) -> np.ndarray:
    """Y(omega) = -(i omega I + Q)^{-1} y0 via dense LU."""
    a = 1j * omega * np.eye(8, dtype=complex) + g.q
    try:
        return -np.linalg.solve(a, np.asarray(y0, dtype=complex))
    except np.linalg.LinAlgError as exc:
        eig = np.linalg.eigvals(g.q)
        worst = eig[np.argmin(np.abs(eig + 1j * omega))]
        raise RuntimeError(
            f"resolvent singular at omega={omega:g}: Q eigenvalue {worst:.6e}"
        ) from exc


def s_inc(g: AffineGenerator, init: CorrelationInit, omega: float, mu_sq: float = 1.0) -> float:
    """Incoherent spectrum value at a single frequency (arbitrary units)."""
    y_g = resolvent_response(g, omega, init.y_g0)
    y_s = resolvent_response(g, omega, init.y_s0)
    return mu_sq * float((y_g[_GE_SLOT] + y_s[_SE_SLOT]).real)


def default_grid(p: AtomParams, n_points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    """Symmetric frequency grid spanning [-2R, 2R]."""
    rr = generalized_rabi(p)
    return np.linspace(-2.0 * rr, 2.0 * rr, n_points)


def detect_peaks(
    omegas: np.ndarray, values: np.ndarray, prominence_frac: float = PEAK_PROMINENCE_FRAC
) -> list[tuple[float, float]]:
    """Local maxima with prominence above ``prominence_frac`` of the global max."""
    if values.size < 3:
        return []
    idx, _ = find_peaks(values, prominence=prominence_frac * float(values.max()))
    return [(float(omegas[i]), float(values[i])) for i in idx]


def spectrum_sweep(
    p: AtomParams,
    noise: NoiseParams,
    grid: np.ndarray | None = None,
    threads: int | None = None,
) -> SpectrumResult:
    """Full pipeline: coefficients -> generator -> steady state -> resolvent scan.

    One LU factorization per frequency serves both correlation channels.
    Failed frequencies are NaN in the output; results follow grid order.
    """
    omegas = default_grid(p) if grid is None else np.asarray(grid, dtype=float)
    if omegas.ndim != 1 or omegas.size < 2 or np.any(np.diff(omegas) <= 0):
        raise ValueError("frequency grid must be strictly increasing with >= 2 points")

    g = constructed_generator(p, compute_coeffs(p, noise))
    init = initial_correlations(solve_steady(g))
    rhs = np.column_stack([init.y_g0, init.y_s0])
    eye = np.eye(8, dtype=complex)
    values = np.full(omegas.size, np.nan)

    def work(i: int) -> None:
        try:
            lu = scipy.linalg.lu_factor(1j * omegas[i] * eye + g.q)
            sol = -scipy.linalg.lu_solve(lu, rhs)
            values[i] = p.mu_sq * float((sol[_GE_SLOT, 0] + sol[_SE_SLOT, 1]).real)
        except Exception:
            values[i] = np.nan

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, range(omegas.size)))
    else:
        for i in range(omegas.size):
            work(i)

    peaks = detect_peaks(omegas, np.nan_to_num(values, nan=0.0))
    params = {"atom": vars(p).copy(), "noise": vars(noise).copy(), "n_points": int(omegas.size)}
    return SpectrumResult(omegas=omegas, values=values, peaks=peaks, params=params)
