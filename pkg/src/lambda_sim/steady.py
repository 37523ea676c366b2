"""Steady-state solution, time evolution and population sweeps."""
from __future__ import annotations

import logging
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
import scipy.linalg

from . import dressed as dressed_mod
from .generator import AffineGenerator, constructed_generator, stability_spectrum
from .noise import compute_coeffs
from .params import AtomParams, NoiseParams
from .states import pairing_defect, populations

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10
POPULATION_TOL = 1e-9
PAIRING_TOL = 1e-8
COND_WARN = 1e12
COND_SINGULAR = 1e13

SWEEP_VARIABLES = ("eta", "dd", "delta", "omega")


class SingularGeneratorError(RuntimeError):
    """Q is singular (or near-singular); carries the offending eigenvalue."""


@dataclass(frozen=True)
class SteadyState:
    """Steady state rho_st = -Q^{-1} B with its solve diagnostics."""

    vec: np.ndarray
    residual: float
    populations: tuple[float, float, float]


@dataclass(frozen=True)
class SweepResult:
    """Population curves over a one-parameter grid.

    ``series`` maps column names to arrays aligned with ``axis``; points that
    failed to solve are NaN in every series and listed in ``failed`` as
    (index, reason).
    """

    axis: np.ndarray
    series: dict[str, np.ndarray]
    failed: list[tuple[int, str]]
    metadata: dict[str, Any] = field(default_factory=dict)


def solve_steady(g: AffineGenerator) -> SteadyState:
    """Solve Q rho + B = 0 by dense LU with partial pivoting.

    Raises SingularGeneratorError when Q has a (near-)zero eigenvalue, which
    physically signals the dark-state degeneracy at gamma_sg = 0, D = 0.
    """

    def _raise_singular() -> None:
        eig = np.linalg.eigvals(g.q)
        worst = eig[np.argmin(np.abs(eig))]
        raise SingularGeneratorError(
            f"Q is singular to working precision; near-zero eigenvalue {worst:.6e}"
        )

    cond = np.linalg.cond(g.q)
    if not np.isfinite(cond) or cond > COND_SINGULAR:
        _raise_singular()
    if cond > COND_WARN:
        log.warning("steady-state solve: condition number estimate %.3e", cond)

    try:
        vec = scipy.linalg.lu_solve(scipy.linalg.lu_factor(g.q), -g.b)
    except (scipy.linalg.LinAlgError, ValueError):
        _raise_singular()

    b_norm = float(np.linalg.norm(g.b))
    residual = float(np.linalg.norm(g.q @ vec + g.b))
    if b_norm > 0 and residual > RESIDUAL_TOL * b_norm:
        raise SingularGeneratorError(
            f"steady-state residual {residual:.3e} exceeds {RESIDUAL_TOL:g}*||B||"
        )
    defect = pairing_defect(vec)
    if defect > PAIRING_TOL:
        raise SingularGeneratorError(
            f"steady state violates Hermitian pairing: defect {defect:.3e}"
        )
    pops = populations(vec)
    if min(pops) < -POPULATION_TOL or max(pops) > 1.0 + POPULATION_TOL:
        raise SingularGeneratorError(f"unphysical steady-state populations {pops}")
    return SteadyState(vec=vec, residual=residual, populations=pops)


def _rk4_step_map(g: AffineGenerator, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """One fixed step of classical RK4 on d(rho)/dt = Q rho + B as an affine map.

    For an affine autonomous system the RK4 update is exactly
        rho'  =  P rho + c,
        P = sum_{k=0..4} (dt Q)^k / k!,
        c = dt * sum_{k=0..3} (dt Q)^k / (k+1)! @ B,
    so repeated stepping can be composed in matrix form.  The fixed point of
    the map coincides with -Q^{-1}B exactly.
    """
    a = dt * g.q
    p_mat = np.eye(8, dtype=complex)
    term = np.eye(8, dtype=complex)
    for k in range(1, 5):
        term = term @ a / k
        p_mat = p_mat + term
    s_mat = np.eye(8, dtype=complex)  # sum_{k=0..3} a^k / (k+1)!
    term = np.eye(8, dtype=complex)
    fact = 1.0
    for k in range(1, 4):
        term = term @ a
        fact *= k + 1
        s_mat = s_mat + term / fact
    c = dt * (s_mat @ g.b)
    return p_mat, c


def _compose(p1: np.ndarray, c1: np.ndarray, p2: np.ndarray, c2: np.ndarray):
    # apply (p1, c1) first, then (p2, c2)
    return p2 @ p1, p2 @ c1 + c2


def _power_map(p_mat: np.ndarray, c: np.ndarray, n: int):
    """Affine map applied n times, composed by binary exponentiation."""
    acc_p = np.eye(8, dtype=complex)
    acc_c = np.zeros(8, dtype=complex)
    base_p, base_c = p_mat, c
    while n > 0:
        if n & 1:
            acc_p, acc_c = _compose(acc_p, acc_c, base_p, base_c)
        n >>= 1
        if n:
            base_p, base_c = _compose(base_p, base_c, base_p, base_c)
    return acc_p, acc_c


def evolve(
    g: AffineGenerator,
    v0: np.ndarray,
    t_end: float,
    dt: float,
    store_every: int | None = None,
    check_pairing: bool = True,
) -> tuple[np.ndarray, np.ndarray]:
    """Fixed-step RK4 integration of d(rho)/dt = Q rho + B.

    Returns (times, states) with states[k] the 8-vector at times[k]; states are
    stored every ``store_every`` steps (chosen automatically when None) and the
    final time is always included.  The per-step RK4 update is applied in its
    exact affine-map form, so arbitrarily long horizons cost only matrix
    compositions; results are bit-deterministic.

    A warning is issued when dt exceeds 0.1 / max|eigenvalue(Q)| (the fastest
    coherent scale, of order the generalized Rabi frequency).

    ``check_pairing`` enforces the Hermitian-pairing invariant of density
    vectors; disable it when evolving general 8-vectors such as two-time
    correlation columns, which obey the same linear equation.
    """
    if dt <= 0 or t_end < 0:
        raise ValueError("need dt > 0 and t_end >= 0")
    v0 = np.asarray(v0, dtype=complex)
    if check_pairing and pairing_defect(v0) > PAIRING_TOL:
        raise ValueError("initial state violates the conjugate-pairing invariant")
    n_steps = max(1, int(round(t_end / dt)))
    fastest = float(np.abs(stability_spectrum(g).eigenvalues).max())
    if fastest > 0 and dt > 0.1 / fastest:
        warnings.warn(
            f"dt = {dt:g} us does not resolve the fastest scale "
            f"{fastest:.3g} MHz (want dt <= {0.1 / fastest:.3g})",
            RuntimeWarning,
            stacklevel=2,
        )

    if store_every is None:
        store_every = max(1, n_steps // 512)
    p_mat, c = _rk4_step_map(g, dt)
    block_p, block_c = _power_map(p_mat, c, store_every)

    n_blocks, rem = divmod(n_steps, store_every)
    times = [0.0]
    states = [v0]
    v = v0
    for k in range(n_blocks):
        v = block_p @ v + block_c
        times.append((k + 1) * store_every * dt)
        states.append(v)
    if rem:
        rem_p, rem_c = _power_map(p_mat, c, rem)
        v = rem_p @ v + rem_c
        times.append(n_steps * dt)
        states.append(v)
    out_t = np.array(times)
    out_v = np.array(states)
    if not np.all(np.isfinite(out_v.view(float))):
        raise RuntimeError(
            f"NaN/inf during time evolution (dt={dt:g}, t_end={t_end:g}); "
            "the step size is numerically unstable for this generator"
        )
    return out_t, out_v


_SERIES_COLUMNS = ("rho_gg", "rho_ee", "rho_ss", "rho_00", "rho_pp", "rho_mm", "residual")


def _sweep_point(p: AtomParams, noise: NoiseParams) -> tuple[float, ...]:
    ss = solve_steady(constructed_generator(p, compute_coeffs(p, noise)))
    gg, ee, s_pop = ss.populations
    if p.omega > 0:
        basis = dressed_mod.dressed_basis(p)
        dp = dressed_mod.numeric_dressed_populations(ss, basis)
        d00, dpp, dmm = dp.p00, dp.ppp, dp.pmm
    else:
        d00 = dpp = dmm = float("nan")
    return gg, ee, s_pop, d00, dpp, dmm, ss.residual


def sweep(
    p: AtomParams,
    noise: NoiseParams,
    variable: str,
    grid: np.ndarray,
    threads: int | None = None,
) -> SweepResult:
    """Solve the steady state along a one-parameter grid.

    ``variable`` is one of eta/dd/delta/omega; each grid point rebuilds the
    coefficients and generator from scratch.  Points where the solve fails are
    recorded with a reason and do not abort the sweep.  Output order follows
    the grid regardless of execution order.
    """
    if variable not in SWEEP_VARIABLES:
        raise ValueError(f"sweep variable must be one of {SWEEP_VARIABLES}")
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 1:
        raise ValueError("sweep grid must be a non-empty 1-D array")

    def configure(value: float) -> tuple[AtomParams, NoiseParams]:
        if variable == "eta":
            return p, replace(noise, eta=value)
        if variable == "dd":
            return p, replace(noise, dd=value)
        if variable == "delta":
            return replace(p, delta=value), noise
        return replace(p, omega=value), noise

    rows = np.full((grid.size, len(_SERIES_COLUMNS)), np.nan)
    failures: list[tuple[int, str] | None] = [None] * grid.size

    def work(i: int) -> None:
        try:
            pi, ni = configure(float(grid[i]))
            rows[i] = _sweep_point(pi, ni)
        except Exception as exc:  # per-point isolation, reason recorded
            failures[i] = (i, f"{type(exc).__name__}: {exc}")

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, range(grid.size)))
    else:
        for i in range(grid.size):
            work(i)

    series = {name: rows[:, k].copy() for k, name in enumerate(_SERIES_COLUMNS)}
    failed = [f for f in failures if f is not None]
    metadata = {
        "variable": variable,
        "atom": vars(p).copy(),
        "noise": vars(noise).copy(),
    }
    return SweepResult(axis=grid, series=series, failed=failed, metadata=metadata)
