"""Line-shape factors and stochastic-coupling coefficients.

The finite-bandwidth noise enters the effective master equation through three
complex coefficients built from the Lorentzian line-shape factor

    f(n) = D*kappa / (kappa + i*(eta + n*R)),   n = -1, 0, +1

sampled at the dressed-transition frequencies 0 and +-R.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import AtomParams, NoiseParams, generalized_rabi


@dataclass(frozen=True)
class CoeffSet:
    """Stochastic-coupling coefficients M, N, H and the f(n) they came from."""

    m_coef: complex
    n_coef: complex
    h_coef: complex
    f_minus: complex
    f_zero: complex
    f_plus: complex


def f_n(noise: NoiseParams, rr: float, n: int) -> complex:
    """Line-shape factor f(n); the denominator never vanishes since kappa > 0."""
    if n not in (-1, 0, 1):
        raise ValueError("n must be one of -1, 0, +1")
    return noise.dd * noise.kappa / (noise.kappa + 1j * (noise.eta + n * rr))


def compute_coeffs(p: AtomParams, noise: NoiseParams) -> CoeffSet:
    """Evaluate M, N, H for the given atom and noise configuration.

    M = (Omega/2R^2) [(Delta+R) f(-1) - 2 Delta f(0) + (Delta-R) f(+1)]
    N = (2 Omega^2/R^2) [-f(-1) + 2 f(0) - f(+1)]
    H = (1/4R^2) [(R+Delta)^2 f(-1) + 16 Omega^2 f(0) + (R-Delta)^2 f(+1)]
    """
    rr = generalized_rabi(p)
    if rr == 0.0:
        # omega = delta = 0: no dressed structure, and the couplings carry a
        # vanishing drive matrix element anyway.
        return CoeffSet(0j, 0j, 0j, 0j, 0j, 0j)
    fm, f0, fp = (f_n(noise, rr, n) for n in (-1, 0, 1))
    om, de = p.omega, p.delta
    m = om / (2.0 * rr**2) * ((de + rr) * fm - 2.0 * de * f0 + (de - rr) * fp)
    n = 2.0 * om**2 / rr**2 * (-fm + 2.0 * f0 - fp)
    h = ((rr + de) ** 2 * fm + 16.0 * om**2 * f0 + (rr - de) ** 2 * fp) / (4.0 * rr**2)
    return CoeffSet(m, n, h, fm, f0, fp)


@dataclass(frozen=True)
class ZMatrices:
    """Coupling operators of the noise double-commutator terms; z_plus = z_minus^dag."""

    z_minus: np.ndarray
    z_plus: np.ndarray


def build_z(coeffs: CoeffSet) -> ZMatrices:
    """Assemble Z- over the (g, e, s) basis; rows 1 and 3 are identical."""
    m, n, h = coeffs.m_coef, coeffs.n_coef, coeffs.h_coef
    z_minus = np.array(
        [[m, h, m],
         [n, -2.0 * m, n],
         [m, h, m]],
        dtype=complex,
    )
    return ZMatrices(z_minus=z_minus, z_plus=z_minus.conj().T)
