"""Dressed-basis analysis: eigenstates, secular rates and dressed populations.

The drive Hamiltonian has eigenvalues lambda_0 = 0 (dark state) and
lambda_+- = (Delta +- R)/2 with eigenstates

    |0>  = (|g> - |s>)/sqrt(2)
    |+-> = [ (Omega/lambda_+-)|g> + |e> + (Omega/lambda_+-)|s> ] / N_+-.

Under the secular approximation (valid for Omega >> gamma) the steady dressed
populations have a closed form in terms of four effective rates Gamma_1..4 and
a noise term C; this module evaluates those closed forms and also projects the
full numerical steady state onto the dressed basis for cross-validation.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .noise import CoeffSet
from .params import AtomParams, derive
from .states import vec_to_mat

if TYPE_CHECKING:  # pragma: no cover
    from .steady import SteadyState

T_DENOM_FLOOR = 1e-300


@dataclass(frozen=True)
class DressedBasis:
    """Dressed eigenvectors in (|g>, |e>, |s>) coordinates."""

    ket_zero: np.ndarray
    ket_plus: np.ndarray
    ket_minus: np.ndarray


@dataclass(frozen=True)
class GammaSet:
    """Effective dressed-level rates Gamma_1..4, noise term C and denominator T."""

    g1: float
    g2: float
    g3: float
    g4: float
    c_term: float
    t_denom: float


@dataclass(frozen=True)
class DressedPopulations:
    p00: float
    ppp: float
    pmm: float


def dressed_basis(p: AtomParams) -> DressedBasis:
    """Orthonormal dressed eigenbasis; requires omega > 0."""
    d = derive(p)
    k0 = np.array([1.0, 0.0, -1.0], dtype=complex) / np.sqrt(2.0)
    kp = np.array([p.omega / d.lambda_plus, 1.0, p.omega / d.lambda_plus], dtype=complex)
    km = np.array([p.omega / d.lambda_minus, 1.0, p.omega / d.lambda_minus], dtype=complex)
    return DressedBasis(ket_zero=k0, ket_plus=kp / d.n_plus, ket_minus=km / d.n_minus)


def gammas(p: AtomParams, coeffs: CoeffSet) -> GammaSet:
    """Evaluate Gamma_1..4, C and the population denominator T.

    Gamma_1 and Gamma_2 contain only the intrinsic rates gamma and gamma_sg;
    Gamma_3 and Gamma_4 additionally carry the noise contribution
    C = Re(H)(Delta^2+R^2) + 8 Omega (Delta Re(M) - Omega Re(N)).
    """
    d = derive(p)
    rr, om, de = d.rr, p.omega, p.delta
    ga, gs = p.gamma, p.gamma_sg
    c = coeffs.h_coef.real * (de**2 + rr**2) + 8.0 * om * (
        de * coeffs.m_coef.real - om * coeffs.n_coef.real
    )
    g1 = (2.0 * gs * om**2 + ga * (rr + de) ** 2) / (2.0 * rr * (rr + de))
    g2 = g1 + de * (gs - 4.0 * ga) / (4.0 * rr)
    g3 = (2.0 * om**2 - rr * (rr + de)) * (ga * (rr + de) ** 2 + 2.0 * gs * om**2) / (
        rr**2 * (rr + de) ** 2
    ) - c / (2.0 * rr**2)
    g4 = (2.0 * gs * om**2 + ga * (rr - de) ** 2) / (4.0 * rr**2) + c / (2.0 * rr**2)
    t = rr * (de + rr) * (4.0 * (g1 * g4 - g2 * g3) + gs * (g4 - g3)) + 4.0 * om**2 * gs * (
        g2 - g1
    )
    return GammaSet(g1=g1, g2=g2, g3=g3, g4=g4, c_term=c, t_denom=t)


def closed_form_populations(g: GammaSet, p: AtomParams) -> DressedPopulations:
    """Secular steady populations of |0>, |+>, |->.

    The secular approximation behind these forms assumes Omega >> gamma; that
    regime is advisory and not enforced here.
    """
    if abs(g.t_denom) < T_DENOM_FLOOR:
        raise ZeroDivisionError("population denominator T is numerically zero")
    d = derive(p)
    rr, om, gs = d.rr, p.omega, p.gamma_sg
    de = p.delta
    p00 = 4.0 * rr * (de + rr) * (g.g1 * g.g4 - g.g2 * g.g3) / g.t_denom
    ppp = gs * (4.0 * g.g2 * om**2 + g.g4 * rr * (de + rr)) / g.t_denom
    pmm = -gs * (4.0 * g.g1 * om**2 + g.g3 * rr * (de + rr)) / g.t_denom
    return DressedPopulations(p00=p00, ppp=ppp, pmm=pmm)


def noise_free_limit(p: AtomParams) -> DressedPopulations:
    """Dressed populations in the ideal noise-free limit (kappa -> inf, D -> 0)."""
    d = derive(p)
    rr, om, de = d.rr, p.omega, p.delta
    ga, gs = p.gamma, p.gamma_sg
    den = 4.0 * ga * gs * de**2 + om**2 * (4.0 * ga + gs) * (4.0 * ga + 3.0 * gs)
    ppp = gs * (om**2 * (4.0 * ga + gs) - ga * de * (rr - de)) / den
    p00 = (2.0 * ga * gs * de**2 + om**2 * (4.0 * ga + gs) ** 2) / den
    pmm = gs * (om**2 * (4.0 * ga + gs) + ga * de * (rr + de)) / den
    return DressedPopulations(p00=p00, ppp=ppp, pmm=pmm)


def numeric_dressed_populations(ss: "SteadyState", basis: DressedBasis) -> DressedPopulations:
    """Project a full steady state onto the dressed basis: p_a = <a|rho|a>."""
    m = vec_to_mat(ss.vec)
    vals = [float(np.real(k.conj() @ m @ k)) for k in (basis.ket_zero, basis.ket_plus, basis.ket_minus)]
    return DressedPopulations(p00=vals[0], ppp=vals[1], pmm=vals[2])
