"""Physical parameter records and derived quantities for the driven lambda system.

All rates and frequencies are angular quantities expressed in MHz; time is
measured in microseconds, so exp(-gamma*t) combines gamma in MHz with t in us
directly. The three atomic levels are ordered (|g>, |e>, |s>) throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

DEFAULT_GAMMA = 1.0        # spontaneous decay rate per channel (MHz)
DEFAULT_GAMMA_SG = 1e-3    # ground-state decoherence rate (MHz)
DEFAULT_KAPPA = 60.0       # stochastic-field bandwidth (MHz)
DEFAULT_MU_SQ = 1.0        # squared dipole magnitude (arbitrary units)


@dataclass(frozen=True)
class AtomParams:
    """Atom and coherent-drive configuration.

    omega:    Rabi frequency of the coherent drive on both arms (MHz)
    delta:    single-photon detuning of the coherent drive (MHz)
    gamma:    spontaneous decay rate e->g and e->s, per channel (MHz)
    gamma_sg: decay/decoherence rate of the s->g channel (MHz)
    mu_sq:    squared dipole magnitude, sets the spectral intensity scale
    """

    omega: float
    delta: float
    gamma: float = DEFAULT_GAMMA
    gamma_sg: float = DEFAULT_GAMMA_SG
    mu_sq: float = DEFAULT_MU_SQ

    def __post_init__(self) -> None:
        for name in ("omega", "delta", "gamma", "gamma_sg", "mu_sq"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.gamma <= 0:
            raise ValueError("gamma must be > 0")
        if self.gamma_sg < 0:
            raise ValueError("gamma_sg must be >= 0")
        # omega = 0 is permitted for degenerate checks (pure decay, zero
        # coupling); the dressed-basis analysis additionally requires omega > 0.
        if self.omega < 0:
            raise ValueError("omega must be >= 0")
        if self.mu_sq <= 0:
            raise ValueError("mu_sq must be > 0")


@dataclass(frozen=True)
class NoiseParams:
    """Stochastic-field configuration.

    dd:    noise strength D; the field autocorrelation is D*kappa*exp(-kappa|t-t'|)
    kappa: noise bandwidth (MHz)
    eta:   offset of the stochastic-field central frequency from the drive (MHz)
    """

    dd: float
    eta: float = 0.0
    kappa: float = DEFAULT_KAPPA

    def __post_init__(self) -> None:
        for name in ("dd", "eta", "kappa"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.dd < 0:
            raise ValueError("dd must be >= 0")
        if self.kappa <= 0:
            raise ValueError("kappa must be > 0")


def generalized_rabi(p: AtomParams) -> float:
    """Generalized Rabi frequency R = sqrt(delta^2 + 8*omega^2) (MHz)."""
    return math.hypot(p.delta, math.sqrt(8.0) * p.omega)


@dataclass(frozen=True)
class DerivedQuantities:
    """Dressed-level splitting data derived from an AtomParams record.

    rr is the generalized Rabi frequency; lambda_plus/minus are the bright
    dressed eigenvalues (delta +- rr)/2 and lambda_zero = 0 belongs to the
    dark state. n_plus/minus are the bright-state normalizations.
    """

    rr: float
    lambda_plus: float
    lambda_minus: float
    lambda_zero: float
    n_plus: float
    n_minus: float


def derive(p: AtomParams) -> DerivedQuantities:
    """Compute the dressed eigenvalues and normalizations for ``p``.

    Requires omega > 0 so that lambda_plus * lambda_minus = -2*omega^2 != 0.
    """
    if p.omega <= 0:
        raise ValueError("derived quantities require omega > 0")
    rr = generalized_rabi(p)
    lam_p = 0.5 * (p.delta + rr)
    lam_m = 0.5 * (p.delta - rr)
    n_p = math.sqrt(1.0 + 2.0 * p.omega**2 / lam_p**2)
    n_m = math.sqrt(1.0 + 2.0 * p.omega**2 / lam_m**2)
    return DerivedQuantities(rr, lam_p, lam_m, 0.0, n_p, n_m)
