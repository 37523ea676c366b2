"""Dual construction of the affine generator d(rho)/dt = Q rho + B.

The equation of motion combines the coherent commutator, the spontaneous-decay
dissipator and two noise double-commutator terms,

    d(rho)/dt = -i[H, rho] + L_dec rho
                - (1/4) ( [sigma_eg + sigma_es, [Z-, rho]]
                        + [sigma_ge + sigma_se, [Z+, rho]] ),

with H = Delta sigma_ee + Omega (sigma_eg + sigma_es + h.c.).  After
eliminating rho_ss by the trace condition this is an affine system on the
8-vector of states.VEC_LABELS.

Two independent builders are provided: ``constructed_generator`` assembles the
superoperator mechanically from the operators above, while
``transcribed_generator`` spells out every matrix element in closed form.
``compare_generators`` certifies their agreement; any persistent discrepancy
would be recorded in the errata table below (currently empty: the two routes
agree to floating-point precision).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .noise import CoeffSet, build_z
from .params import AtomParams
from .states import sigma

STABILITY_TOL = 1e-12

# Entries of the closed-form matrix that disagree with the mechanical
# construction.  Each record is (row, col, printed_expr, constructed_expr)
# with 0-based indices and col = -1 addressing the constant vector B.
# The dual build left no discrepancies, so the table is empty; the
# machinery is kept so any future edit of the closed forms is caught.
ERRATA: tuple[tuple[int, int, str, str], ...] = ()

ERRATA_HEADER = (
    "# Discrepancies between the closed-form generator transcription and the\n"
    "# mechanical superoperator construction.  Format per line:\n"
    "#   row,col,printed_expr,constructed_value\n"
    "# (0-based indices; col = -1 refers to the constant vector B.)\n"
    "# No discrepancies found: the two constructions agree elementwise to\n"
    "# better than 1e-12 over randomized parameters.\n"
)


@dataclass(frozen=True)
class AffineGenerator:
    """8x8 evolution matrix Q and constant vector B (treated as immutable)."""

    q: np.ndarray
    b: np.ndarray


@dataclass(frozen=True)
class GeneratorDiff:
    """Largest elementwise discrepancy between two generators.

    worst_index is (row, col) into Q, or (row, -1) if the worst entry sits in B.
    """

    max_abs: float
    worst_index: tuple[int, int]


@dataclass(frozen=True)
class StabilityReport:
    """Eigenvalues of Q sorted by descending real part, with instability flags."""

    eigenvalues: np.ndarray
    flagged: np.ndarray

    @property
    def stable(self) -> bool:
        return not bool(self.flagged.any())


def _kron_left(a: np.ndarray) -> np.ndarray:
    # row-major vectorization: vec(A rho) = (A kron I) vec(rho)
    return np.kron(a, np.eye(3, dtype=complex))


def _kron_right(b: np.ndarray) -> np.ndarray:
    # vec(rho B) = (I kron B^T) vec(rho)
    return np.kron(np.eye(3, dtype=complex), b.T)


def _commutator_super(x: np.ndarray) -> np.ndarray:
    return _kron_left(x) - _kron_right(x)


def full_superoperator(p: AtomParams, coeffs: CoeffSet) -> np.ndarray:
    """9x9 superoperator on the row-major vectorized 3x3 density matrix.

    Index order is (gg, ge, gs, eg, ee, es, sg, se, ss); trace preservation
    means rows gg, ee and ss sum to the zero functional.
    """
    h = p.delta * sigma(1, 1) + p.omega * (
        sigma(1, 0) + sigma(1, 2) + sigma(0, 1) + sigma(2, 1)
    )
    lv = -1j * _commutator_super(h)

    # decay channels: e->g and e->s at rate gamma each, s->g at rate gamma_sg
    for jump, rate in ((sigma(0, 1), p.gamma), (sigma(2, 1), p.gamma), (sigma(0, 2), p.gamma_sg)):
        jd = jump.conj().T
        lv += rate * np.kron(jump, jd.T)
        anti = jd @ jump
        lv -= 0.5 * rate * (_kron_left(anti) + _kron_right(anti))

    z = build_z(coeffs)
    a_low = sigma(1, 0) + sigma(1, 2)
    lv -= 0.25 * (
        _commutator_super(a_low) @ _commutator_super(z.z_minus)
        + _commutator_super(a_low.conj().T) @ _commutator_super(z.z_plus)
    )
    return lv


def _reduce(lv: np.ndarray) -> AffineGenerator:
    # fold the rho_ss column through rho_ss = 1 - rho_gg - rho_ee
    q = lv[:8, :8].copy()
    b = lv[:8, 8].copy()
    q[:, 0] -= b
    q[:, 4] -= b
    return AffineGenerator(q=q, b=b)


def constructed_generator(p: AtomParams, coeffs: CoeffSet) -> AffineGenerator:
    """Build (Q, B) mechanically from the superoperator of the master equation."""
    return _reduce(full_superoperator(p, coeffs))


def transcribed_generator(
    p: AtomParams, coeffs: CoeffSet, apply_errata: bool = True
) -> AffineGenerator:
    """Build (Q, B) from the closed-form expression of every matrix element.

    ``apply_errata`` replaces any entry listed in ERRATA with its corrected
    form; the table is empty, so this is currently a no-op.
    """
    ga, gs, om, de = p.gamma, p.gamma_sg, p.omega, p.delta
    m, n, h = coeffs.m_coef, coeffs.n_coef, coeffs.h_coef
    mc, nc, hc = np.conj(m), np.conj(n), np.conj(h)
    reh, imh = h.real, h.imag
    io = 1j * om
    idel = 1j * de

    q = np.array(
        [
            [-gs - reh / 2, 3 * m / 4 + io, -h / 4, 3 * mc / 4 - io,
             ga - gs + reh / 2, mc / 4, -hc / 4, m / 4],
            [-mc / 2 + io, -ga + idel - 3 * hc / 4, -mc / 4 + io, nc / 2,
             -mc / 4 - io, nc / 2, mc / 4, -hc / 4],
            [-0.5j * imh, 3 * m / 4 + io, (-gs - reh) / 2, mc / 4,
             (h + 2 * hc) / 4, 3 * mc / 4 - io, 0.0, m / 4],
            [-m / 2 - io, n / 2, m / 4, -ga - idel - 3 * h / 4,
             -m / 4 + io, -h / 4, -m / 4 - io, n / 2],
            [0.0, -m - io, reh / 2, -mc + io,
             -2 * ga - 3 * reh / 2, -mc + io, reh / 2, -m - io],
            [(m + 2 * io) / 2, n / 2, -m / 4 - io, -h / 4,
             (m + 8 * io) / 4, -idel - 3 * h / 4 - (ga + gs / 2), m / 4, n / 2],
            [0.5j * imh, m / 4, 0.0, 3 * mc / 4 - io,
             (2 * h + hc) / 4, mc / 4, (-gs - reh) / 2, 3 * m / 4 + io],
            [(mc - 2 * io) / 2, -hc / 4, mc / 4, nc / 2,
             (mc - 8 * io) / 4, nc / 2, -mc / 4 + io, idel - 3 * hc / 4 - (ga + gs / 2)],
        ],
        dtype=complex,
    )
    b = np.array(
        [gs, mc / 4, -hc / 4, m / 4, reh / 2, -m / 4 - io, -h / 4, -mc / 4 + io],
        dtype=complex,
    )

    if apply_errata and ERRATA:
        corrected = constructed_generator(p, coeffs)
        for row, col, _printed, _constructed in ERRATA:
            if col < 0:
                b[row] = corrected.b[row]
            else:
                q[row, col] = corrected.q[row, col]
    return AffineGenerator(q=q, b=b)


def compare_generators(a: AffineGenerator, b: AffineGenerator) -> GeneratorDiff:
    """Elementwise maximum discrepancy between two generators."""
    dq = np.abs(a.q - b.q)
    db = np.abs(a.b - b.b)
    iq = np.unravel_index(int(dq.argmax()), dq.shape)
    ib = int(db.argmax())
    if db[ib] > dq[iq]:
        return GeneratorDiff(max_abs=float(db[ib]), worst_index=(ib, -1))
    return GeneratorDiff(max_abs=float(dq[iq]), worst_index=(int(iq[0]), int(iq[1])))


def stability_spectrum(g: AffineGenerator, tol: float = STABILITY_TOL) -> StabilityReport:
    """All 8 eigenvalues of Q, flagging any with real part >= -tol.

    A flagged eigenvalue signals a (near-)stationary direction beyond the
    steady state itself, e.g. the dark-state degeneracy at gamma_sg = 0, D = 0.
    """
    try:
        eig = np.linalg.eigvals(g.q)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise RuntimeError(f"eigen-solver failed on Q: {exc}") from exc
    order = np.argsort(-eig.real)
    eig = eig[order]
    return StabilityReport(eigenvalues=eig, flagged=eig.real >= -tol)


def write_errata_file(path: str) -> None:
    """Write the machine-readable errata table (header plus one line per entry)."""
    lines = [ERRATA_HEADER]
    for row, col, printed, constructed in ERRATA:
        lines.append(f"{row},{col},{printed},{constructed}\n")
    with open(path, "w", encoding="utf-8") as fh:
        fh.writelines(lines)
