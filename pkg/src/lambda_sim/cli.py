"""Command-line front end: parameter parsing, sweeps, spectra, self checks.

Exit codes: 0 success, 2 configuration error, 3 numerical failure
(singularity/instability), 4 oracle-tolerance failure.  Partial sweep failures
exit 0 with a warning count.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .dressed import closed_form_populations, gammas
from .generator import (
    compare_generators,
    constructed_generator,
    stability_spectrum,
    transcribed_generator,
    write_errata_file,
)
from .noise import compute_coeffs
from .params import (
    DEFAULT_GAMMA,
    DEFAULT_GAMMA_SG,
    DEFAULT_KAPPA,
    DEFAULT_MU_SQ,
    AtomParams,
    NoiseParams,
    generalized_rabi,
)
from .output import write_csv, write_json_data, write_sidecar
from .presets import PresetMember, get_preset
from .spectrum import spectrum_sweep
from .steady import SingularGeneratorError, evolve, sweep
from .states import ground_state_vec
from .trajectories import ensemble_average

TASKS = ("populations", "dressed", "spectrum", "oracle", "check-generators", "check-stability")

_NUMERIC_FIELDS = {
    "omega": float, "delta": float, "gamma": float, "gamma_sg": float,
    "dd": float, "kappa": float, "eta": float, "mu_sq": float,
    "t_end": float, "dt": float,
    "n_traj": int, "seed": int, "threads": int,
}
_STRING_FIELDS = ("task", "sweep", "grid", "out", "format", "preset")
_CONFIG_KEYS = set(_NUMERIC_FIELDS) | set(_STRING_FIELDS)

GENERATOR_DIFF_TOL = 1e-9
ORACLE_Z_MAX = 3.0


class ConfigError(Exception):
    """Invalid flags, config file entries or combinations."""


class OracleToleranceError(RuntimeError):
    """Ensemble disagrees with the effective equation beyond 3 standard errors."""


@dataclass
class RunConfig:
    task: str
    atom: AtomParams | None
    noise: NoiseParams | None
    sweep_spec: tuple[str, float, float, int] | None
    grid_spec: tuple[float, float, int] | None
    out: Path
    out_given: bool
    fmt: str
    seed: int
    threads: int
    n_traj: int
    t_end: float | None
    dt: float
    preset: str | None


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lambda-sim",
        description="Steady states, dressed populations and incoherent fluorescence "
        "spectra of a driven three-level lambda atom under stochastic-field noise.",
    )
    ap.add_argument("task", choices=TASKS, help="what to compute")
    ap.add_argument("--config", help="config file (key = value lines, or JSON)")
    ap.add_argument("--omega", type=float, help="Rabi frequency (MHz); required")
    ap.add_argument("--delta", type=float, help="single-photon detuning (MHz); required")
    ap.add_argument("--gamma", type=float, help=f"decay rate per channel (default {DEFAULT_GAMMA})")
    ap.add_argument("--gamma-sg", dest="gamma_sg", type=float,
                    help=f"ground-state decoherence rate (default {DEFAULT_GAMMA_SG})")
    ap.add_argument("--dd", type=float, help="stochastic strength D (default 0)")
    ap.add_argument("--kappa", type=float, help=f"noise bandwidth (default {DEFAULT_KAPPA})")
    ap.add_argument("--eta", type=float, help="noise central-frequency offset (default 0)")
    ap.add_argument("--mu-sq", dest="mu_sq", type=float,
                    help=f"squared dipole magnitude (default {DEFAULT_MU_SQ})")
    ap.add_argument("--sweep", help="VAR:MIN:MAX:N, VAR in {eta,dd,delta,omega}")
    ap.add_argument("--grid", help="MIN:MAX:N frequency grid for spectra")
    ap.add_argument("--n-traj", dest="n_traj", type=int, help="oracle trajectories (default 2000)")
    ap.add_argument("--t-end", dest="t_end", type=float, help="oracle horizon in us (default 30/gamma)")
    ap.add_argument("--dt", type=float, help="oracle integrator step in us (default 5e-4)")
    ap.add_argument("--seed", type=int, help="oracle base seed (default 0)")
    ap.add_argument("--threads", type=int,
                    help="worker threads (default $LAMBDA_SIM_THREADS or 1)")
    ap.add_argument("--out", help="output path (default <task>.csv)")
    ap.add_argument("--format", dest="fmt", choices=("csv", "json"), help="output format")
    ap.add_argument("--preset", help="canned figure-data family; overrides atom/noise params")
    return ap


def _read_config_file(path: str) -> dict[str, Any]:
    text = Path(path).read_text(encoding="utf-8")
    if path.endswith(".json") or text.lstrip().startswith("{"):
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ConfigError(f"config file {path} must hold a JSON object")
    else:
        data = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            data[key] = value
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return data


def _coerce(key: str, value: Any):
    caster = _NUMERIC_FIELDS.get(key)
    if caster is None:
        return str(value)
    try:
        return caster(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be a number, got {value!r}") from None


def _parse_sweep(spec: str) -> tuple[str, float, float, int]:
    parts = spec.split(":")
    if len(parts) != 4:
        raise ConfigError("sweep must be VAR:MIN:MAX:N")
    var, lo, hi, n = parts[0], _coerce("eta", parts[1]), _coerce("eta", parts[2]), parts[3]
    if var not in ("eta", "dd", "delta", "omega"):
        raise ConfigError(f"sweep variable must be eta/dd/delta/omega, got {var!r}")
    try:
        n = int(n)
    except ValueError:
        raise ConfigError(f"sweep point count must be an integer, got {n!r}") from None
    if n < 2:
        raise ConfigError("sweep needs n_points >= 2")
    return var, float(lo), float(hi), n


def _parse_grid(spec: str) -> tuple[float, float, int]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise ConfigError("grid must be MIN:MAX:N")
    lo, hi = _coerce("eta", parts[0]), _coerce("eta", parts[1])
    try:
        n = int(parts[2])
    except ValueError:
        raise ConfigError(f"grid point count must be an integer, got {parts[2]!r}") from None
    if n < 2 or hi <= lo:
        raise ConfigError("grid needs MAX > MIN and n_points >= 2")
    return float(lo), float(hi), n


def parse_config(argv: list[str]) -> RunConfig:
    """Merge CLI flags over config-file values over defaults into a RunConfig."""
    ns = _build_parser().parse_args(argv)
    file_vals = _read_config_file(ns.config) if ns.config else {}

    def pick(key: str, default=None):
        cli_val = getattr(ns, key, None)
        if cli_val is not None:
            return cli_val
        if key in file_vals:
            return _coerce(key, file_vals[key])
        return default

    task = ns.task
    preset = pick("preset")
    threads = pick("threads")
    if threads is None:
        env = os.environ.get("LAMBDA_SIM_THREADS")
        threads = _coerce("threads", env) if env else 1
    if threads < 1:
        raise ConfigError("threads must be >= 1")

    atom = noise = None
    if preset is None:
        omega, delta = pick("omega"), pick("delta")
        missing = [n for n, v in (("omega", omega), ("delta", delta)) if v is None]
        if missing and task in ("populations", "dressed", "spectrum", "oracle",
                                "check-generators", "check-stability"):
            raise ConfigError(f"missing required parameter(s): {', '.join(missing)}")
        try:
            atom = AtomParams(
                omega=omega, delta=delta,
                gamma=pick("gamma", DEFAULT_GAMMA),
                gamma_sg=pick("gamma_sg", DEFAULT_GAMMA_SG),
                mu_sq=pick("mu_sq", DEFAULT_MU_SQ),
            )
            noise = NoiseParams(
                dd=pick("dd", 0.0), eta=pick("eta", 0.0), kappa=pick("kappa", DEFAULT_KAPPA),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    sweep_spec = _parse_sweep(pick("sweep")) if pick("sweep") else None
    grid_spec = _parse_grid(pick("grid")) if pick("grid") else None
    fmt = pick("format", "csv")
    out_given = pick("out") is not None
    out = Path(pick("out") or f"{task}.{ 'json' if fmt == 'json' else 'csv' }")
    seed = pick("seed", 0)
    n_traj = pick("n_traj", 2000)
    if n_traj < 1:
        raise ConfigError("n_traj must be >= 1")
    dt = pick("dt", 5e-4)
    if dt <= 0:
        raise ConfigError("dt must be > 0")
    t_end = pick("t_end")
    if t_end is not None and t_end <= 0:
        raise ConfigError("t_end must be > 0")
    return RunConfig(
        task=task, atom=atom, noise=noise, sweep_spec=sweep_spec, grid_spec=grid_spec,
        out=out, out_given=out_given, fmt=fmt, seed=seed, threads=threads, n_traj=n_traj,
        t_end=t_end, dt=dt, preset=preset,
    )


def _base_payload(cfg: RunConfig, atom: AtomParams, noise: NoiseParams) -> dict[str, Any]:
    return {
        "version": __version__,
        "task": cfg.task,
        "atom": vars(atom).copy(),
        "noise": vars(noise).copy(),
    }


def _emit(cfg: RunConfig, out: Path, header: list[str], columns: list, payload: dict) -> None:
    if cfg.fmt == "json":
        payload = dict(payload)
        payload["columns"] = {h: [float(x) for x in col] for h, col in zip(header, columns)}
        write_json_data(out, payload)
    else:
        write_csv(out, header, columns)
        write_sidecar(out, payload)


def _default_eta_sweep(atom: AtomParams) -> tuple[str, float, float, int]:
    rr = generalized_rabi(atom)
    return ("eta", -2.0 * rr, 2.0 * rr, 801)


def _member_out(base: Path, label: str) -> Path:
    return base.with_name(f"{base.stem}_{label}{base.suffix}")


def _run_populations(cfg: RunConfig, atom: AtomParams, noise: NoiseParams, out: Path) -> int:
    var, lo, hi, n = cfg.sweep_spec or _default_eta_sweep(atom)
    grid = np.linspace(lo, hi, n)
    res = sweep(atom, noise, var, grid, threads=cfg.threads)
    header = ["axis", "rho_gg", "rho_ee", "rho_ss", "rho_00", "rho_pp", "rho_mm", "residual"]
    columns = [res.axis] + [res.series[k] for k in header[1:]]
    payload = _base_payload(cfg, atom, noise)
    payload["sweep"] = {"variable": var, "min": lo, "max": hi, "n_points": n}
    payload["failed_points"] = [{"index": i, "reason": r} for i, r in res.failed]
    _emit(cfg, out, header, columns, payload)
    ok = ~np.isnan(res.series["residual"])
    max_res = float(np.nanmax(res.series["residual"])) if ok.any() else float("nan")
    msg = f"{out}: {n} points, max residual {max_res:.3e}"
    if res.failed:
        msg += f" [warning: {len(res.failed)} failed point(s)]"
    print(msg)
    return 0


def _run_dressed(cfg: RunConfig, atom: AtomParams, noise: NoiseParams, out: Path) -> int:
    var, lo, hi, n = cfg.sweep_spec or _default_eta_sweep(atom)
    grid = np.linspace(lo, hi, n)
    res = sweep(atom, noise, var, grid, threads=cfg.threads)
    sec = np.full((n, 3), np.nan)
    for i, value in enumerate(grid):
        a, nz = atom, noise
        if var == "eta":
            nz = NoiseParams(dd=noise.dd, eta=float(value), kappa=noise.kappa)
        elif var == "dd":
            nz = NoiseParams(dd=float(value), eta=noise.eta, kappa=noise.kappa)
        elif var == "delta":
            a = AtomParams(atom.omega, float(value), atom.gamma, atom.gamma_sg, atom.mu_sq)
        else:
            a = AtomParams(float(value), atom.delta, atom.gamma, atom.gamma_sg, atom.mu_sq)
        try:
            dp = closed_form_populations(gammas(a, compute_coeffs(a, nz)), a)
            sec[i] = (dp.p00, dp.ppp, dp.pmm)
        except Exception:
            pass
    header = ["axis", "rho_00", "rho_pp", "rho_mm", "sec_00", "sec_pp", "sec_mm", "residual"]
    columns = [res.axis, res.series["rho_00"], res.series["rho_pp"], res.series["rho_mm"],
               sec[:, 0], sec[:, 1], sec[:, 2], res.series["residual"]]
    payload = _base_payload(cfg, atom, noise)
    payload["sweep"] = {"variable": var, "min": lo, "max": hi, "n_points": n}
    payload["failed_points"] = [{"index": i, "reason": r} for i, r in res.failed]
    _emit(cfg, out, header, columns, payload)
    gap = float(np.nanmax(np.abs(sec - np.column_stack(
        [res.series["rho_00"], res.series["rho_pp"], res.series["rho_mm"]]))))
    msg = f"{out}: {n} points, max |secular - numeric| {gap:.3e}"
    if res.failed:
        msg += f" [warning: {len(res.failed)} failed point(s)]"
    print(msg)
    return 0


def _run_spectrum(cfg: RunConfig, atom: AtomParams, noise: NoiseParams, out: Path) -> int:
    grid = None
    if cfg.grid_spec is not None:
        lo, hi, n = cfg.grid_spec
        grid = np.linspace(lo, hi, n)
    res = spectrum_sweep(atom, noise, grid=grid, threads=cfg.threads)
    payload = _base_payload(cfg, atom, noise)
    payload["grid"] = {
        "min": float(res.omegas[0]), "max": float(res.omegas[-1]), "n_points": int(res.omegas.size),
    }
    payload["peaks"] = [{"omega": loc, "height": h} for loc, h in res.peaks]
    _emit(cfg, out, ["omega", "s_inc"], [res.omegas, res.values], payload)
    locs = ", ".join(f"{loc:+.2f}" for loc, _ in res.peaks)
    print(f"{out}: {res.omegas.size} points, {len(res.peaks)} peak(s) at [{locs}] MHz")
    return 0


def _run_oracle(cfg: RunConfig, atom: AtomParams, noise: NoiseParams, out: Path) -> int:
    t_end = cfg.t_end if cfg.t_end is not None else 30.0 / atom.gamma
    ens = ensemble_average(
        atom, noise, n_traj=cfg.n_traj, t_end=t_end, dt=cfg.dt,
        base_seed=cfg.seed, threads=cfg.threads,
    )
    header = ["t", "mean_gg", "mean_ee", "mean_ss", "se_gg", "se_ee", "se_ss"]
    columns = [ens.t_grid, ens.mean[:, 0], ens.mean[:, 1], ens.mean[:, 2],
               ens.se[:, 0], ens.se[:, 1], ens.se[:, 2]]
    payload = _base_payload(cfg, atom, noise)
    payload.update({"seed": cfg.seed, "n_traj": cfg.n_traj, "dt": cfg.dt, "t_end": t_end})

    # effective-equation reference at t_end
    gen = constructed_generator(atom, compute_coeffs(atom, noise))
    fastest = float(np.abs(stability_spectrum(gen).eigenvalues).max())
    dt_ref = min(cfg.dt, 0.09 / fastest) if fastest > 0 else cfg.dt
    _, states = evolve(gen, ground_state_vec(), t_end, dt_ref, store_every=None)
    ref = np.array([states[-1][0].real, states[-1][4].real,
                    1.0 - states[-1][0].real - states[-1][4].real])
    diff = ens.mean[-1] - ref
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(ens.se[-1] > 0, np.abs(diff) / ens.se[-1], np.abs(diff) / 1e-9)
    payload["effective_final"] = [float(x) for x in ref]
    payload["z_scores_final"] = [float(x) for x in z]
    _emit(cfg, out, header, columns, payload)
    print(f"{out}: {cfg.n_traj} trajectories to t={t_end:g} us, "
          f"max |z| vs effective equation = {float(z.max()):.2f}")
    if float(z.max()) > ORACLE_Z_MAX:
        if noise.kappa < 10.0 * atom.gamma:
            print(f"warning: gap beyond {ORACLE_Z_MAX} SE tolerated (kappa/gamma = "
                  f"{noise.kappa / atom.gamma:.1f} violates the wide-bandwidth regime)")
        else:
            raise OracleToleranceError(
                f"ensemble deviates from the effective equation by {float(z.max()):.2f} SE"
            )
    return 0


def _run_check_generators(cfg: RunConfig, atom: AtomParams, noise: NoiseParams, out: Path) -> int:
    coeffs = compute_coeffs(atom, noise)
    diff = compare_generators(
        constructed_generator(atom, coeffs), transcribed_generator(atom, coeffs)
    )
    where = "B" if diff.worst_index[1] == -1 else f"Q{diff.worst_index}"
    print(f"max |Q_constructed - Q_transcribed| = {diff.max_abs:.3e} at {where}")
    if cfg.out_given:
        write_errata_file(str(out))
        print(f"errata written to {out}")
    if diff.max_abs > GENERATOR_DIFF_TOL:
        raise SingularGeneratorError(
            f"generator cross-check failed: max diff {diff.max_abs:.3e}"
        )
    return 0


def _run_check_stability(cfg: RunConfig, atom: AtomParams, noise: NoiseParams, out: Path) -> int:
    rep = stability_spectrum(constructed_generator(atom, compute_coeffs(atom, noise)))
    for ev, bad in zip(rep.eigenvalues, rep.flagged):
        mark = "  <-- non-negative real part" if bad else ""
        print(f"  {ev.real:+14.6e} {ev.imag:+14.6e}i{mark}")
    print(f"max Re(eigenvalue) = {float(rep.eigenvalues.real.max()):.6e}; stable: {rep.stable}")
    if not rep.stable:
        raise SingularGeneratorError("generator has a non-decaying mode")
    return 0


_RUNNERS = {
    "populations": _run_populations,
    "dressed": _run_dressed,
    "spectrum": _run_spectrum,
    "oracle": _run_oracle,
    "check-generators": _run_check_generators,
    "check-stability": _run_check_stability,
}


def run(cfg: RunConfig) -> int:
    """Dispatch a parsed configuration; returns the process exit code."""
    if cfg.preset is not None:
        preset = get_preset(cfg.preset)
        if preset.task != cfg.task:
            raise ConfigError(
                f"preset '{cfg.preset}' belongs to task '{preset.task}', not '{cfg.task}'"
            )
        base = cfg.out if cfg.out.suffix else cfg.out / f"{preset.name}.csv"
        for member in preset.members:
            _run_member(cfg, member, _member_out(base, member.label))
        print(f"preset {preset.name}: {len(preset.members)} member runs complete")
        return 0
    return _RUNNERS[cfg.task](cfg, cfg.atom, cfg.noise, cfg.out)


def _run_member(cfg: RunConfig, member: PresetMember, out: Path) -> int:
    return _RUNNERS[cfg.task](cfg, member.atom, member.noise, out)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = parse_config(argv)
        return run(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OracleToleranceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (SingularGeneratorError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
