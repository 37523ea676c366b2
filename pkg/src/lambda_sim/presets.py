"""Canned parameter families reproducing the bundled figure data sets.

Each preset expands to a list of labelled runs sharing one task.  Population
presets sweep eta over [-2R, 2R]; spectrum presets scan the default frequency
grid.  Values written as "R/2" etc. are resolved against the generalized Rabi
frequency of the member's atom parameters at expansion time.
"""
from __future__ import annotations

from dataclasses import dataclass

from .params import AtomParams, NoiseParams, generalized_rabi


@dataclass(frozen=True)
class PresetMember:
    label: str
    atom: AtomParams
    noise: NoiseParams


@dataclass(frozen=True)
class Preset:
    name: str
    task: str
    description: str
    members: tuple[PresetMember, ...]


def _eta_tag(frac: float) -> str:
    return {0.0: "eta0", 0.5: "eta0.5R", 1.0: "etaR", 2.0: "eta2R"}[frac]


def _pop_family(name, desc, omegas, deltas, dds, task="populations") -> Preset:
    members = []
    for om in omegas:
        for de in deltas:
            for dd in dds:
                label = f"Om{om:g}_Del{de:g}_D{dd:g}"
                members.append(
                    PresetMember(label, AtomParams(omega=om, delta=de), NoiseParams(dd=dd))
                )
    return Preset(name, task, desc, tuple(members))


def _spectrum_family(name, desc, omega, delta, dds, eta_fracs) -> Preset:
    atom = AtomParams(omega=omega, delta=delta)
    rr = generalized_rabi(atom)
    members = []
    for frac in eta_fracs:
        for dd in dds:
            label = f"{_eta_tag(frac)}_D{dd:g}" if len(eta_fracs) > 1 else f"D{dd:g}"
            members.append(PresetMember(label, atom, NoiseParams(dd=dd, eta=frac * rr)))
    return Preset(name, "spectrum", desc, tuple(members))


_D_SCAN = (0.1, 10.0, 30.0, 70.0, 100.0)

_PRESETS = (
    _pop_family(
        "fig-gsd",
        "ground/metastable populations vs eta; detuning family at near-zero and strong noise",
        omegas=(100.0,), deltas=(10.0, 20.0, 30.0, 40.0), dds=(0.1, 70.0),
    ),
    _pop_family(
        "fig-gso",
        "ground/metastable populations vs eta; Rabi-frequency family at Delta = 20",
        omegas=(50.0, 100.0, 150.0), deltas=(20.0,), dds=(0.1, 70.0),
    ),
    _pop_family(
        "fig-eed",
        "excited population vs eta; detuning family at near-zero and strong noise",
        omegas=(100.0,), deltas=(10.0, 20.0, 30.0, 40.0), dds=(0.1, 70.0),
    ),
    _pop_family(
        "fig-eeo",
        "excited population vs eta; Rabi-frequency family at Delta = 20",
        omegas=(50.0, 100.0, 150.0), deltas=(20.0,), dds=(0.1, 70.0),
    ),
    _pop_family(
        "fig-dpop",
        "all bare populations vs eta across noise strengths (Delta = 0)",
        omegas=(100.0,), deltas=(0.0,), dds=(0.1, 10.0, 30.0, 70.0),
    ),
    _pop_family(
        "fig-dressed",
        "dressed populations vs eta across noise strengths at Omega = 300",
        omegas=(300.0,), deltas=(40.0, 150.0), dds=(0.1, 20.0, 70.0),
        task="dressed",
    ),
    _spectrum_family(
        "fig-resdel0",
        "spectra for five noise strengths at Delta = 0, eta = 0, Omega = 100",
        omega=100.0, delta=0.0, dds=_D_SCAN, eta_fracs=(0.0,),
    ),
    _spectrum_family(
        "fig-resdel80",
        "spectra for five noise strengths at Delta = 80, eta = 0, Omega = 100",
        omega=100.0, delta=80.0, dds=_D_SCAN, eta_fracs=(0.0,),
    ),
    _spectrum_family(
        "fig-reseta",
        "spectra at Delta = 20 for eta in {0, R/2, R, 2R} x five noise strengths",
        omega=100.0, delta=20.0, dds=_D_SCAN, eta_fracs=(0.0, 0.5, 1.0, 2.0),
    ),
)

PRESETS: dict[str, Preset] = {p.name: p for p in _PRESETS}

# same member family grouped the other way (fixed D, varying eta)
PRESET_ALIASES = {"fig-resd": "fig-reseta"}


def get_preset(name: str) -> Preset:
    key = PRESET_ALIASES.get(name, name)
    if key not in PRESETS:
        known = ", ".join(sorted(list(PRESETS) + list(PRESET_ALIASES)))
        raise KeyError(f"unknown preset '{name}'; available: {known}")
    return PRESETS[key]
