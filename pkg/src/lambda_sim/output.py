"""CSV and JSON sidecar writers with round-trip float precision."""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any


def fmt(x: float) -> str:
    """Format a float with 17 significant digits (lossless round trip)."""
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return f"{x:.17g}"


def sidecar_path(data_path: str | Path) -> Path:
    """Path of the JSON sidecar paired with a data file."""
    p = Path(data_path)
    return p.with_suffix(".json") if p.suffix != ".json" else p.with_suffix(".params.json")


def write_csv(path: str | Path, header: list[str], columns: list) -> Path:
    """Write aligned columns as CSV; all columns must share one length."""
    lengths = {len(c) for c in columns}
    if len(columns) != len(header) or len(lengths) != 1:
        raise ValueError("columns must match header and share a common length")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*columns):
            fh.write(",".join(fmt(float(x)) for x in row) + "\n")
    return path


def write_sidecar(data_path: str | Path, payload: dict[str, Any]) -> Path:
    """Write the reproducibility sidecar next to a data file (sorted keys)."""
    path = sidecar_path(data_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def write_json_data(path: str | Path, payload: dict[str, Any]) -> Path:
    """Write a combined data+parameters JSON document."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
