"""File formats: pattern CSV, fit-result JSON, atomic writes."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .coincidence import Pattern
from .errors import InvalidInput
from .fitting import FitModel, FitResult

CSV_HEADERS = {"position": ("x_mm", "counts"), "waveplate_angle": ("theta_deg", "counts")}

FIT_RESULT_SCHEMA = {
    "type": "object",
    "required": ["model", "params", "stderr", "residual_norm", "iterations", "converged"],
    "additionalProperties": False,
    "properties": {
        "model": {"enum": ["gaussian", "double_slit", "fringe"]},
        "params": {"type": "object", "additionalProperties": {"type": "number"}},
        "stderr": {"type": "object", "additionalProperties": {"type": "number"}},
        "residual_norm": {"type": "number", "minimum": 0},
        "iterations": {"type": "integer", "minimum": 0},
        "converged": {"type": "boolean"},
    },
}

SUMMARY_SCHEMA = {
    "type": "object",
    "required": ["figure", "alpha", "beta", "gamma", "noise", "seed", "fit_converged", "reported"],
    "properties": {
        "figure": {"enum": ["fig2", "fig3", "fig4", "fig5", "fig6"]},
        "alpha": {"type": "number"},
        "beta": {"type": "number"},
        "gamma": {"type": ["number", "null"], "minimum": 0, "maximum": 1},
        "noise": {"type": "boolean"},
        "seed": {"type": "integer"},
        "fit_converged": {"type": "boolean"},
        "reported": {"type": "object", "additionalProperties": {"type": "number"}},
        "peak_mm": {"type": "number"},
        "visibility": {"type": "number", "minimum": 0, "maximum": 1},
        "gamma_source": {"type": "string"},
    },
}


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def pattern_to_csv(pattern: Pattern) -> str:
    header = CSV_HEADERS[pattern.abscissa_kind]
    xs = pattern.abscissa if pattern.abscissa_kind == "position" else np.degrees(pattern.abscissa)
    lines = [",".join(header)]
    lines += [f"{_fmt(x)},{_fmt(c)}" for x, c in zip(xs, pattern.counts)]
    return "\n".join(lines) + "\n"


def pattern_from_csv(text: str, source: str = "<csv>") -> Pattern:
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if not rows:
        raise InvalidInput(f"{source}:1: empty CSV")
    header = tuple(cell.strip() for cell in rows[0])
    kinds = {v: k for k, v in CSV_HEADERS.items()}
    if header not in kinds:
        raise InvalidInput(f"{source}:1: header must be 'x_mm,counts' or 'theta_deg,counts', got {','.join(header)!r}")
    kind = kinds[header]
    xs, ys = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise InvalidInput(f"{source}:{lineno}: expected 2 columns, got {len(row)}")
        try:
            x, y = float(row[0]), float(row[1])
        except ValueError:
            raise InvalidInput(f"{source}:{lineno}: non-numeric value in {row!r}") from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise InvalidInput(f"{source}:{lineno}: non-finite value in {row!r}")
        xs.append(x)
        ys.append(y)
    xs = np.array(xs)
    if kind == "waveplate_angle":
        xs = np.radians(xs)
    try:
        return Pattern(xs, np.array(ys), kind)
    except InvalidInput as exc:
        raise InvalidInput(f"{source}: {exc}") from None


def read_pattern(path) -> Pattern:
    path = Path(path)
    return pattern_from_csv(path.read_text(), str(path))


def fit_result_to_dict(result: FitResult, model: FitModel) -> dict:
    return {
        "model": model.kind,
        "params": model.as_dict(result.params),
        "stderr": model.as_dict(result.param_stderr),
        "residual_norm": float(result.residual_norm),
        "iterations": int(result.iterations),
        "converged": bool(result.converged),
    }


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def atomic_write(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file in the same directory and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_pattern(path, pattern: Pattern) -> None:
    atomic_write(path, pattern_to_csv(pattern))


def write_json(path, obj) -> None:
    atomic_write(path, dumps(obj))
