"""
Result records emitted by the command line and their text / JSON / CSV
serializations.

JSON mirrors the dataclass fields one to one.  Floats are written with 17
significant digits so that ``load_json(type(r), dumps_json(r)) == r``;
complex numbers become ``[re, im]`` pairs and non-finite floats the strings
``"inf"``, ``"-inf"`` and ``"nan"``.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import sys
import typing
from dataclasses import dataclass
from pathlib import Path
from typing import Any, TextIO

from .errors import IoFailure
from .signaling import NoSignalReport

FORMATS = ("text", "json", "csv")

Vec3 = tuple[float, float, float]


@dataclass(frozen=True)
class BoundReport:
    theta: float
    overlap: float
    pe_min: float
    p: float
    optimal_axis: Vec3


@dataclass(frozen=True)
class SteerReport:
    theta: float
    p: float
    psi: tuple[complex, complex, complex, complex]
    rho_b_bloch: Vec3
    primed_first: tuple[complex, complex]
    primed_second: tuple[complex, complex]
    orthonormality_defect: float
    eq2_residual: float
    residual_alpha_delta: float
    residual_beta_minus_delta: float
    steer_bit0_probs: tuple[float, float]
    steer_bit1_probs: tuple[float, float]


@dataclass(frozen=True)
class OracleReport:
    theta: float
    overlap: float
    pe_min: float
    grid_points: int
    povm_samples: int
    seed: int
    min_error: float
    argmin_axis: Vec3
    excess: float


@dataclass(frozen=True)
class SimulationReport:
    theta: float
    detector: str
    rounds: int
    sessions: int
    seed: int
    p0_bit0: float
    p0_bit1: float
    hoeffding_bound: float
    bob_error: float
    ties: int


@dataclass(frozen=True)
class SweepRow:
    theta: float
    overlap: float
    pe_min: float
    p: float
    detector: str
    epsilon: float
    gap: float
    z: float
    verdict: str


@dataclass(frozen=True)
class SweepReport:
    rows: tuple[SweepRow, ...]


SWEEP_COLUMNS = [f.name for f in dataclasses.fields(SweepRow)]

_TEXT_LABELS = {"pe_min": "P_E^m", "p": "p"}


# -- JSON ------------------------------------------------------------------

def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def _encode(obj: Any) -> str:
    if dataclasses.is_dataclass(obj):
        items = (f"{json.dumps(f.name)}: {_encode(getattr(obj, f.name))}" for f in dataclasses.fields(obj))
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(int(obj))
    if isinstance(obj, float):
        return _fmt_float(float(obj))
    if isinstance(obj, complex):
        return f"[{_fmt_float(obj.real)}, {_fmt_float(obj.imag)}]"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return _encode(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_json(result) -> str:
    return _encode(result) + "\n"


def _decode(tp, value):
    origin = typing.get_origin(tp)
    if dataclasses.is_dataclass(tp):
        hints = typing.get_type_hints(tp)
        return tp(**{f.name: _decode(hints[f.name], value[f.name]) for f in dataclasses.fields(tp)})
    if origin is tuple:
        args = typing.get_args(tp)
        if len(args) == 2 and args[1] is Ellipsis:
            return tuple(_decode(args[0], v) for v in value)
        return tuple(_decode(a, v) for a, v in zip(args, value, strict=True))
    if origin is list:
        (arg,) = typing.get_args(tp)
        return [_decode(arg, v) for v in value]
    if tp is float:
        return float(value)
    if tp is complex:
        re, im = value
        return complex(float(re), float(im))
    if tp in (int, str, bool):
        return tp(value)
    raise TypeError(f"unsupported field type {tp!r}")


def load_json(result_type, text: str):
    """Rebuild a report of ``result_type`` from its JSON serialization."""
    return _decode(result_type, json.loads(text))


# -- CSV -------------------------------------------------------------------

def _flatten(name: str, value) -> list[tuple[str, Any]]:
    if isinstance(value, complex):
        return [(f"{name}_re", value.real), (f"{name}_im", value.imag)]
    if isinstance(value, (tuple, list)):
        out = []
        for i, v in enumerate(value):
            out.extend(_flatten(f"{name}_{i}", v))
        return out
    return [(name, value)]


def _csv_cell(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return _fmt_float(v).strip('"')
    return str(v)


def dumps_csv(result) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if isinstance(result, SweepReport):
        writer.writerow(SWEEP_COLUMNS)
        for row in result.rows:
            writer.writerow([_csv_cell(getattr(row, c)) for c in SWEEP_COLUMNS])
        return buf.getvalue()
    pairs = []
    for f in dataclasses.fields(result):
        pairs.extend(_flatten(f.name, getattr(result, f.name)))
    writer.writerow([k for k, _ in pairs])
    writer.writerow([_csv_cell(v) for _, v in pairs])
    return buf.getvalue()


# -- text ------------------------------------------------------------------

def _text_value(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return format(v, ".6g")
    if isinstance(v, complex):
        return format(v.real, ".6g") if v.imag == 0 else f"{v.real:.6g}{v.imag:+.6g}j"
    if isinstance(v, (tuple, list)):
        return "(" + ", ".join(_text_value(x) for x in v) + ")"
    return str(v)


def dumps_text(result) -> str:
    if isinstance(result, SweepReport):
        lines = ["  ".join(f"{c:>10}" for c in SWEEP_COLUMNS)]
        for row in result.rows:
            lines.append("  ".join(f"{_text_value(getattr(row, c)):>10}" for c in SWEEP_COLUMNS))
        return "\n".join(lines) + "\n"
    lines = [f"[{type(result).__name__}]"]
    for f in dataclasses.fields(result):
        label = _TEXT_LABELS.get(f.name, f.name)
        lines.append(f"{label} = {_text_value(getattr(result, f.name))}")
    return "\n".join(lines) + "\n"


_DUMPERS = {"text": dumps_text, "json": dumps_json, "csv": dumps_csv}


def render(result, fmt: str) -> str:
    try:
        return _DUMPERS[fmt](result)
    except KeyError:
        raise ValueError(f"unknown output format {fmt!r}; choose from {FORMATS}") from None


def write_report(result, fmt: str = "text", path: str | Path | None = None, stream: TextIO | None = None) -> None:
    """Render ``result`` and write it to ``path`` (or ``stream``, default stdout)."""
    text = render(result, fmt)
    if path is None:
        (stream or sys.stdout).write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(f"cannot write report to {path}: {exc.strerror or exc}") from exc


REPORT_TYPES = {
    cls.__name__: cls
    for cls in (BoundReport, SteerReport, OracleReport, SimulationReport, SweepReport, NoSignalReport)
}
