"""LP text export (objective, constraints, bounds, binaries)."""

from __future__ import annotations

import math
from pathlib import Path

from ..model import BINARY, MilpModel

_WRAP = 8


def _num(v: float) -> str:
    return format(float(v) + 0.0, ".17g")  # + 0.0 maps -0.0 to 0.0


def _terms(model: MilpModel, coeffs: dict[int, float]) -> str:
    parts = []
    for j in sorted(coeffs):
        a = coeffs[j]
        sign = "-" if a < 0 else "+"
        parts.append(f"{sign} {_num(abs(a))} {model.variables[j].name}")
    if not parts:
        return "0 " + model.variables[0].name if model.variables else "0"
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else text


def format_lp(model: MilpModel) -> str:
    lines = [f"\\ {model.name}", "Minimize"]
    obj = _terms(model, {j: a for j, a in model.objective.items() if a != 0.0})
    if model.obj_constant:
        obj += f" + {_num(model.obj_constant)}" if model.obj_constant > 0 else f" - {_num(-model.obj_constant)}"
    lines.append(f" obj: {obj}")
    lines.append("Subject To")
    for row, sense, rhs, tag in zip(model.rows, model.senses, model.rhs, model.tags):
        lines.append(f" {tag}: {_terms(model, row)} {sense} {_num(rhs)}")
    lines.append("Bounds")
    for v in model.variables:
        if v.kind == BINARY and v.lower == 0 and v.upper == 1:
            continue
        lo = "-inf" if v.lower == -math.inf else _num(v.lower)
        up = "+inf" if v.upper == math.inf else _num(v.upper)
        if v.lower == -math.inf and v.upper == math.inf:
            lines.append(f" {v.name} free")
        else:
            lines.append(f" {lo} <= {v.name} <= {up}")
    lines.append("Binaries")
    names = [v.name for v in model.variables if v.kind == BINARY]
    for i in range(0, len(names), _WRAP):
        lines.append(" " + " ".join(names[i:i + _WRAP]))
    lines.append("End")
    return "\n".join(lines) + "\n"


def export_lp(model: MilpModel, path) -> Path:
    """Write ``model`` in LP text format; the output is byte-deterministic."""
    path = Path(path)
    path.write_text(format_lp(model), encoding="ascii")
    return path
