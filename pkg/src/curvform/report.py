"""JSON and text rendering of analysis reports.

Floats are written with 17 significant digits so that reports round-trip
bit-for-bit and diff cleanly.  Non-finite floats become ``null``.
"""
from __future__ import annotations

import json
import math

import numpy as np

__all__ = ["to_jsonable", "dumps", "loads", "render_text", "fmt_float"]


def fmt_float(x: float) -> str:
    text = format(float(x), ".17g")
    # keep a float marker so "-0.0" and "3.0" reload as floats
    return text if any(c in text for c in ".enai") else text + ".0"


def to_jsonable(obj):
    """Convert numpy scalars/arrays and tuples into plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _encode(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, float):
        return fmt_float(obj) if math.isfinite(obj) else "null"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    return _encode(to_jsonable(obj), indent, 0) + "\n"


def loads(text: str):
    return json.loads(text)


def _num(x):
    if x is None:
        return "-"
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return fmt_float(x)
    return str(x)


def _vec(v):
    if v is None:
        return "-"
    return "[" + ", ".join(_num(x) for x in v) + "]"


def render_text(report: dict) -> str:
    """Human-readable projection of a JSON report (same numbers, fewer fields)."""
    lines = [f"chart: {report['chart']}",
             f"tolerances: accept={_num(report['tolerances']['accept'])} "
             f"reject={_num(report['tolerances']['reject'])} floor={_num(report['tolerances']['floor'])}"]
    for i, rec in enumerate(report["points"]):
        cf, ein = rec["curvature_form"], rec["einstein"]
        lines.append(f"point {i}: {_vec(rec['point'])}")
        label = cf["class"].split(" (residual")[0]
        lines.append(f"  class: {label} (residual {_num(cf['residual'])}, "
                     f"coefficients {_vec(cf['coefficients'])})")
        lines.append(f"  einstein: {ein['display']} relation {_vec(ein['relation'])}")
        ls = rec["local_symmetry"]
        lines.append(f"  local symmetry: |nabla R|/|R| = {_num(ls['nabla_R'])}, "
                     f"|nabla S|/|S| = {_num(ls['nabla_S'])}")
        for name, v in rec["pseudosymmetry"].items():
            lines.append(f"  {name}: {v['status']} L={_num(v['L'])} residual={_num(v['residual'])}")
        lines.append(f"  implication violations: {len(rec['equivalence']['violations'])}")
    for fail in report["failures"]:
        lines.append(f"failed point {_vec(fail['point'])}: {fail['error']}")
    agg = report["aggregate"]
    lines.append(f"modal class: {agg['modal_class']} ({agg['class_counts']})")
    lines.append(f"modal einstein level: {agg['modal_einstein']}")
    if agg["disagreements"]:
        lines.append(f"disagreeing points: {agg['disagreements']}")
    for name, spread in agg["coefficient_spreads"].items():
        lines.append(f"  {name}: min {_num(spread['min'])} max {_num(spread['max'])}")
    for note in report.get("published_relations", []):
        lines.append(f"published relation {note['name']}: consistent={_num(note['consistent'])} "
                     f"(deviation {_num(note['deviation'])})")
    return "\n".join(lines) + "\n"
