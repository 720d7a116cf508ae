"""Metric charts: component expressions over a coordinate patch.

Chart files are plain ``key = value`` text::

    # comment
    dim = 3
    coordinates = x1, x2, x3
    g[1][1] = 1
    g[2][2] = exp(x1)
    param.c = 0.5
    domain = x3 > 0, x2 < 1

Indices are 1-based, absent components are zero, and a component given only
above or below the diagonal is mirrored.
"""
from __future__ import annotations

import operator
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .expr import Const, Node, ParseError, evaluate, evaluate_jet, format_expression, parse_expression

__all__ = ["MetricChart", "DomainError", "ChartFormatError", "Constraint", "load_chart", "parse_chart",
           "dump_chart", "metric_jets"]


class DomainError(ValueError):
    """A point lies outside the chart's admissible domain."""


class ChartFormatError(ValueError):
    pass


_RELATIONS = {">": operator.gt, "<": operator.lt, ">=": operator.ge, "<=": operator.le}


@dataclass(frozen=True)
class Constraint:
    lhs: Node
    rel: str
    rhs: Node

    def holds(self, env) -> bool:
        return _RELATIONS[self.rel](evaluate(self.lhs, env), evaluate(self.rhs, env))

    def __str__(self):
        return f"{format_expression(self.lhs)} {self.rel} {format_expression(self.rhs)}"


@dataclass(frozen=True)
class MetricChart:
    dim: int
    coordinates: tuple
    components: Mapping  # (i, j) with i <= j, 0-based -> Node
    parameters: Mapping = field(default_factory=dict)
    domain: tuple = ()
    name: str = "custom"

    def __post_init__(self):
        if self.dim < 1 or len(self.coordinates) != self.dim:
            raise ValueError("coordinate list must have length dim")
        comps = {}
        for (i, j), node in self.components.items():
            key = (min(i, j), max(i, j))
            if not (0 <= key[0] and key[1] < self.dim):
                raise ValueError(f"component index {(i, j)} out of range")
            if key in comps and comps[key] != node:
                raise ValueError(f"asymmetric component g[{i + 1}][{j + 1}]")
            comps[key] = node
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "coordinates", tuple(self.coordinates))
        object.__setattr__(self, "parameters", dict(self.parameters))
        object.__setattr__(self, "domain", tuple(self.domain))

    @classmethod
    def from_strings(cls, coordinates: Sequence[str], components: Mapping, parameters=None,
                     domain: Sequence[str] = (), name="custom") -> "MetricChart":
        """Build from expression text; ``components`` keys are 0-based index pairs."""
        params = dict(parameters or {})
        parsed = {k: parse_expression(v, coordinates, params) if isinstance(v, str) else v
                  for k, v in components.items()}
        cons = tuple(parse_constraint(d, coordinates, params) for d in domain)
        return cls(len(coordinates), tuple(coordinates), parsed, params, cons, name)

    def env(self, point) -> dict:
        env = dict(self.parameters)
        env.update(zip(self.coordinates, map(float, point)))
        return env

    def check_point(self, point):
        if len(point) != self.dim:
            raise DomainError(f"point has {len(point)} coordinates, chart has {self.dim}")
        if not all(np.isfinite(point)):
            raise DomainError("point has non-finite coordinates")
        env = self.env(point)
        for c in self.domain:
            if not c.holds(env):
                raise DomainError(f"point {[float(x) for x in point]} violates {c}")

    def metric(self, point) -> np.ndarray:
        env = self.env(point)
        g = np.zeros((self.dim, self.dim))
        for (i, j), node in self.components.items():
            g[i, j] = g[j, i] = evaluate(node, env)
        return g


def metric_jets(chart: MetricChart, point):
    """Metric components and their partial derivatives through order 3.

    Returns ``(g, dg, d2g, d3g)`` with derivative indices appended last,
    e.g. ``dg[a, b, c] = d_c g_ab``.
    """
    n = chart.dim
    g = np.zeros((n, n))
    dg = np.zeros((n, n, n))
    d2g = np.zeros((n, n, n, n))
    d3g = np.zeros((n,) * 5)
    for (i, j), node in chart.components.items():
        if isinstance(node, Const):
            g[i, j] = g[j, i] = node.value
            continue
        jet = evaluate_jet(node, point, chart.coordinates, chart.parameters)
        for a, b in {(i, j), (j, i)}:
            g[a, b] = jet.val
            dg[a, b] = jet.grad
            d2g[a, b] = jet.hess
            d3g[a, b] = jet.third
    return g, dg, d2g, d3g


_CONSTRAINT = re.compile(r"(>=|<=|>|<)")


def parse_constraint(text: str, coordinates, parameters=()) -> Constraint:
    parts = _CONSTRAINT.split(text)
    if len(parts) != 3:
        raise ChartFormatError(f"domain constraint must be 'expr OP expr': {text!r}")
    lhs, rel, rhs = parts
    return Constraint(parse_expression(lhs, coordinates, parameters), rel,
                      parse_expression(rhs, coordinates, parameters))


def _split_top_level(text: str):
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [s.strip() for s in out if s.strip()]


_COMPONENT_KEY = re.compile(r"g\[(\d+)\]\[(\d+)\]\Z")


def parse_chart(text: str, name="custom") -> MetricChart:
    fields, comps, params = {}, {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ChartFormatError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        m = _COMPONENT_KEY.match(key)
        if m:
            idx = (int(m.group(1)) - 1, int(m.group(2)) - 1)
            if idx in comps:
                raise ChartFormatError(f"line {lineno}: duplicate component {key}")
            comps[idx] = (value, lineno)
        elif key.startswith("param."):
            try:
                params[key[6:]] = float(value)
            except ValueError:
                raise ChartFormatError(f"line {lineno}: parameter value must be a real number") from None
        elif key in ("dim", "coordinates", "domain"):
            fields[key] = value
        else:
            raise ChartFormatError(f"line {lineno}: unknown key {key!r}")
    if "dim" not in fields:
        raise ChartFormatError("missing 'dim'")
    dim = int(fields["dim"])
    coords = ([c.strip() for c in fields["coordinates"].split(",")] if "coordinates" in fields
              else [f"x{i + 1}" for i in range(dim)])
    if len(coords) != dim:
        raise ChartFormatError(f"{len(coords)} coordinates listed for dim = {dim}")
    parsed = {}
    for (i, j), (src, lineno) in comps.items():
        if not (0 <= i < dim and 0 <= j < dim):
            raise ChartFormatError(f"line {lineno}: index out of range for dim {dim}")
        try:
            node = parse_expression(src, coords, params)
        except ParseError as exc:
            raise ChartFormatError(f"line {lineno}: {exc}") from exc
        key = (min(i, j), max(i, j))
        if key in parsed and parsed[key] != node:
            raise ChartFormatError(f"line {lineno}: g[{i + 1}][{j + 1}] differs from its transpose")
        parsed[key] = node
    domain = [parse_constraint(d, coords, params) for d in _split_top_level(fields.get("domain", ""))]
    return MetricChart(dim, tuple(coords), parsed, params, tuple(domain), name)


def load_chart(path) -> MetricChart:
    path = Path(path)
    return parse_chart(path.read_text(), name=path.stem)


def dump_chart(chart: MetricChart) -> str:
    lines = [f"dim = {chart.dim}", f"coordinates = {', '.join(chart.coordinates)}"]
    for name, value in chart.parameters.items():
        lines.append(f"param.{name} = {value!r}")
    for (i, j), node in sorted(chart.components.items()):
        lines.append(f"g[{i + 1}][{j + 1}] = {format_expression(node)}")
    if chart.domain:
        lines.append("domain = " + ", ".join(str(c) for c in chart.domain))
    return "\n".join(lines) + "\n"
