"""Built-in charts and closed-form component tables used as regression oracles.

``met1`` is the 5-dimensional conformally-warped metric
``f [dx1^2 + dx2^2 + dx3^2 + dx4^2 + h dx5^2]`` with ``f = f(x1)`` and
``h = h(x1, x2)``; ``met2`` is the 6-dimensional product of two hyperbolic
3-blocks.  Oracle tables list nonzero components up to symmetry with
1-based index tuples.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .chart import DomainError, MetricChart
from .expr import evaluate_jet, format_expression, parse_expression, variables

__all__ = [
    "CatalogEntry", "CATALOG", "MET1_PRESETS", "get_entry",
    "build_met1", "met1_oracle", "met1_oracle_at", "build_met2", "met2_oracle",
    "build_met2_block", "build_flat", "expand_components",
]

COORDS5 = tuple(f"x{i}" for i in range(1, 6))
COORDS6 = tuple(f"x{i}" for i in range(1, 7))


class DependencyError(ValueError):
    """A metric function depends on coordinates it must not depend on."""


def build_met1(f_expr: str = "exp(x1)", h_expr: str = "exp(-x1)") -> MetricChart:
    f = parse_expression(f_expr, COORDS5) if isinstance(f_expr, str) else f_expr
    h = parse_expression(h_expr, COORDS5) if isinstance(h_expr, str) else h_expr
    if not variables(f) <= {"x1"}:
        raise DependencyError(f"f may depend on x1 only, got {sorted(variables(f))}")
    if not variables(h) <= {"x1", "x2"}:
        raise DependencyError(f"h may depend on x1, x2 only, got {sorted(variables(h))}")
    from .expr import Binary
    comps = {(i, i): f for i in range(4)}
    comps[(4, 4)] = Binary("*", f, h)
    return MetricChart(5, COORDS5, comps, name=f"met1[f={format_expression(f)}, h={format_expression(h)}]")


def met1_oracle(f, f1, f2, h, h1, h2, h11, h12, h22) -> dict:
    """Nonzero R and S components of met1 from f, f', f'' and h with its partials."""
    R = {}
    R[(1, 2, 1, 2)] = R[(1, 3, 1, 3)] = R[(1, 4, 1, 4)] = (f1**2 - f * f2) / (2 * f)
    R[(2, 3, 2, 3)] = R[(2, 4, 2, 4)] = R[(3, 4, 3, 4)] = -(f1**2) / (4 * f)
    R[(1, 5, 1, 5)] = 0.25 * (-2 * h * f2 - h1 * f1 + 2 * h * f1**2 / f + f * h1**2 / h - 2 * f * h11)
    R[(1, 5, 2, 5)] = 0.25 * f * (h1 * h2 / h - 2 * h12)
    R[(2, 5, 2, 5)] = 0.25 * f * (-f1 * (h * f1 + f * h1) / f**2 + h2**2 / h - 2 * h22)
    R[(3, 5, 3, 5)] = R[(4, 5, 4, 5)] = -f1 * (h * f1 + f * h1) / (4 * f)
    S = {}
    S[(1, 1)] = ((-f**2 * h1**2 + f * h * h1 * f1 + 2 * h * (4 * f * h * f2 + f**2 * h11 - 4 * h * f1**2))
                 / (4 * f**2 * h**2))
    S[(1, 2)] = -(h1 * h2 - 2 * h * h12) / (4 * h**2)
    S[(2, 2)] = ((h * (2 * f * h * f2 + 2 * f**2 * h22 + f * h1 * f1 + h * f1**2) - f**2 * h2**2)
                 / (4 * f**2 * h**2))
    S[(3, 3)] = S[(4, 4)] = (2 * f * h * f2 + h * f1**2 + f * h1 * f1) / (4 * f**2 * h)
    S[(5, 5)] = ((-f**2 * (h1**2 + h2**2) + 2 * f * h * (2 * h1 * f1 + f * (h11 + h22))
                  + h**2 * (2 * f * f2 + f1**2)) / (4 * f**2 * h))
    return {"R": R, "S": S}


def met1_oracle_at(f_expr, h_expr, point) -> dict:
    """Evaluate :func:`met1_oracle` with jets of ``f`` and ``h`` at ``point``."""
    f = parse_expression(f_expr, COORDS5) if isinstance(f_expr, str) else f_expr
    h = parse_expression(h_expr, COORDS5) if isinstance(h_expr, str) else h_expr
    fj = evaluate_jet(f, point, COORDS5)
    hj = evaluate_jet(h, point, COORDS5)
    return met1_oracle(fj.val, fj.grad[0], fj.hess[0, 0], hj.val, hj.grad[0], hj.grad[1],
                       hj.hess[0, 0], hj.hess[0, 1], hj.hess[1, 1])


def build_met2() -> MetricChart:
    comps = {(0, 0): "1", (1, 1): "exp(x1)", (2, 2): "exp(x1)", (3, 3): "1",
             (4, 4): "exp(x4)", (5, 5): "exp(x4)*(x5+1)^2"}
    return MetricChart.from_strings(COORDS6, comps, domain=["x5 > 0"], name="met2")


def met2_oracle(point) -> dict:
    x1, _, _, x4, x5, _ = map(float, point)
    if x5 <= 0:
        raise DomainError("met2 requires x5 > 0")
    e1, e4, w = math.exp(x1), math.exp(x4), (x5 + 1) ** 2
    R = {
        (1, 2, 1, 2): -e1 / 4, (1, 3, 1, 3): -e1 / 4, (2, 3, 2, 3): -(e1**2) / 4,
        (4, 5, 4, 5): -e4 / 4, (5, 6, 5, 6): -(e4**2) * w / 4, (4, 6, 4, 6): -e4 * w / 4,
    }
    S = {(1, 1): 0.5, (4, 4): 0.5, (2, 2): e1 / 2, (3, 3): e1 / 2, (5, 5): e4 / 2, (6, 6): e4 * w / 2}
    return {"R": R, "S": S}


def build_met2_block() -> MetricChart:
    """The first 3-dimensional factor of met2; a space of constant curvature."""
    return MetricChart.from_strings(COORDS5[:3], {(0, 0): "1", (1, 1): "exp(x1)", (2, 2): "exp(x1)"},
                                    name="met2_block")


def build_flat(dim: int = 3, scale: str = "1") -> MetricChart:
    coords = tuple(f"x{i}" for i in range(1, dim + 1))
    return MetricChart.from_strings(coords, {(i, i): scale for i in range(dim)}, name=f"flat{dim}")


def expand_components(table: dict, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Dense R and S arrays from an oracle table, filling all symmetric images."""
    R = np.zeros((n,) * 4)
    for (a, b, c, d), v in table["R"].items():
        a, b, c, d = a - 1, b - 1, c - 1, d - 1
        for (p, q, r, s), sign in (((a, b, c, d), 1), ((b, a, c, d), -1), ((a, b, d, c), -1),
                                   ((b, a, d, c), 1)):
            R[p, q, r, s] = sign * v
            R[r, s, p, q] = sign * v
    S = np.zeros((n, n))
    for (i, j), v in table["S"].items():
        S[i - 1, j - 1] = S[j - 1, i - 1] = v
    return R, S


# f, h pairs instantiating the hypotheses of the six example cases
MET1_PRESETS = {
    "i": ("exp(x1)", "exp(x1+x2)"),
    "ii": ("exp(x1)", "1+x1^2"),
    "iii": ("exp(x1)", "exp(-x1)"),
    "vi": ("1", "1"),
}


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    builder: Callable[..., MetricChart]
    oracle: Optional[Callable] = None
    box: tuple = (0.1, 0.9)
    shift: tuple = ()  # (coordinate index, offset) pairs applied to the sample box
    description: str = ""

    def sample_box(self, dim: int) -> np.ndarray:
        lo, hi = self.box
        box = np.tile([lo, hi], (dim, 1)).astype(float)
        for idx, off in self.shift:
            box[idx] += off
        return box


def _met1_builder(f="exp(x1)", h="exp(-x1)"):
    return build_met1(f, h)


CATALOG = {
    "met1": CatalogEntry("met1", _met1_builder, met1_oracle_at,
                         description="f[dx1^2+...+dx4^2 + h dx5^2], params f(x1), h(x1,x2)"),
    "met2": CatalogEntry("met2", build_met2, met2_oracle, shift=((4, 1.0),),
                         description="product of two hyperbolic 3-blocks, x5 > 0"),
    "met2_block": CatalogEntry("met2_block", build_met2_block,
                               description="dx1^2 + e^x1 (dx2^2 + dx3^2)"),
    "flat3": CatalogEntry("flat3", lambda: build_flat(3), description="identity metric, n = 3"),
    "flat5": CatalogEntry("flat5", lambda: build_flat(5), description="identity metric, n = 5"),
}


def get_entry(name: str) -> CatalogEntry:
    try:
        return CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown catalog metric {name!r}; known: {', '.join(sorted(CATALOG))}") from None
