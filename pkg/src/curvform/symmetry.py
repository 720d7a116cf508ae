"""Semisymmetry, pseudosymmetry and local-symmetry checks at a point."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import tensor_algebra as ta
from .classify import DEFAULT_TOLS, Tolerances, classify_curvature_form
from .curvature import CurvaturePackage

__all__ = [
    "PseudosymmetryVerdict", "semisymmetry_residual", "pseudosymmetry_fit",
    "deszcz_pseudosymmetry", "ricci_pseudosymmetry", "weyl_pseudosymmetry",
    "ricci_generalized_pseudosymmetry", "local_symmetry_residuals", "equivalence_matrix",
    "chaki_residual",
]

EPS = 1e-300


@dataclass(frozen=True)
class PseudosymmetryVerdict:
    L: Optional[float]
    residual: Optional[float]
    status: str  # holds | fails | indeterminate
    rhs_norm: float


def _status(residual, tols):
    if residual < tols.accept:
        return "holds"
    if residual > tols.reject:
        return "fails"
    return "indeterminate"


def semisymmetry_residual(D, T, g) -> float:
    """``|D.T|`` relative to ``|D| |T| |g^-1|``."""
    out = ta.curvature_action(D, g, T)
    scale = ta.norm(D) * ta.norm(T) * ta.norm(ta.metric_inverse(g))
    return ta.norm(out) / max(scale, EPS)


def pseudosymmetry_fit(lhs, rhs, scale: Optional[float] = None,
                       tols: Tolerances = DEFAULT_TOLS) -> PseudosymmetryVerdict:
    """Best ``L`` with ``lhs = L rhs``.

    The verdict is indeterminate when ``|rhs| < tols.floor * scale``: the
    point then lies outside the set where the condition is defined.  ``scale``
    defaults to ``max(|lhs|, |rhs|)`` which is only meaningful when the caller
    knows neither side is roundoff.
    """
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if lhs.shape != rhs.shape:
        raise ta.TensorShapeError(f"shape mismatch {lhs.shape} vs {rhs.shape}")
    ln, rn = ta.norm(lhs), ta.norm(rhs)
    if scale is None:
        scale = max(ln, rn)
    if rn < tols.floor * scale or rn == 0.0:
        return PseudosymmetryVerdict(None, None, "indeterminate", rn)
    L = float(np.vdot(lhs, rhs) / rn**2)
    residual = ta.norm(lhs - L * rhs) / max(ln, rn, EPS)
    return PseudosymmetryVerdict(L, residual, _status(residual, tols), rn)


def _size(pkg, X):
    # tensors that vanish up to roundoff (C of a conformally flat point) are
    # measured against R so their noise is not mistaken for structure
    return max(ta.norm(X), ta.norm(pkg.R))


def _pseudo(pkg, D, T, A, tols):
    lhs = ta.curvature_action(D, pkg.g, T)
    rhs = ta.q_product(A, T, pkg.g)
    scale = ta.norm(A) * _size(pkg, T)
    return pseudosymmetry_fit(lhs, rhs, scale, tols)


def deszcz_pseudosymmetry(pkg: CurvaturePackage, tols: Tolerances = DEFAULT_TOLS):
    """``R.R = L Q(g, R)``."""
    return _pseudo(pkg, pkg.R, pkg.R, pkg.g, tols)


def ricci_pseudosymmetry(pkg: CurvaturePackage, tols: Tolerances = DEFAULT_TOLS):
    """``R.S = L Q(g, S)``."""
    return _pseudo(pkg, pkg.R, pkg.S, pkg.g, tols)


def weyl_pseudosymmetry(pkg: CurvaturePackage, tols: Tolerances = DEFAULT_TOLS):
    """``C.C = L Q(g, C)``."""
    return _pseudo(pkg, pkg.C, pkg.C, pkg.g, tols)


def ricci_generalized_pseudosymmetry(pkg: CurvaturePackage, tols: Tolerances = DEFAULT_TOLS):
    """``R.R = L Q(S, R)``."""
    return _pseudo(pkg, pkg.R, pkg.R, pkg.S, tols)


def chaki_residual(pkg: CurvaturePackage, mu, X, T) -> float:
    """Raw size of ``mu_X . T`` relative to ``|mu| |X| |T|``; no structure verdict."""
    out = ta.mu_action(mu, X, T)
    return ta.norm(out) / max(ta.norm(mu) * ta.norm(X) * ta.norm(T), EPS)


def local_symmetry_residuals(pkg: CurvaturePackage) -> tuple[float, float]:
    """``(|nabla R| / |R|, |nabla S| / |S|)``, each 0 when the numerator is exactly 0."""
    if pkg.nabla_R is None or pkg.nabla_S is None:
        raise ValueError("package carries no covariant derivatives")

    def ratio(num, den):
        num = ta.norm(num)
        return 0.0 if num == 0.0 else num / max(ta.norm(den), EPS)

    return ratio(pkg.nabla_R, pkg.R), ratio(pkg.nabla_S, pkg.S)


_TENSORS = {"R": "R", "S": "S", "C": "C", "W": "W", "K": "K"}


def equivalence_matrix(pkg: CurvaturePackage, tols: Tolerances = DEFAULT_TOLS, is_grt=None) -> dict:
    """Semisymmetry and pseudosymmetry rows for D in {R, C, W, K}, T in {R, S, C},
    and the implications ``D.S = 0 => D.R = 0, D.C = 0`` and
    ``D.S = L Q(g,S) => D.R = L Q(g,R), D.C = L Q(g,C)`` that must hold at
    generalized Roter type points.

    An implication is *violated* when the package is GRT, the premise holds,
    and the conclusion residual exceeds ``10 * tols.accept``.
    """
    if is_grt is None:
        form = classify_curvature_form(pkg, tols)
        is_grt = form.label in ("flat", "constant_curvature", "conformally_flat", "roter",
                                "generalized_roter")
    g = pkg.g
    ginv_norm = ta.norm(pkg.g_inv)
    rows = []
    implications = []
    for dname in ("R", "C", "W", "K"):
        D = getattr(pkg, dname)
        actions = {}
        for tname in ("R", "S", "C"):
            T = getattr(pkg, tname)
            dt = ta.curvature_action(D, g, T)
            q = ta.q_product(g, T, g)
            semi = ta.norm(dt) / max(_size(pkg, D) * _size(pkg, T) * ginv_norm, EPS)
            pseudo = pseudosymmetry_fit(dt, q, ta.norm(g) * _size(pkg, T), tols)
            actions[tname] = (dt, q, semi, pseudo)
            rows.append({"D": dname, "T": tname, "semisymmetry_residual": semi,
                         "semisymmetry": _status(semi, tols), "pseudo_L": pseudo.L,
                         "pseudo_residual": pseudo.residual, "pseudosymmetry": pseudo.status})
        semi_S = actions["S"][2]
        pseudo_S = actions["S"][3]
        for tname in ("R", "C"):
            dt, q, semi, _ = actions[tname]
            premise = _status(semi_S, tols) == "holds"
            implications.append({
                "premise": f"{dname}.S = 0", "conclusion": f"{dname}.{tname} = 0",
                "premise_holds": premise, "conclusion_residual": semi,
                "violated": bool(is_grt and premise and semi > 10 * tols.accept),
            })
            premise = pseudo_S.status == "holds"
            if premise:
                target = pseudo_S.L * q
                scale = max(ta.norm(dt), ta.norm(target), tols.floor * ta.norm(g) * _size(pkg, getattr(pkg, tname)))
                resid = ta.norm(dt - target) / max(scale, EPS)
            else:
                resid = None
            implications.append({
                "premise": f"{dname}.S = L Q(g,S)", "conclusion": f"{dname}.{tname} = L Q(g,{tname})",
                "premise_holds": premise, "L": pseudo_S.L, "conclusion_residual": resid,
                "violated": bool(is_grt and premise and resid > 10 * tols.accept),
            })
    return {"is_grt": bool(is_grt), "rows": rows, "implications": implications,
            "violations": [i for i in implications if i["violated"]]}
