"""Point-sampled analysis of a metric chart.

``analyze`` builds the chart, samples points, runs the curvature engine, the
classifier and the symmetry checks at each point, and assembles a plain-dict
report whose JSON form is deterministic for a fixed configuration and seed.
"""
from __future__ import annotations

import dataclasses
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import tensor_algebra as ta
from .catalog import CATALOG, DependencyError, get_entry
from .chart import ChartFormatError, DomainError, MetricChart, load_chart
from .classify import (DEFAULT_TOLS, GRT_NAMES, Tolerances, classify_curvature_form, einstein_level,
                       krylov_kernel, quasi_constant_curvature, quasi_einstein)
from .curvature import CurvaturePackage, curvature_package
from .expr import EvaluationError, ParseError
from .jets import JetDomainError
from .symmetry import (deszcz_pseudosymmetry, equivalence_matrix, local_symmetry_residuals,
                       ricci_generalized_pseudosymmetry, ricci_pseudosymmetry, weyl_pseudosymmetry)

__all__ = ["AnalysisConfig", "ConfigError", "EngineError", "build_chart", "sample_points",
           "analyze_point", "analyze", "published_relation_checks", "SCHEMA_VERSION"]

SCHEMA_VERSION = 1

# errors that mark a single point as failed rather than the whole run
POINT_ERRORS = (ta.SingularMetricError, DomainError, EvaluationError, JetDomainError,
                ZeroDivisionError, OverflowError, FloatingPointError)


class ConfigError(ValueError):
    """Invalid analysis configuration (exit code 3)."""


class EngineError(RuntimeError):
    """Engine failure at a sampled point under ``strict`` or at every point (exit code 2)."""


@dataclass(frozen=True)
class AnalysisConfig:
    metric: Optional[str] = None
    chart_file: Optional[str] = None
    params: dict = field(default_factory=dict)
    samples: int = 8
    points: tuple = ()
    box: Optional[tuple] = None  # ((lo, hi), ...) per coordinate; catalog default otherwise
    seed: int = 0
    tols: Tolerances = DEFAULT_TOLS
    strict: bool = False
    workers: int = 4

    def __post_init__(self):
        if (self.metric is None) == (self.chart_file is None):
            raise ConfigError("give exactly one of metric or chart_file")
        if self.samples < 1:
            raise ConfigError("samples must be at least 1")
        if self.box is not None and not np.all(np.isfinite(np.asarray(self.box, dtype=float))):
            raise ConfigError("box bounds must be finite")


def build_chart(config: AnalysisConfig) -> MetricChart:
    try:
        if config.chart_file is not None:
            chart = load_chart(config.chart_file)
            if config.params:
                unknown = set(config.params) - set(chart.parameters)
                if unknown:
                    raise ConfigError(f"chart has no parameter(s) {sorted(unknown)}")
                params = dict(chart.parameters)
                params.update({k: float(v) for k, v in config.params.items()})
                chart = dataclasses.replace(chart, parameters=params)
            return chart
        entry = get_entry(config.metric)
        return entry.builder(**config.params)
    except ConfigError:
        raise
    except (KeyError, TypeError, ChartFormatError, ParseError, DependencyError, OSError, ValueError) as exc:
        raise ConfigError(str(exc).strip("'\"")) from exc


def _default_box(config: AnalysisConfig, dim: int) -> np.ndarray:
    if config.box is not None:
        box = np.asarray(config.box, dtype=float)
        if box.shape != (dim, 2):
            raise ConfigError(f"box must have shape ({dim}, 2)")
        return box
    if config.metric is not None:
        return CATALOG[config.metric].sample_box(dim)
    return np.tile([0.1, 0.9], (dim, 1)).astype(float)


def sample_points(config: AnalysisConfig, chart: MetricChart) -> np.ndarray:
    """Explicit points if given, else ``samples`` uniform draws from the box."""
    if config.points:
        pts = np.asarray(config.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != chart.dim:
            raise ConfigError(f"points must have {chart.dim} coordinates")
        return pts
    box = _default_box(config, chart.dim)
    rng = np.random.default_rng(config.seed)
    return box[:, 0] + (box[:, 1] - box[:, 0]) * rng.random((config.samples, chart.dim))


def _fit_record(fit, tols):
    if fit is None:
        return None
    return {"names": list(fit.names), "coefficients": fit.coefficients, "residual": fit.relative_residual,
            "verdict": fit.verdict(tols), "status": fit.status, "rank": fit.rank,
            "kernel": fit.kernel_basis}


def _pseudo_record(v):
    return {"status": v.status, "L": v.L, "residual": v.residual, "rhs_norm": v.rhs_norm}


def analyze_point(pkg: CurvaturePackage, tols: Tolerances = DEFAULT_TOLS) -> dict:
    """Full verdict record for one curvature package."""
    form = classify_curvature_form(pkg, tols)
    ein = einstein_level(pkg, tols)
    qe = quasi_einstein(pkg, tols)
    qcc = quasi_constant_curvature(pkg, tols, qe.eta) if qe is not None and not qe.degenerate else None
    nabla_R, nabla_S = local_symmetry_residuals(pkg)
    grt = form.label in ("flat", "constant_curvature", "conformally_flat", "roter", "generalized_roter")
    eqv = equivalence_matrix(pkg, tols, is_grt=grt)
    fit = form.fit
    return {
        "point": pkg.point,
        "curvature_form": {
            "class": form.display if form.label != "not_grt"
            else f"not GRT (residual {fit.relative_residual:.3g})",
            "label": form.label,
            "proper": form.proper,
            "residual": None if fit is None else fit.relative_residual,
            "coefficients": None if fit is None else fit.coefficients,
            "names": [] if fit is None else list(fit.names),
            "kernel": None if fit is None else fit.kernel_basis,
            "weyl_ratio": form.weyl_ratio,
            "conformal_agree": form.conformal_agree,
            "fits": {k: _fit_record(v, tols) for k, v in form.fits.items()},
        },
        "einstein": {"level": ein.level, "display": ein.display, "relation": ein.relation,
                     "residuals": list(ein.residuals), "kernel": ein.kernel_basis},
        "quasi_einstein": None if qe is None else {
            "alpha": qe.alpha, "beta": qe.beta, "eta": qe.eta, "residual": qe.residual,
            "degenerate": qe.degenerate},
        "quasi_constant_curvature": None if qcc is None else {
            "alpha_prime": qcc.alpha_prime, "beta_prime": qcc.beta_prime, "residual": qcc.residual,
            "verdict": tols.verdict(qcc.residual)},
        "local_symmetry": {"nabla_R": nabla_R, "nabla_S": nabla_S,
                           "locally_symmetric": tols.verdict(nabla_R) == "member",
                           "ricci_symmetric": tols.verdict(nabla_S) == "member"},
        "pseudosymmetry": {
            "R.R = L Q(g,R)": _pseudo_record(deszcz_pseudosymmetry(pkg, tols)),
            "R.S = L Q(g,S)": _pseudo_record(ricci_pseudosymmetry(pkg, tols)),
            "C.C = L Q(g,C)": _pseudo_record(weyl_pseudosymmetry(pkg, tols)),
            "R.R = L Q(S,R)": _pseudo_record(ricci_generalized_pseudosymmetry(pkg, tols)),
        },
        "equivalence": eqv,
        "scalars": {"kappa": pkg.kappa, "kappa2": pkg.kappa2},
    }


def published_relation_checks(pkg: CurvaturePackage, tol: float = 1e-8) -> list:
    """Compare the dependency spaces of ``g, S, ..`` and of the Kulkarni-Nomizu
    wedges at a point with the relations published for the met2 example.

    Each relation is one linear equation ``w . a = 0`` on the coefficient
    vector; it matches when the computed kernel is exactly ``w``'s orthogonal
    complement.
    """
    g, S, S2 = pkg.g, pkg.S, pkg.S2
    kn = ta.kn_product
    wedges3 = [kn(g, g), kn(g, S), kn(S, S)]
    wedges6 = wedges3 + [kn(g, S2), kn(S, S2), kn(S2, S2)]
    cases = [
        ("a2 = -2(2a0 + a1)", krylov_kernel(pkg, 3), [4, 2, 1]),
        ("a6 = -2(4a3 + 2a4 + a5)", krylov_kernel(pkg, 4), [8, 4, 2, 1]),
        ("a11 = -16a7 - 8a8 - 4a9 - 2a10", krylov_kernel(pkg, 5), [16, 8, 4, 2, 1]),
        ("L2 = -4(L0 + L1)", _kernel(wedges3), [4, 4, 1]),
        ("L8 = -4(4L3 + 4L4 + L5 + 2L6 + L7)", _kernel(wedges6), [16, 16, 4, 8, 4, 1]),
    ]
    out = []
    for name, K, w in cases:
        w = np.asarray(w, dtype=float)
        dev = float(np.linalg.norm(K @ w) / np.linalg.norm(w)) if len(K) else 1.0
        ok = len(K) == len(w) - 1 and dev < tol
        out.append({"name": name, "kernel_dim": len(K), "deviation": dev, "consistent": bool(ok)})
    return out


def _kernel(family):
    M = np.column_stack([np.ravel(x) for x in family])
    _, s, Vt = np.linalg.svd(M, full_matrices=True)
    r = int(np.sum(s > 1e-10 * s[0])) if s[0] > 0 else 0
    return Vt[r:]


def _run_point(chart, point, tols):
    try:
        return analyze_point(curvature_package(chart, point), tols), None
    except POINT_ERRORS as exc:
        return None, {"point": point, "error": f"{type(exc).__name__}: {exc}"}


def _aggregate(records) -> dict:
    classes = [r["curvature_form"]["class"] for r in records]
    labels = [r["curvature_form"]["label"] for r in records]
    levels = [r["einstein"]["display"] for r in records]
    label_counts = Counter(labels)
    modal_label = max(sorted(label_counts), key=label_counts.__getitem__) if records else None
    # display text for the modal label: not-GRT residuals differ per point
    modal_class = next((c for c, l in zip(classes, labels) if l == modal_label), None)
    if modal_label == "not_grt":
        modal_class = "not GRT"
    level_counts = Counter(levels)
    modal_level = max(sorted(level_counts), key=level_counts.__getitem__) if records else None
    modal_proper = Counter(r["curvature_form"]["proper"] for r in records if r["curvature_form"]["label"] == modal_label)
    disagreements = [i for i, r in enumerate(records)
                     if r["curvature_form"]["label"] != modal_label or r["einstein"]["display"] != modal_level]
    spreads = {}
    grt = [r["curvature_form"]["fits"]["generalized_roter"]["coefficients"] for r in records]
    if grt:
        arr = np.asarray(grt, dtype=float)
        for j, name in enumerate(GRT_NAMES):
            spreads[name] = {"min": float(arr[:, j].min()), "max": float(arr[:, j].max())}
    for key in ("kappa", "kappa2"):
        vals = [r["scalars"][key] for r in records]
        if vals:
            spreads[key] = {"min": float(min(vals)), "max": float(max(vals))}
    return {
        "modal_class": modal_class,
        "modal_label": modal_label,
        "class_counts": dict(sorted(Counter("not GRT" if l == "not_grt" else c
                                            for c, l in zip(classes, labels)).items())),
        "modal_proper": None if not modal_proper else max(modal_proper, key=modal_proper.__getitem__),
        "modal_einstein": modal_level,
        "einstein_counts": dict(sorted(level_counts.items())),
        "disagreements": disagreements,
        "coefficient_spreads": spreads,
        "implication_violations": sum(len(r["equivalence"]["violations"]) for r in records),
    }


def analyze(config: AnalysisConfig) -> dict:
    """Run the full pipeline; raises ConfigError or EngineError."""
    chart = build_chart(config)
    points = sample_points(config, chart)
    tols = config.tols
    if config.workers > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(lambda p: _run_point(chart, p, tols), points))
    else:
        results = [_run_point(chart, p, tols) for p in points]
    records = [r for r, _ in results if r is not None]
    failures = [f for _, f in results if f is not None]
    if failures and (config.strict or not records):
        raise EngineError("; ".join(f["error"] for f in failures))
    report = {
        "schema_version": SCHEMA_VERSION,
        "chart": chart.name,
        "dimension": chart.dim,
        "coordinates": list(chart.coordinates),
        "parameters": {k: v for k, v in sorted(config.params.items())},
        "seed": config.seed,
        "tolerances": {"accept": tols.accept, "reject": tols.reject, "floor": tols.floor,
                       "cluster": tols.cluster},
        "points": records,
        "failures": failures,
        "aggregate": _aggregate(records),
    }
    if config.metric == "met2" and records:
        report["published_relations"] = published_relation_checks(
            curvature_package(chart, records[0]["point"]))
    return report
