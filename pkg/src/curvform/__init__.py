"""Pointwise curvature classification for metrics given in coordinates.

Metric components are expression strings; order-3 jets give the curvature
tensor and its covariant derivative exactly (up to rounding), and the
classifier decides membership in the Roter-type hierarchy and the
generalized Einstein levels by tolerance-gated least squares.
"""
from .analysis import AnalysisConfig, analyze
from .catalog import CATALOG, build_met1, build_met2, get_entry
from .chart import MetricChart, load_chart, parse_chart
from .classify import Tolerances, classify_curvature_form, einstein_level
from .curvature import CurvaturePackage, curvature_package
from .expr import parse_expression

__all__ = ["AnalysisConfig", "analyze", "CATALOG", "build_met1", "build_met2", "get_entry",
           "MetricChart", "load_chart", "parse_chart", "Tolerances", "classify_curvature_form",
           "einstein_level", "CurvaturePackage", "curvature_package", "parse_expression"]

__version__ = "0.1.0"
