"""Curvature data of a metric chart at a single point.

Conventions (calibrated so that the hyperbolic 3-block
``dx1^2 + e^{x1}(dx2^2 + dx3^2)`` has ``R_1212 = -e^{x1}/4`` and ``S = g/2``):

* ``R_abcd = -g(Rstd(e_a, e_b) e_c, e_d)`` where
  ``Rstd(X, Y) = [nabla_X, nabla_Y] - nabla_[X,Y]``; equivalently
  ``R_abcd = g(Rstd(e_a, e_b) e_d, e_c)``.
* ``S_jk = g^{il} R_ijkl`` (first slot against last).

With these a space of constant curvature reads ``R = kappa/(2n(n-1)) g^g``.
All derivatives come from order-3 jets of the metric components; there is no
numerical differentiation here.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import tensor_algebra as ta
from .chart import MetricChart, metric_jets
from .expr import evaluate_jet, parse_expression

__all__ = [
    "CurvaturePackage",
    "christoffel",
    "curvature_package",
    "package_from_tensors",
    "covariant_derivative",
    "covariant_derivative_sym2",
    "weyl",
    "concircular",
    "conharmonic",
    "gaussian",
    "second_bianchi_residual",
]


@dataclass(frozen=True)
class CurvaturePackage:
    point: Optional[np.ndarray]
    g: np.ndarray
    g_inv: np.ndarray
    gamma: Optional[np.ndarray]
    R: np.ndarray
    S: np.ndarray
    S2: np.ndarray
    S3: np.ndarray
    S4: np.ndarray
    kappa: float
    kappa2: float
    G: np.ndarray
    C: np.ndarray
    W: np.ndarray
    K: np.ndarray
    nabla_R: Optional[np.ndarray] = None
    nabla_S: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.g.shape[0]

    @property
    def ricci_powers(self):
        """``[g, S, S^2, S^3, S^4]``."""
        return [self.g, self.S, self.S2, self.S3, self.S4]


def gaussian(g):
    return 0.5 * ta.kn_product(g, g)


def weyl(R, S, g, kappa):
    n = g.shape[0]
    return (R - ta.kn_product(g, S) / (n - 2)
            + kappa / (2 * (n - 1) * (n - 2)) * ta.kn_product(g, g))


def concircular(R, g, kappa):
    n = g.shape[0]
    return R - kappa / (2 * n * (n - 1)) * ta.kn_product(g, g)


def conharmonic(R, S, g):
    n = g.shape[0]
    return R - ta.kn_product(g, S) / (n - 2)


def _derived(point, g, g_inv, gamma, R, nabla_R=None, nabla_S=None) -> CurvaturePackage:
    if g.shape[0] < 3:
        raise ta.TensorShapeError("curvature packages need dimension n >= 3")
    S = np.einsum("il,ijkl->jk", g_inv, R)
    S = 0.5 * (S + S.T)
    S2, S3, S4 = (ta.ricci_power(S, g, k) for k in (2, 3, 4))
    kappa = ta.trace_wrt_g(S, g)
    return CurvaturePackage(
        point=point, g=g, g_inv=g_inv, gamma=gamma, R=R, S=S, S2=S2, S3=S3, S4=S4,
        kappa=kappa, kappa2=ta.trace_wrt_g(S2, g),
        G=gaussian(g), C=weyl(R, S, g, kappa), W=concircular(R, g, kappa), K=conharmonic(R, S, g),
        nabla_R=nabla_R, nabla_S=nabla_S,
    )


def package_from_tensors(g, R) -> CurvaturePackage:
    """Package for a synthetic curvature tensor at a point (no connection data)."""
    g = np.asarray(g, dtype=float)
    R = np.asarray(R, dtype=float)
    return _derived(None, g, ta.metric_inverse(g), None, R)


def covariant_derivative(T, dT, gamma):
    """``(nabla_e T)_{a...}`` with the derivative index first.

    ``dT`` holds partial derivatives with the derivative index last.
    """
    T = np.asarray(T, dtype=float)
    out = np.moveaxis(np.asarray(dT, dtype=float), -1, 0).copy()
    for s in range(T.ndim):
        # Gamma^f_{e a_s} T_{.. f ..}
        term = np.tensordot(gamma, T, axes=([0], [s]))  # (e, a_s, rest...)
        out -= np.moveaxis(term, 1, s + 1)
    return out


def _christoffel_jets(chart, point):
    g, dg, d2g, d3g = metric_jets(chart, point)
    g_inv = ta.metric_inverse(g)
    G1 = _fk(dg)
    dG1 = _fk(d2g)
    d2G1 = _fk(d3g)
    # derivatives of the inverse metric
    dginv = -np.einsum("ap,pqe,qb->abe", g_inv, dg, g_inv)
    d2ginv = (np.einsum("ap,pqe,qr,rsf,sb->abef", g_inv, dg, g_inv, dg, g_inv)
              + np.einsum("ap,pqf,qr,rse,sb->abef", g_inv, dg, g_inv, dg, g_inv)
              - np.einsum("ap,pqef,qb->abef", g_inv, d2g, g_inv))
    gamma = np.einsum("ad,dbc->abc", g_inv, G1)
    dgamma = np.einsum("ade,dbc->abce", dginv, G1) + np.einsum("ad,dbce->abce", g_inv, dG1)
    d2gamma = (np.einsum("adef,dbc->abcef", d2ginv, G1)
               + np.einsum("ade,dbcf->abcef", dginv, dG1)
               + np.einsum("adf,dbce->abcef", dginv, dG1)
               + np.einsum("ad,dbcef->abcef", g_inv, d2G1))
    return g, dg, g_inv, gamma, dgamma, d2gamma


def _fk(x):
    # x[p, q, c, ...] = d_c (...) g_pq ; result[d, b, c, ...]
    return 0.5 * (np.einsum("dcb...->dbc...", x) + np.einsum("bdc...->dbc...", x)
                  - np.einsum("bcd...->dbc...", x))


def christoffel(chart: MetricChart, point) -> np.ndarray:
    """``gamma[a, b, c] = Gamma^a_{bc}`` of the Levi-Civita connection."""
    point = np.asarray(point, dtype=float)
    chart.check_point(point)
    g, dg, _, _ = metric_jets(chart, point)
    g_inv = ta.metric_inverse(g)
    return np.einsum("ad,dbc->abc", g_inv, _fk(dg))


def curvature_package(chart: MetricChart, point) -> CurvaturePackage:
    point = np.asarray(point, dtype=float)
    chart.check_point(point)
    g, dg, g_inv, gam, dgam, d2gam = _christoffel_jets(chart, point)

    # Rm[r, s, m, v] = R^r_{s m v} = d_m Gamma^r_{vs} - d_v Gamma^r_{ms}
    #                  + Gamma^r_{ml} Gamma^l_{vs} - Gamma^r_{vl} Gamma^l_{ms}
    quad = np.einsum("rml,lvs->rsmv", gam, gam)
    Rm = (np.einsum("rvsm->rsmv", dgam) - np.einsum("rmsv->rsmv", dgam) + quad
          - np.swapaxes(quad, 2, 3))
    dquad = np.einsum("rmle,lvs->rsmve", dgam, gam) + np.einsum("rml,lvse->rsmve", gam, dgam)
    dRm = (np.einsum("rvsme->rsmve", d2gam) - np.einsum("rmsve->rsmve", d2gam) + dquad
           - np.swapaxes(dquad, 2, 3))

    # R_abcd = -g_dr R^r_{cab}
    R = -np.einsum("dr,rcab->abcd", g, Rm)
    dR = -(np.einsum("dre,rcab->abcde", dg, Rm) + np.einsum("dr,rcabe->abcde", g, dRm))
    R = _curv_symmetrize(R)

    nabla_R = covariant_derivative(R, dR, gam)
    dginv = -np.einsum("ap,pqe,qb->abe", g_inv, dg, g_inv)
    S = np.einsum("il,ijkl->jk", g_inv, R)
    dS = np.einsum("ile,ijkl->jke", dginv, R) + np.einsum("il,ijkle->jke", g_inv, dR)
    nabla_S = covariant_derivative(S, dS, gam)
    return _derived(point, g, g_inv, gam, R, nabla_R, nabla_S)


def _curv_symmetrize(R):
    # project onto the antisymmetric-pair / pair-swap part; first Bianchi already holds
    R = 0.5 * (R - np.swapaxes(R, 0, 1))
    R = 0.5 * (R - np.swapaxes(R, 2, 3))
    return 0.5 * (R + np.transpose(R, (2, 3, 0, 1)))


def covariant_derivative_sym2(chart: MetricChart, point, field) -> np.ndarray:
    """Covariant derivative of a symmetric (0,2) field given as an n x n grid of
    expressions (text or AST; ``None`` or missing entries are zero).

    Returns ``out[c, a, b] = (nabla_c T)_ab``.
    """
    point = np.asarray(point, dtype=float)
    chart.check_point(point)
    n = chart.dim
    T = np.zeros((n, n))
    dT = np.zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            src = field[i][j]
            if src is None:
                continue
            node = parse_expression(src, chart.coordinates, chart.parameters) if isinstance(src, str) else src
            jet = evaluate_jet(node, point, chart.coordinates, chart.parameters)
            T[i, j] = jet.val
            dT[i, j] = jet.grad
    return covariant_derivative(T, dT, christoffel(chart, point))


def second_bianchi_residual(nabla_R) -> np.ndarray:
    """Cyclic sum over (e, a, b) of ``nabla_e R_abcd``."""
    nR = np.asarray(nabla_R)
    return nR + np.einsum("abecd->eabcd", nR) + np.einsum("beacd->eabcd", nR)
