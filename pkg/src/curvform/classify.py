"""Pointwise structure detection.

Curvature-form hierarchy (flat, constant curvature, conformally flat, Roter
type, generalized Roter type), the Ricci-level Einstein hierarchy, and
quasi-Einstein / quasi-constant-curvature decompositions, plus the
coefficient relations that connect them.

Every membership question reduces to a least-squares fit of a target tensor
against a small basis, judged by its relative residual against two
tolerances: below ``accept`` is a member, above ``reject`` is not, and the
band between is reported as indeterminate.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import tensor_algebra as ta
from .curvature import CurvaturePackage

__all__ = [
    "Tolerances", "FitResult", "CurvatureForm", "EinsteinVerdict", "QuasiDecomposition",
    "QuasiConstantCurvature", "PreconditionError",
    "fit_linear_combination", "rt_basis", "grt_basis", "classify_curvature_form", "einstein_level",
    "krylov_kernel", "quasi_einstein", "quasi_constant_curvature", "rt_to_grt_coefficients",
    "rt_to_grt_coefficients_as_printed", "constant_curvature_relations",
    "einstein_grt_constant_coefficient", "quasi_constant_coefficients", "reduce_grt_by_ein2",
    "rt_contraction_coefficients", "grt_contraction_coefficients", "contract_first_last",
]

SV_CUTOFF = 1e-10
EPS = 1e-300

GRT_NAMES = ("g^g", "g^S", "S^S", "g^S2", "S^S2", "S2^S2")


class PreconditionError(ValueError):
    """An operation's structural precondition does not hold at this point."""


@dataclass(frozen=True)
class Tolerances:
    accept: float = 1e-8
    reject: float = 1e-4
    floor: float = 1e-10     # determinacy floor for pseudosymmetry right-hand sides
    cluster: float = 1e-6    # relative eigenvalue clustering for quasi-Einstein

    def __post_init__(self):
        if not 0 < self.accept < self.reject:
            raise ValueError("need 0 < accept < reject")

    def verdict(self, residual: float) -> str:
        if residual < self.accept:
            return "member"
        if residual > self.reject:
            return "non-member"
        return "indeterminate"


DEFAULT_TOLS = Tolerances()


@dataclass(frozen=True)
class FitResult:
    coefficients: np.ndarray
    relative_residual: float
    kernel_basis: np.ndarray  # shape (k, p), orthonormal rows
    status: str               # determinate | degenerate | indeterminate
    rank: int
    names: tuple = ()

    def verdict(self, tols: Tolerances = DEFAULT_TOLS) -> str:
        if self.status == "indeterminate":
            return "indeterminate"
        return tols.verdict(self.relative_residual)

    def is_member(self, tols: Tolerances = DEFAULT_TOLS) -> bool:
        return self.verdict(tols) == "member"

    def functional_range(self, weights) -> tuple[float, float]:
        """Value of ``weights . c`` at the min-norm solution and the largest
        change of it along the kernel (0 when the functional is constant on
        the solution set)."""
        w = np.asarray(weights, dtype=float)
        base = float(w @ self.coefficients)
        spread = float(np.linalg.norm(self.kernel_basis @ w)) if len(self.kernel_basis) else 0.0
        return base, spread


def fit_linear_combination(target, basis: Sequence, accept_tol: float = DEFAULT_TOLS.accept,
                           reject_tol: float = DEFAULT_TOLS.reject, names=()) -> FitResult:
    """Minimum-norm least-squares coefficients of ``target`` in ``span(basis)``.

    Uses an SVD with singular values below ``1e-10 * s_max`` discarded; the
    discarded right singular vectors form ``kernel_basis``.
    """
    if len(basis) == 0:
        raise ValueError("empty basis")
    if not accept_tol < reject_tol:
        raise ValueError("accept_tol must be below reject_tol")
    t = np.ravel(np.asarray(target, dtype=float))
    B = np.column_stack([np.ravel(np.asarray(b, dtype=float)) for b in basis])
    if B.shape[0] != t.shape[0]:
        raise ta.TensorShapeError("basis and target shapes differ")
    p = B.shape[1]
    U, s, Vt = np.linalg.svd(B, full_matrices=True)
    smax = s[0] if len(s) else 0.0
    tnorm = np.linalg.norm(t)
    if smax <= max(EPS, 1e-14 * tnorm):
        return FitResult(np.zeros(p), float(tnorm / max(tnorm, EPS)), np.eye(p), "indeterminate", 0,
                         tuple(names))
    r = int(np.sum(s > SV_CUTOFF * smax))
    coeffs = Vt[:r].T @ ((U[:, :r].T @ t) / s[:r])
    resid = np.linalg.norm(t - B @ coeffs) / max(tnorm, EPS)
    kernel = Vt[r:]
    status = "degenerate" if r < p else "determinate"
    return FitResult(coeffs, float(resid), kernel, status, r, tuple(names))


def rt_basis(pkg: CurvaturePackage):
    g, S = pkg.g, pkg.S
    return [ta.kn_product(g, g), ta.kn_product(g, S), ta.kn_product(S, S)]


def grt_basis(pkg: CurvaturePackage):
    g, S, S2 = pkg.g, pkg.S, pkg.S2
    return rt_basis(pkg) + [ta.kn_product(g, S2), ta.kn_product(S, S2), ta.kn_product(S2, S2)]


LABELS = {
    "flat": "flat",
    "constant_curvature": "constant curvature",
    "conformally_flat": "conformally flat",
    "roter": "Roter type",
    "generalized_roter": "generalized Roter type",
    "not_grt": "not GRT",
    "indeterminate": "indeterminate",
}


@dataclass(frozen=True)
class CurvatureForm:
    label: str
    proper: Optional[bool]
    fit: Optional[FitResult]
    fits: dict
    weyl_ratio: float
    conformal_agree: bool

    @property
    def display(self) -> str:
        text = LABELS[self.label]
        if self.label in ("roter", "generalized_roter") and self.proper:
            text = "proper " + text
        return text


def _proper(top_removed: FitResult, tols: Tolerances) -> Optional[bool]:
    v = top_removed.verdict(tols)
    return {"non-member": True, "member": False}.get(v)


def classify_curvature_form(pkg: CurvaturePackage, tols: Tolerances = DEFAULT_TOLS) -> CurvatureForm:
    """First class of the chain flat < constant < conformally flat < RT < GRT that fits R."""
    R = pkg.R
    basis = grt_basis(pkg)
    fit = lambda k: fit_linear_combination(R, basis[:k], tols.accept, tols.reject, GRT_NAMES[:k])
    fits = {"constant_curvature": fit(1), "conformally_flat": fit(2), "roter": fit(3),
            "roter_without_top": fit(2), "generalized_roter": fit(6),
            "generalized_roter_without_top": fit(5)}
    r_norm = ta.norm(R)
    weyl_ratio = ta.norm(pkg.C) / max(r_norm, EPS)
    conformal_agree = (fits["conformally_flat"].is_member(tols) == (weyl_ratio < tols.accept))
    common = dict(fits=fits, weyl_ratio=float(weyl_ratio), conformal_agree=conformal_agree)
    if r_norm <= tols.accept * ta.norm(basis[0]):
        return CurvatureForm("flat", None, None, **common)
    for label in ("constant_curvature", "conformally_flat"):
        if fits[label].is_member(tols):
            return CurvatureForm(label, None, fits[label], **common)
    if fits["roter"].is_member(tols):
        return CurvatureForm("roter", _proper(fits["roter_without_top"], tols), fits["roter"], **common)
    grt = fits["generalized_roter"]
    if grt.is_member(tols):
        return CurvatureForm("generalized_roter", _proper(fits["generalized_roter_without_top"], tols),
                             grt, **common)
    label = "not_grt" if grt.verdict(tols) == "non-member" else "indeterminate"
    return CurvatureForm(label, None, grt, **common)


@dataclass(frozen=True)
class EinsteinVerdict:
    level: object             # "ricci_flat", 1..4 or "none"
    relation: Optional[np.ndarray]  # [a_0, ..., a_{k-1}, 1] with sum a_i S^i = 0, S^0 = g
    kernel_basis: np.ndarray  # null space of [g, S, S^2, S^3, S^4]
    residuals: tuple          # fit residual of S^k on the lower family, k = 1..4

    @property
    def display(self) -> str:
        if self.level == "ricci_flat":
            return "Ricci flat"
        if self.level == "none":
            return "none"
        return "Einstein" if self.level == 1 else f"Ein({self.level})"


def _flat_family(pkg, size):
    return np.column_stack([np.ravel(x) for x in pkg.ricci_powers[:size]])


def krylov_kernel(pkg: CurvaturePackage, size: int = 5) -> np.ndarray:
    """Orthonormal rows spanning the linear relations among ``[g, S, ..., S^{size-1}]``."""
    M = _flat_family(pkg, size)
    _, s, Vt = np.linalg.svd(M, full_matrices=True)
    if s[0] == 0:
        return Vt
    r = int(np.sum(s > SV_CUTOFF * s[0]))
    return Vt[r:]


def einstein_level(pkg: CurvaturePackage, tols: Tolerances = DEFAULT_TOLS) -> EinsteinVerdict:
    """Smallest Ricci level k for which ``S^k`` is a combination of ``g, ..., S^{k-1}``.

    Uses Krylov-span fits only (the Ricci operator need not be diagonalizable
    in indefinite signature).
    """
    family = pkg.ricci_powers
    kernel = krylov_kernel(pkg, 5)
    if ta.norm(pkg.S) <= tols.accept * ta.norm(pkg.g):
        return EinsteinVerdict("ricci_flat", np.array([0.0, 1.0]), kernel, ())
    residuals = []
    for k in range(1, 5):
        fit = fit_linear_combination(family[k], family[:k], tols.accept, tols.reject)
        residuals.append(fit.relative_residual)
        if fit.is_member(tols):
            return EinsteinVerdict(k, np.append(-fit.coefficients, 1.0), kernel, tuple(residuals))
    return EinsteinVerdict("none", None, kernel, tuple(residuals))


@dataclass(frozen=True)
class QuasiDecomposition:
    alpha: float
    beta: float
    eta: np.ndarray
    residual: float
    degenerate: bool  # beta == 0: the package is Einstein


def quasi_einstein(pkg: CurvaturePackage, tols: Tolerances = DEFAULT_TOLS) -> Optional[QuasiDecomposition]:
    """``S = alpha g + beta eta (x) eta`` if the Ricci operator has an eigenvalue of
    multiplicity at least n-1 and the remainder has rank one.

    ``eta`` is returned with unit Euclidean norm; ``(beta, eta)`` is only
    determined up to ``(beta / c^2, c eta)``.
    """
    g, S, n = pkg.g, pkg.S, pkg.n
    s_norm = ta.norm(S)
    if s_norm == 0.0:
        return QuasiDecomposition(0.0, 0.0, np.zeros(n), 0.0, True)
    eig = np.linalg.eigvals(pkg.g_inv @ S)
    scale = max(np.max(np.abs(eig)), EPS)
    best = None
    for lam in eig:
        members = eig[np.abs(eig - lam) <= tols.cluster * scale]
        if len(members) >= n - 1 and (best is None or len(members) > len(best)):
            best = members
    if best is None:
        return None
    alpha = complex(np.mean(best))
    if abs(alpha.imag) > tols.cluster * scale:
        return None
    alpha = alpha.real
    M = S - alpha * g
    w, V = np.linalg.eigh(0.5 * (M + M.T))
    k = int(np.argmax(np.abs(w)))
    beta, eta = float(w[k]), V[:, k]
    if ta.norm(M) <= tols.accept * s_norm:
        return QuasiDecomposition(alpha, 0.0, eta, ta.norm(M) / s_norm, True)
    residual = ta.norm(M - beta * np.outer(eta, eta)) / s_norm
    if residual > tols.accept:
        return None
    return QuasiDecomposition(alpha, beta, eta, residual, False)


@dataclass(frozen=True)
class QuasiConstantCurvature:
    alpha_prime: float
    beta_prime: float
    eta: np.ndarray
    residual: float
    fit: FitResult


def quasi_constant_curvature(pkg: CurvaturePackage, tols: Tolerances = DEFAULT_TOLS,
                             eta=None) -> Optional[QuasiConstantCurvature]:
    """Fit ``R = alpha' G + beta' g ^ (eta (x) eta)``; ``eta`` defaults to the
    quasi-Einstein direction.  Returns None when no ``eta`` is available."""
    if eta is None:
        qe = quasi_einstein(pkg, tols)
        if qe is None:
            return None
        eta = qe.eta
    eta = np.asarray(eta, dtype=float)
    basis = [pkg.G, ta.kn_product(pkg.g, np.outer(eta, eta))]
    fit = fit_linear_combination(pkg.R, basis, tols.accept, tols.reject, ("G", "g^(eta eta)"))
    a, b = fit.coefficients
    return QuasiConstantCurvature(float(a), float(b), eta, fit.relative_residual, fit)


def quasi_constant_coefficients(L, alpha, beta, eta_norm2):
    """Predicted ``(alpha', beta')`` for a GRT package with ``S = alpha g + beta eta (x) eta``;
    ``eta_norm2 = g^{ij} eta_i eta_j``."""
    L1, L2, L3, L4, L5, L6 = L
    a = alpha
    alpha_p = 2 * (L1 + a * (L2 + a * (L3 + L4 + a * (L5 + L6 * a))))
    beta_p = beta * (L2 + a * (2 * (L3 + L4) + 3 * L5 * a + 4 * L6 * a**2)
                     + (L4 + a * (L5 + 2 * L6 * a)) * beta * eta_norm2)
    return alpha_p, beta_p


def rt_to_grt_coefficients(N1, N2, N3, kappa, n, L4, L5, L6):
    """``(L1, L2, L3)`` such that a proper Roter-type tensor with coefficients N
    equals the generalized Roter form with the given ``(L4, L5, L6)``.

    Contracting the Roter form gives ``S^2 = p g + q S`` with
    ``p = b / (2 N3)``, ``q = (a - 1) / (2 N3)``, ``a = (n-2) N2 + 2 N3 kappa``,
    ``b = 2 (n-1) N1 + N2 kappa``; substituting this into the generalized
    form and matching coefficients of ``g^g, g^S, S^S`` yields the result.
    """
    if N3 == 0:
        raise ValueError("N3 must be nonzero (proper Roter type)")
    a = (n - 2) * N2 + 2 * N3 * kappa - 1
    b = 2 * (n - 1) * N1 + N2 * kappa
    # N_i pulled out of the fractions so that L4 = L5 = L6 = 0 returns N exactly
    L1 = N1 - (b**2 * L6 + 2 * b * L4 * N3) / (4 * N3**2)
    L2 = N2 - (a * b * L6 + a * L4 * N3 + b * L5 * N3) / (2 * N3**2)
    L3 = N3 - (a**2 * L6 + 2 * a * L5 * N3) / (4 * N3**2)
    return L1, L2, L3


def rt_to_grt_coefficients_as_printed(N1, N2, N3, kappa, n, L4, L5, L6):
    """The three relations in their originally published form: no ``N1`` term
    in ``L1`` and ``a`` without the ``-1`` coming from the Ricci contraction.
    Kept for comparison; it does not reproduce R in general."""
    if N3 == 0:
        raise ValueError("N3 must be nonzero (proper Roter type)")
    a = (n - 2) * N2 + 2 * N3 * kappa
    b = 2 * (n - 1) * N1 + N2 * kappa
    L1 = -(b**2 * L6 + 2 * b * L4 * N3) / (4 * N3**2)
    L2 = -(a * b * L6 + a * L4 * N3 + b * L5 * N3 - 2 * N2 * N3**2) / (2 * N3**2)
    L3 = -(a**2 * L6 + 2 * a * L5 * N3 - 4 * N3**3) / (4 * N3**2)
    return L1, L2, L3


def reduce_grt_by_ein2(L, p, q):
    """Roter coefficients obtained from GRT coefficients ``L`` when ``S^2 = p g + q S``."""
    L1, L2, L3, L4, L5, L6 = L
    return (L1 + L4 * p + L6 * p**2,
            L2 + L4 * q + L5 * p + 2 * L6 * p * q,
            L3 + L5 * q + L6 * q**2)


def contract_first_last(T, g_inv):
    """g-trace of a (0,4) tensor over its first and last slots."""
    return np.einsum("il,ijkl->jk", g_inv, T)


def rt_contraction_coefficients(N, kappa, n):
    """Coefficients on ``(g, S, S^2)`` of the contraction of ``N1 g^g + N2 g^S + N3 S^S``."""
    N1, N2, N3 = N
    return (2 * N1 * (n - 1) + N2 * kappa, N2 * (n - 2) + 2 * N3 * kappa, -2 * N3)


def grt_contraction_coefficients(L, kappa, kappa2, n):
    """Coefficients on ``(g, S, S^2, S^3, S^4)`` of the contraction of the six-term form."""
    L1, L2, L3, L4, L5, L6 = L
    return (2 * L1 * (n - 1) + L2 * kappa + L4 * kappa2,
            L2 * (n - 2) + 2 * L3 * kappa + L5 * kappa2,
            -2 * L3 + L4 * (n - 2) + L5 * kappa + 2 * L6 * kappa2,
            -2 * L5,
            -2 * L6)


def _relation_holds(fit: FitResult, weights, rhs, tol):
    base, spread = fit.functional_range(weights)
    scale = max(abs(rhs), EPS)
    return abs(base - rhs) <= tol * scale and spread <= tol * max(scale, np.linalg.norm(weights))


def constant_curvature_relations(pkg: CurvaturePackage, tols: Tolerances = DEFAULT_TOLS,
                                 tol: float = 1e-9) -> tuple[bool, bool]:
    """Check the N- and L-relations forced on every Roter / generalized Roter
    solution at a non-flat point of constant curvature.

    Both relations are linear functionals of the coefficient vector, so the
    check covers the whole affine solution set: the min-norm solution must
    satisfy the relation and every kernel direction must annihilate it.
    """
    n, kappa = pkg.n, pkg.kappa
    if abs(kappa) <= tols.accept * ta.norm(pkg.g):
        raise PreconditionError("kappa = 0: the relations are vacuous")
    basis = grt_basis(pkg)
    if not fit_linear_combination(pkg.R, basis[:1], tols.accept, tols.reject).is_member(tols):
        raise PreconditionError("package is not of constant curvature")
    rt = fit_linear_combination(pkg.R, basis[:3], tols.accept, tols.reject)
    grt = fit_linear_combination(pkg.R, basis, tols.accept, tols.reject)
    rhs = kappa / (2 * (n - 1))
    k = kappa
    w_rt = np.array([n**2, k * n, k**2]) / n
    w_grt = np.array([n**4, k * n**3, k**2 * n**2, k**2 * n**2, k**3 * n, k**4]) / n**3
    return _relation_holds(rt, w_rt, rhs, tol), _relation_holds(grt, w_grt, rhs, tol)


def einstein_grt_constant_coefficient(pkg: CurvaturePackage, grt_fit: Optional[FitResult] = None,
                                      tols: Tolerances = DEFAULT_TOLS) -> float:
    """Coefficient c in ``R = c G`` predicted from the GRT coefficients of an Einstein package."""
    level = einstein_level(pkg, tols).level
    if level not in ("ricci_flat", 1):
        raise PreconditionError(f"package is not Einstein (level {level})")
    if grt_fit is None:
        grt_fit = fit_linear_combination(pkg.R, grt_basis(pkg), tols.accept, tols.reject)
    L1, L2, L3, L4, L5, L6 = grt_fit.coefficients
    n, k = pkg.n, pkg.kappa
    return float(2.0 / n**4 * (L1 * n**4 + k * (L2 * n**3 + k * ((L3 + L4) * n**2 + L5 * n * k + L6 * k**2))))
