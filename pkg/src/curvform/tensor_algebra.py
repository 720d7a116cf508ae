"""Pointwise multilinear algebra on one tangent space.

Tensors are plain ``numpy`` arrays of shape ``(n,) * k`` holding covariant
components in coordinate order.  Endomorphisms are ``(n, n)`` arrays ``H``
with ``H[i, j]`` the ``i``-th component of ``H e_j``.  ``DenseTensor`` is a
small validated container for callers who want the symmetry class carried
along with the components.
"""
from __future__ import annotations

import enum
import string
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Symmetry",
    "DenseTensor",
    "TensorShapeError",
    "SingularMetricError",
    "kn_product",
    "kn_product_general",
    "endo_action",
    "curvature_action",
    "q_product",
    "mu_action",
    "ricci_power",
    "trace_wrt_g",
    "metric_inverse",
    "curvature_violations",
    "check_generalized_curvature",
    "norm",
]

SINGULAR_THRESHOLD = 1e-12


class TensorShapeError(ValueError):
    """Raised on dimension or rank mismatch between operands."""


class SingularMetricError(ValueError):
    """Raised when a metric matrix is numerically singular."""


class Symmetry(enum.Enum):
    NONE = "none"
    SYM2 = "sym2"
    CURV4 = "curv4"


@dataclass(frozen=True)
class DenseTensor:
    """Components of a (0,k) tensor plus its declared symmetry class.

    Construction symmetrizes per the tag and rejects inputs whose
    violation exceeds ``tol`` times the component scale.
    """

    components: np.ndarray
    symmetry: Symmetry = Symmetry.NONE

    def __post_init__(self):
        arr = np.array(self.components, dtype=float)
        if arr.ndim and len(set(arr.shape)) != 1:
            raise TensorShapeError(f"non-square component array {arr.shape}")
        if self.symmetry is Symmetry.SYM2:
            if arr.ndim != 2:
                raise TensorShapeError("sym2 tensor must have rank 2")
            sym = 0.5 * (arr + arr.T)
            _require_close(arr, sym, "sym2")
            arr = sym
        elif self.symmetry is Symmetry.CURV4:
            if arr.ndim != 4:
                raise TensorShapeError("curv4 tensor must have rank 4")
            if not _has_curv4_symmetry(arr, 1e-9 * max(norm(arr), 1e-300)):
                raise ValueError("components violate curv4 symmetries")
        arr.setflags(write=False)
        object.__setattr__(self, "components", arr)

    @classmethod
    def sym2(cls, components) -> "DenseTensor":
        return cls(components, Symmetry.SYM2)

    @classmethod
    def curv4(cls, components) -> "DenseTensor":
        return cls(components, Symmetry.CURV4)

    @property
    def dim(self) -> int:
        return self.components.shape[0] if self.components.ndim else 0

    @property
    def rank(self) -> int:
        return self.components.ndim

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.components, dtype=dtype)


def _require_close(a, b, what):
    scale = max(np.max(np.abs(a), initial=0.0), 1.0)
    if np.max(np.abs(a - b), initial=0.0) > 1e-9 * scale:
        raise ValueError(f"components violate {what} symmetry")


def norm(t) -> float:
    """Euclidean norm of raw coordinate components."""
    return float(np.linalg.norm(np.ravel(np.asarray(t, dtype=float))))


def _as_sym2(a, name="A") -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise TensorShapeError(f"{name} must be a square (0,2) tensor, got shape {a.shape}")
    return a


def _same_dim(n, t, name="T"):
    if t.ndim and any(s != n for s in t.shape):
        raise TensorShapeError(f"{name} has shape {t.shape}, expected dimension {n}")


def metric_inverse(g) -> np.ndarray:
    """Inverse of a (possibly indefinite) metric by pivoted LU solve."""
    g = _as_sym2(g, "g")
    row_norms = np.linalg.norm(g, axis=1)
    denom = np.prod(row_norms)
    det = np.linalg.det(g)
    if denom == 0.0 or abs(det) / denom < SINGULAR_THRESHOLD:
        raise SingularMetricError(f"metric is singular (|det|/prod(row norms) = "
                                  f"{abs(det) / denom if denom else 0.0:.3g})")
    return np.linalg.solve(g, np.eye(g.shape[0]))


def kn_product(a, e) -> np.ndarray:
    """Kulkarni-Nomizu product of two symmetric (0,2) tensors."""
    a = _as_sym2(a, "A")
    e = _as_sym2(e, "E")
    if a.shape != e.shape:
        raise TensorShapeError(f"dimension mismatch {a.shape} vs {e.shape}")
    _require_close(a, a.T, "sym2")
    _require_close(e, e.T, "sym2")
    a, e = 0.5 * (a + a.T), 0.5 * (e + e.T)
    # half[a,b,c,d] = A_ad E_bc + A_bc E_ad; subtracting its (c,d) swap makes
    # both antisymmetries and the pair symmetry exact in floating point
    half = np.einsum("ad,bc->abcd", a, e) + np.einsum("bc,ad->abcd", a, e)
    return half - np.swapaxes(half, 2, 3)


def kn_product_general(a, t) -> np.ndarray:
    """Generalized Kulkarni-Nomizu product of a (0,2) tensor with a (0,k) tensor, k >= 2.

    Slots of the result are ``(X1, X2, Y1, Y2, ..., Yk)``.
    """
    a = _as_sym2(a, "A")
    t = np.asarray(t, dtype=float)
    if t.ndim < 2:
        raise TensorShapeError(f"T must have rank >= 2, got {t.ndim}")
    _same_dim(a.shape[0], t)
    return (np.einsum("ad,bc...->abcd...", a, t) + np.einsum("bc,ad...->abcd...", a, t)
            - np.einsum("ac,bd...->abcd...", a, t) - np.einsum("bd,ac...->abcd...", a, t))


def _derivation(h, t):
    # -sum_s T(.., H X_s, ..) for a single endomorphism h
    k = t.ndim
    out = np.zeros_like(t)
    for s in range(k):
        out -= np.moveaxis(np.tensordot(t, h, axes=([s], [0])), -1, s)
    return out


def endo_action(h, t):
    """Action of an endomorphism ``h`` on a (0,k) tensor as a derivation.

    For a scalar (k = 0) the action is zero.
    """
    h = np.asarray(h, dtype=float)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise TensorShapeError(f"endomorphism must be square, got {h.shape}")
    t = np.asarray(t, dtype=float)
    if t.ndim == 0:
        return 0.0
    _same_dim(h.shape[0], t)
    return _derivation(h, t)


def _pair_action(pair_endo, t):
    """Apply a family of endomorphisms ``pair_endo[a, b]`` (shape n,n,n,n with the
    matrix in the last two axes) and append ``(a, b)`` as the last two slots."""
    k = t.ndim
    letters = string.ascii_letters
    t_idx = letters[:k]
    a, b, i = letters[k], letters[k + 1], letters[k + 2]
    out = 0.0
    for s in range(k):
        src = t_idx[:s] + i + t_idx[s + 1:]
        spec = f"{src},{a}{b}{i}{t_idx[s]}->{t_idx}{a}{b}"
        out = out - np.einsum(spec, t, pair_endo)
    return out


def curvature_action(d, g, t) -> np.ndarray:
    """The tensor D.T of rank k+2, with the vector pair (X, Y) in the last two slots.

    ``D(X,Y)`` acts as the endomorphism obtained by raising the last slot of D.
    """
    d = np.asarray(d, dtype=float)
    if d.ndim != 4:
        raise TensorShapeError(f"D must have rank 4, got {d.ndim}")
    if not _has_curv4_symmetry(d, 1e-9 * max(norm(d), 1e-300)):
        raise ValueError("D lacks the curv4 symmetries")
    g = _as_sym2(g, "g")
    n = g.shape[0]
    _same_dim(n, d, "D")
    t = np.asarray(t, dtype=float)
    if t.ndim < 1:
        raise TensorShapeError("T must have rank >= 1")
    _same_dim(n, t)
    ginv = metric_inverse(g)
    # endo[a, b, i, c] = component i of D(e_a, e_b) e_c
    endo = np.einsum("abcd,di->abic", d, ginv)
    return _pair_action(endo, t)


def q_product(a, t, g) -> np.ndarray:
    """Tachibana tensor Q(A, T), with (X, Y) in the last two slots.

    ``(X wedge_A Y) Z = A(Y, Z) X - A(X, Z) Y`` is already vector valued in the
    coordinate basis, so ``g`` only fixes the dimension and is checked for
    invertibility.
    """
    a = _as_sym2(a, "A")
    g = _as_sym2(g, "g")
    if a.shape != g.shape:
        raise TensorShapeError("A and g dimension mismatch")
    metric_inverse(g)
    n = a.shape[0]
    t = np.asarray(t, dtype=float)
    if t.ndim < 1:
        raise TensorShapeError("T must have rank >= 1")
    _same_dim(n, t)
    eye = np.eye(n)
    # endo[a, b, i, c] = A[b, c] delta_ia - A[a, c] delta_ib
    endo = np.einsum("bc,ai->abic", a, eye) - np.einsum("ac,bi->abic", a, eye)
    return _pair_action(endo, t)


def mu_action(mu, x, t):
    """Action of the rank-one endomorphism ``Z -> mu(Z) X`` on T."""
    mu = np.asarray(mu, dtype=float)
    x = np.asarray(x, dtype=float)
    if mu.shape != x.shape or mu.ndim != 1:
        raise TensorShapeError("mu and X must be vectors of equal length")
    return endo_action(np.outer(x, mu), t)


def ricci_power(a, g, k: int) -> np.ndarray:
    """k-th level tensor ``A^k(X, Y) = A(calA^{k-1} X, Y)`` with ``calA = g^{-1} A``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    a = _as_sym2(a, "A")
    g = _as_sym2(g, "g")
    if a.shape != g.shape:
        raise TensorShapeError("A and g dimension mismatch")
    ginv = metric_inverse(g)
    step = a @ ginv
    out = a.copy()
    for _ in range(k - 1):
        out = step @ out
    return 0.5 * (out + out.T)


def trace_wrt_g(a, g) -> float:
    a = _as_sym2(a, "A")
    ginv = metric_inverse(g)
    if a.shape != ginv.shape:
        raise TensorShapeError("A and g dimension mismatch")
    return float(np.einsum("ij,ij->", ginv, a))


def curvature_violations(d) -> dict[str, float]:
    """Max-norm violations of the three generalized curvature axioms."""
    d = np.asarray(d, dtype=float)
    if d.ndim != 4:
        raise TensorShapeError(f"expected rank 4, got {d.ndim}")
    bianchi = d + np.einsum("bcad->abcd", d) + np.einsum("cabd->abcd", d)
    return {
        "bianchi": float(np.max(np.abs(bianchi), initial=0.0)),
        "antisym": float(np.max(np.abs(d + np.swapaxes(d, 0, 1)), initial=0.0)),
        "pair": float(np.max(np.abs(d - np.transpose(d, (2, 3, 0, 1))), initial=0.0)),
    }


def _has_curv4_symmetry(d, tol: float) -> bool:
    v = curvature_violations(d)
    return all(v[k] < tol or v[k] == 0.0 for k in ("antisym", "pair"))


def check_generalized_curvature(d, tol: float) -> bool:
    d = np.asarray(d)
    if d.ndim != 4:
        return False
    return all(v < tol or v == 0.0 for v in curvature_violations(d).values())
