"""Order-3 truncated multivariate Taylor arithmetic.

A :class:`Jet3` carries the value of a function at a point together with its
gradient, Hessian and third-derivative array (all stored fully, symmetric).
"""
from __future__ import annotations

import math

import numpy as np

__all__ = ["Jet3", "JetDomainError", "seed", "constant", "exp", "log", "sin", "cos", "sqrt"]


class JetDomainError(ValueError):
    """Raised when a function is evaluated outside its real domain."""


def _sym3(a, b):
    # a_ij b_k + a_ik b_j + a_jk b_i
    return (np.einsum("ij,k->ijk", a, b) + np.einsum("ik,j->ijk", a, b)
            + np.einsum("jk,i->ijk", a, b))


class Jet3:
    __slots__ = ("val", "grad", "hess", "third")
    __array_priority__ = 100  # keep numpy scalars from broadcasting over jets

    def __init__(self, val, grad, hess, third):
        self.val = float(val)
        self.grad = grad
        self.hess = hess
        self.third = third

    @property
    def nvars(self) -> int:
        return self.grad.shape[0]

    def __repr__(self):
        return f"Jet3(val={self.val!r}, grad={self.grad.tolist()!r})"

    def _coerce(self, other) -> "Jet3":
        if isinstance(other, Jet3):
            if other.nvars != self.nvars:
                raise ValueError(f"nvars mismatch: {self.nvars} vs {other.nvars}")
            return other
        return constant(float(other), self.nvars)

    def __add__(self, other):
        if not isinstance(other, Jet3):
            return Jet3(self.val + float(other), self.grad, self.hess, self.third)
        o = self._coerce(other)
        return Jet3(self.val + o.val, self.grad + o.grad, self.hess + o.hess, self.third + o.third)

    __radd__ = __add__

    def __neg__(self):
        return Jet3(-self.val, -self.grad, -self.hess, -self.third)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Jet3):
            c = float(other)
            return Jet3(c * self.val, c * self.grad, c * self.hess, c * self.third)
        o = self._coerce(other)
        f0, f1, f2, f3 = self.val, self.grad, self.hess, self.third
        g0, g1, g2, g3 = o.val, o.grad, o.hess, o.third
        return Jet3(
            f0 * g0,
            f1 * g0 + f0 * g1,
            f2 * g0 + np.outer(f1, g1) + np.outer(g1, f1) + f0 * g2,
            f3 * g0 + _sym3(f2, g1) + _sym3(g2, f1) + f0 * g3,
        )

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet3":
        v = self.val
        if v == 0.0:
            raise JetDomainError("division by a jet with zero value")
        return self._compose(1.0 / v, -1.0 / v**2, 2.0 / v**3, -6.0 / v**4)

    def __truediv__(self, other):
        if not isinstance(other, Jet3):
            c = float(other)
            if c == 0.0:
                raise JetDomainError("division by zero")
            return self * (1.0 / c)
        return self * self._coerce(other).reciprocal()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.reciprocal()

    def __pow__(self, p):
        if isinstance(p, Jet3):
            if p.grad.any() or p.hess.any() or p.third.any():
                return exp(p * log(self))
            p = p.val
        p = float(p)
        if p.is_integer():
            return self.ipow(int(p))
        return self.rpow(p)

    def ipow(self, k: int) -> "Jet3":
        v = self.val
        if k == 0:
            return constant(1.0, self.nvars)
        if k < 0:
            return self.ipow(-k).reciprocal()
        return self._compose(
            v**k,
            k * v ** (k - 1),
            k * (k - 1) * v ** (k - 2) if k >= 2 else 0.0,
            k * (k - 1) * (k - 2) * v ** (k - 3) if k >= 3 else 0.0,
        )

    def rpow(self, p: float) -> "Jet3":
        v = self.val
        if v <= 0.0:
            raise JetDomainError(f"real power {p} of non-positive value {v}")
        return self._compose(v**p, p * v ** (p - 1), p * (p - 1) * v ** (p - 2),
                             p * (p - 1) * (p - 2) * v ** (p - 3))

    def _compose(self, d0, d1, d2, d3) -> "Jet3":
        """Chain rule through order 3 for a scalar function with derivatives d0..d3 at ``val``."""
        u1, u2, u3 = self.grad, self.hess, self.third
        return Jet3(
            d0,
            d1 * u1,
            d2 * np.outer(u1, u1) + d1 * u2,
            d3 * np.einsum("i,j,k->ijk", u1, u1, u1) + d2 * _sym3(u2, u1) + d1 * u3,
        )


def constant(value: float, nvars: int) -> Jet3:
    return Jet3(value, np.zeros(nvars), np.zeros((nvars, nvars)), np.zeros((nvars,) * 3))


def seed(index: int, value: float, nvars: int) -> Jet3:
    """Jet of the coordinate function ``x_index`` (0-based) at ``value``."""
    j = constant(value, nvars)
    j.grad[index] = 1.0
    return j


def exp(u: Jet3) -> Jet3:
    e = math.exp(u.val)
    return u._compose(e, e, e, e)


def log(u: Jet3) -> Jet3:
    v = u.val
    if v <= 0.0:
        raise JetDomainError(f"log of non-positive value {v}")
    return u._compose(math.log(v), 1.0 / v, -1.0 / v**2, 2.0 / v**3)


def sin(u: Jet3) -> Jet3:
    s, c = math.sin(u.val), math.cos(u.val)
    return u._compose(s, c, -s, -c)


def cos(u: Jet3) -> Jet3:
    s, c = math.sin(u.val), math.cos(u.val)
    return u._compose(c, -s, -c, s)


def sqrt(u: Jet3) -> Jet3:
    v = u.val
    if v <= 0.0:
        # the derivative blows up at 0, so the jet is undefined there too
        raise JetDomainError(f"sqrt of non-positive value {v}")
    r = math.sqrt(v)
    return u._compose(r, 0.5 / r, -0.25 / (r * v), 0.375 / (r * v * v))


FUNCTIONS = {"exp": exp, "log": log, "sin": sin, "cos": cos, "sqrt": sqrt}
