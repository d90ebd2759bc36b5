"""Jet scalars: truncated Taylor polynomials in (x, y) carrying exact partials."""
from __future__ import annotations

import math
from numbers import Real

import numpy as np

from ..errors import JetDomainError
from . import kernels
from .space import JetSpace, jet_space


class Jet:
    """Truncated multivariate Taylor polynomial about a fixed point.

    ``c[k]`` is the Taylor coefficient of monomial ``space.exps[k]``, so the
    value is ``c[0]`` and a mixed partial is ``c[k] * space.factor[k]``.
    Jets are treated as immutable; every operation returns a new one.
    """

    __slots__ = ("space", "c")
    __array_priority__ = 1000  # numpy scalars defer to Jet operators

    def __init__(self, space: JetSpace, coeffs):
        self.space = space
        self.c = coeffs

    @classmethod
    def constant(cls, space: JetSpace, value: float) -> "Jet":
        c = np.zeros(space.size)
        c[0] = value
        return cls(space, c)

    @property
    def value(self) -> float:
        return float(self.c[0])

    def __float__(self):
        return self.value

    def __repr__(self):
        return f"Jet(value={self.value!r}, {self.space!r})"

    def partial(self, x=(), y=()) -> float:
        """Mixed partial d_x^{x...} d_y^{y...} at the expansion point.

        ``x`` and ``y`` list slot indices, repeated for higher order:
        ``partial(y=(0, 0))`` is the second derivative in y^0.
        """
        k, fac = self.space.partial_index(x, y)
        return float(self.c[k] * fac)

    def partials(self, x_count: int, y_count: int) -> np.ndarray:
        idx, fac = self.space.block(x_count, y_count)
        return self.c[idx] * fac

    # derivative jets -----------------------------------------------------
    def dx(self, slot: int) -> "Jet":
        target, src, mult = self.space.diff_table("x", slot)
        return Jet(target, self.c[src] * mult)

    def dy(self, slot: int) -> "Jet":
        target, src, mult = self.space.diff_table("y", slot)
        return Jet(target, self.c[src] * mult)

    def truncate(self, ox: int, oy: int) -> "Jet":
        s = self.space
        key = (s.nx, s.ny, min(ox, s.ox), min(oy, s.oy))
        if key == s.key:
            return self
        return Jet(jet_space(*key), self.c[s.truncation_map(key)])

    # arithmetic ----------------------------------------------------------
    def _align(self, other: "Jet"):
        a, b = self.space, other.space
        if a is b:
            return self, other
        if (a.nx, a.ny) != (b.nx, b.ny):
            raise ValueError(f"incompatible jet spaces {a!r} and {b!r}")
        ox, oy = min(a.ox, b.ox), min(a.oy, b.oy)
        return self.truncate(ox, oy), other.truncate(ox, oy)

    def __add__(self, other):
        if isinstance(other, Jet):
            a, b = self._align(other)
            return Jet(a.space, a.c + b.c)
        if isinstance(other, Real):
            c = self.c.copy()
            c[0] += other
            return Jet(self.space, c)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.space, -self.c)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if isinstance(other, (Jet, Real)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, Real):
            return (-self) + other
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Jet):
            a, b = self._align(other)
            s = a.space
            return Jet(s, kernels.mul(a.c, b.c, s.mul_i, s.mul_j, s.mul_k))
        if isinstance(other, Real):
            return Jet(self.space, self.c * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        if isinstance(other, Real):
            if other == 0:
                raise JetDomainError("division", "division of a jet by zero")
            return Jet(self.space, self.c / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, Real):
            return self.reciprocal() * other
        return NotImplemented

    def __pow__(self, exponent):
        if not isinstance(exponent, Real):
            return NotImplemented
        if float(exponent).is_integer() and exponent >= 0:
            return self._ipow(int(exponent))
        return self.compose(_power_derivatives(self.value, float(exponent),
                                               self.space.max_degree, "pow"))

    def _ipow(self, k: int) -> "Jet":
        result = Jet.constant(self.space, 1.0)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # elementary functions -------------------------------------------------
    def compose(self, derivs) -> "Jet":
        """Apply a univariate function given its derivatives f^(k)(value)."""
        s = self.space
        coeffs = np.array([d / math.factorial(k) for k, d in enumerate(derivs)])
        return Jet(s, kernels.compose(self.c, coeffs, s.mul_i, s.mul_j, s.mul_k))

    def sqrt(self) -> "Jet":
        if not self.value > 0:
            raise JetDomainError("sqrt", f"sqrt requires a positive value, got {self.value!r}")
        return self.compose(_power_derivatives(self.value, 0.5, self.space.max_degree, "sqrt"))

    def reciprocal(self) -> "Jet":
        if self.value == 0:
            raise JetDomainError("reciprocal", "reciprocal of a jet with zero value")
        return self.compose(_power_derivatives(self.value, -1.0, self.space.max_degree,
                                               "reciprocal"))


def _power_derivatives(t: float, r: float, order: int, op: str) -> list[float]:
    integral = float(r).is_integer()
    if t < 0 and not integral:
        raise JetDomainError(op, f"{op} with exponent {r} requires a positive value, got {t!r}")
    if t == 0 and r < order:
        raise JetDomainError(op, f"{op} with exponent {r} is not smooth at 0")
    out = []
    coef = 1.0
    for k in range(order + 1):
        out.append(coef * t ** (r - k) if coef else 0.0)
        coef *= r - k
    return out


def sqrt(t):
    """Square root for jets, floats and mpmath numbers alike."""
    if isinstance(t, Jet):
        return t.sqrt()
    return t ** 0.5


def reciprocal(t):
    if isinstance(t, Jet):
        return t.reciprocal()
    return 1 / t


def lift(point, x_order: int = 1, y_order: int = 3):
    """Coordinate jets (xs, ys) seeded at a tangent point.

    Every x- and y-slot is seeded, so any composite built from the
    returned jets carries its mixed partials up to the given orders.
    """
    x = np.asarray(point.x, dtype=float)
    y = np.asarray(point.y, dtype=float)
    if not np.any(y):
        raise JetDomainError("lift", "supporting element y must be nonzero")
    n = x.shape[0]
    space = jet_space(n, n, x_order, y_order)
    xs = [_seeded(space, x[s], s) if x_order else Jet.constant(space, x[s]) for s in range(n)]
    ys = [_seeded(space, y[i], n + i) if y_order else Jet.constant(space, y[i])
          for i in range(n)]
    return xs, ys


def lift_x(x, order: int = 1):
    """Jets for base coordinates only (no y-slots)."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    space = jet_space(n, 0, order, 0)
    return [_seeded(space, x[s], s) for s in range(n)]


def variables(values, order: int):
    """Independent variables v_k seeded as y-slots of a jet space with no x-slots."""
    values = [float(v) for v in values]
    space = jet_space(0, len(values), 0, order)
    return [_seeded(space, v, k) for k, v in enumerate(values)]


def _seeded(space: JetSpace, value: float, col: int) -> Jet:
    c = np.zeros(space.size)
    c[0] = value
    e = [0] * (space.nx + space.ny)
    e[col] = 1
    k = space.index.get(tuple(e))
    if k is not None:
        c[k] = 1.0
    return Jet(space, c)
