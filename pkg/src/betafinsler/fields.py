"""Polynomial vector fields and 1-forms in x (degree <= 2).

A field is a coefficient table: ``const[i] + linear[i][j] x^j +
quadratic[i][j][k] x^j x^k``.  Evaluation uses only ``+`` and ``*`` so it
works on floats, mpmath numbers and jets.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .jets import lift_x


@dataclass(frozen=True, eq=False)
class PolynomialField:
    const: np.ndarray
    linear: np.ndarray
    quadratic: np.ndarray
    name: str = ""

    @classmethod
    def zeros(cls, n: int, name: str = "") -> "PolynomialField":
        return cls(np.zeros(n), np.zeros((n, n)), np.zeros((n, n, n)), name)

    @property
    def dim(self) -> int:
        return self.const.shape[0]

    def __call__(self, x):
        n = self.dim
        out = []
        for i in range(n):
            acc = float(self.const[i])
            for j in range(n):
                a = self.linear[i, j]
                if a:
                    acc = acc + float(a) * x[j]
                for k in range(n):
                    q = self.quadratic[i, j, k]
                    if q:
                        acc = acc + float(q) * x[j] * x[k]
            out.append(acc)
        return out

    def value(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.const + self.linear @ x + np.einsum("ijk,j,k->i", self.quadratic, x, x)

    def jacobian(self, x) -> np.ndarray:
        """d_j v^i at x, taken from jets; row i, column j."""
        comps = self(lift_x(x, 1))
        n = self.dim
        out = np.zeros((n, n))
        for i, c in enumerate(comps):
            if hasattr(c, "partials"):
                out[i] = c.partials(1, 0)
        return out

    def to_dict(self) -> dict:
        d = {"const": self.const.tolist()}
        if np.any(self.linear):
            d["linear"] = self.linear.tolist()
        if np.any(self.quadratic):
            d["quadratic"] = self.quadratic.tolist()
        return d


def constant(values, name: str = "") -> PolynomialField:
    v = np.asarray(values, dtype=float)
    f = PolynomialField.zeros(v.shape[0], name)
    return PolynomialField(v, f.linear, f.quadratic, name)


def translation(n: int, axis: int) -> PolynomialField:
    v = np.zeros(n)
    v[axis] = 1.0
    return constant(v, f"translation-{axis + 1}")


def rotation(n: int, i: int, j: int, name: str | None = None) -> PolynomialField:
    """Infinitesimal rotation in the (i, j) coordinate plane: v^i = -x^j, v^j = x^i."""
    lin = np.zeros((n, n))
    lin[i, j] = -1.0
    lin[j, i] = 1.0
    z = PolynomialField.zeros(n)
    return PolynomialField(z.const, lin, z.quadratic, name or f"rotation-{i + 1}{j + 1}")


def dilation(n: int) -> PolynomialField:
    z = PolynomialField.zeros(n)
    return PolynomialField(z.const, np.eye(n), z.quadratic, "dilation")


def from_spec(spec, n: int, name: str = "") -> PolynomialField:
    """Build a field from a coefficient table or a named shorthand.

    Shorthands: ``{"kind": "translation", "axis": k}``, ``{"kind":
    "rotation", "plane": [i, j]}``, ``{"kind": "dilation"}``,
    ``{"kind": "zero"}``; axes are 1-based as in coordinate notation.
    """
    if not isinstance(spec, dict):
        raise ConfigError(name or "field", "expected an object")
    name = spec.get("name", name)
    kind = spec.get("kind")
    if kind is not None:
        try:
            if kind == "translation":
                axis = int(spec["axis"])
                if not 1 <= axis <= n:
                    raise ConfigError(name or "field", f"axis must lie in 1..{n}, got {axis}")
                f = translation(n, axis - 1)
            elif kind == "rotation":
                i, j = (int(a) for a in spec["plane"])
                if not (1 <= i <= n and 1 <= j <= n and i != j):
                    raise ConfigError(name or "field",
                                      f"plane needs two distinct axes in 1..{n}, got {[i, j]}")
                f = rotation(n, i - 1, j - 1)
            elif kind == "dilation":
                f = dilation(n)
            elif kind == "zero":
                f = PolynomialField.zeros(n)
            else:
                raise ConfigError(name or "field", f"unknown field kind {kind!r}")
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(name or "field", f"bad {kind} shorthand: {exc}") from None
        return PolynomialField(f.const, f.linear, f.quadratic, name or f.name)
    try:
        const = np.asarray(spec.get("const", np.zeros(n)), dtype=float)
        lin = np.asarray(spec.get("linear", np.zeros((n, n))), dtype=float)
        quad = np.asarray(spec.get("quadratic", np.zeros((n, n, n))), dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(name or "field", f"non-numeric coefficient table: {exc}") from None
    if const.shape != (n,) or lin.shape != (n, n) or quad.shape != (n, n, n):
        raise ConfigError(name or "field",
                          f"coefficient table shapes must be ({n},), ({n},{n}), ({n},{n},{n})")
    if not (np.all(np.isfinite(const)) and np.all(np.isfinite(lin)) and np.all(np.isfinite(quad))):
        raise ConfigError(name or "field", "coefficients must be finite")
    return PolynomialField(const, lin, quad, name)
