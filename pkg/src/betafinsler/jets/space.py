"""Monomial bookkeeping for truncated multivariate Taylor polynomials.

A jet space is fixed by the number of x-slots and y-slots and the
truncation orders ``ox`` (total degree in x) and ``oy`` (total degree in
y).  Coefficients are stored densely, one per monomial, as Taylor
coefficients (partial derivative divided by the multi-index factorial).
"""
from __future__ import annotations

import functools
import itertools
from math import factorial

import numpy as np


def _exponents(nvars: int, order: int) -> list[tuple[int, ...]]:
    out = []
    for deg in range(order + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), deg):
            e = [0] * nvars
            for s in combo:
                e[s] += 1
            out.append(tuple(e))
    return out


class JetSpace:
    """Index tables shared by every jet living in the same truncated space."""

    def __init__(self, nx: int, ny: int, ox: int, oy: int):
        if min(nx, ny, ox, oy) < 0:
            raise ValueError("jet space parameters must be non-negative")
        self.nx, self.ny, self.ox, self.oy = nx, ny, ox, oy
        xs = _exponents(nx, ox) if nx else [()]
        ys = _exponents(ny, oy) if ny else [()]
        monos = [a + b for a in xs for b in ys]
        monos.sort(key=lambda e: (sum(e), tuple(-v for v in e)))
        self.exps = np.array(monos, dtype=np.int64).reshape(len(monos), nx + ny)
        self.size = len(monos)
        self.index = {m: k for k, m in enumerate(monos)}
        self.degree = self.exps.sum(axis=1)
        self.max_degree = int(self.degree.max()) if self.size else 0
        self.factor = np.array(
            [np.prod([factorial(int(v)) for v in e]) for e in self.exps], dtype=float
        )
        self._build_product_table()

    def __repr__(self):
        return f"JetSpace(nx={self.nx}, ny={self.ny}, ox={self.ox}, oy={self.oy})"

    @property
    def key(self):
        return (self.nx, self.ny, self.ox, self.oy)

    def _code(self, e: np.ndarray) -> np.ndarray:
        base = max(self.ox, self.oy) + 1
        weights = base ** np.arange(self.nx + self.ny, dtype=np.int64)
        return e @ weights

    def _build_product_table(self):
        nx = self.nx
        codes = self._code(self.exps)
        order = np.argsort(codes)
        sorted_codes = codes[order]
        ii, jj, kk = [], [], []
        xdeg = self.exps[:, :nx].sum(axis=1)
        ydeg = self.exps[:, nx:].sum(axis=1)
        for i in range(self.size):
            ok = (xdeg[i] + xdeg <= self.ox) & (ydeg[i] + ydeg <= self.oy)
            js = np.nonzero(ok)[0]
            c = self._code(self.exps[i] + self.exps[js])
            ks = order[np.searchsorted(sorted_codes, c)]
            ii.append(np.full(len(js), i))
            jj.append(js)
            kk.append(ks)
        self.mul_i = np.ascontiguousarray(np.concatenate(ii), dtype=np.intp)
        self.mul_j = np.ascontiguousarray(np.concatenate(jj), dtype=np.intp)
        self.mul_k = np.ascontiguousarray(np.concatenate(kk), dtype=np.intp)

    def monomial(self, xslots=(), yslots=()) -> tuple[int, ...]:
        e = [0] * (self.nx + self.ny)
        for s in xslots:
            e[s] += 1
        for s in yslots:
            e[self.nx + s] += 1
        return tuple(e)

    def partial_index(self, xslots=(), yslots=()) -> tuple[int, float]:
        """Coefficient index and factorial factor for a mixed partial."""
        m = self.monomial(xslots, yslots)
        try:
            k = self.index[m]
        except KeyError:
            raise ValueError(
                f"partial x{tuple(xslots)} y{tuple(yslots)} exceeds truncation of {self!r}"
            ) from None
        return k, float(self.factor[k])

    @functools.lru_cache(maxsize=None)
    def block(self, x_count: int, y_count: int) -> tuple[np.ndarray, np.ndarray]:
        """Index/factor arrays for the full tensor of partials of a given shape.

        The result has shape ``(nx,)*x_count + (ny,)*y_count``; entry
        ``[s, i, j]`` addresses the partial d_x^s d_y^i d_y^j.
        """
        shape = (self.nx,) * x_count + (self.ny,) * y_count
        idx = np.empty(shape, dtype=np.intp)
        fac = np.empty(shape, dtype=float)
        for multi in itertools.product(*(range(d) for d in shape)):
            k, f = self.partial_index(multi[:x_count], multi[x_count:])
            idx[multi] = k
            fac[multi] = f
        return idx, fac

    @functools.lru_cache(maxsize=None)
    def diff_table(self, which: str, slot: int):
        """Target space and (source index, multiplier) for d/dx^slot or d/dy^slot."""
        if which == "x":
            if self.ox == 0:
                raise ValueError("cannot differentiate in x: x-order already 0")
            target = jet_space(self.nx, self.ny, self.ox - 1, self.oy)
            col = slot
        else:
            if self.oy == 0:
                raise ValueError("cannot differentiate in y: y-order already 0")
            target = jet_space(self.nx, self.ny, self.ox, self.oy - 1)
            col = self.nx + slot
        src = np.empty(target.size, dtype=np.intp)
        mult = np.empty(target.size, dtype=float)
        for k, e in enumerate(target.exps):
            e2 = e.copy()
            e2[col] += 1
            src[k] = self.index[tuple(int(v) for v in e2)]
            mult[k] = e2[col]
        return target, src, mult

    @functools.lru_cache(maxsize=None)
    def truncation_map(self, target_key) -> np.ndarray:
        target = jet_space(*target_key)
        return np.array(
            [self.index[tuple(int(v) for v in e)] for e in target.exps], dtype=np.intp
        )


@functools.lru_cache(maxsize=None)
def jet_space(nx: int, ny: int, ox: int, oy: int) -> JetSpace:
    return JetSpace(nx, ny, ox, oy)
