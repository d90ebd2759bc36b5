"""Tensors of a Finsler space computed from the fundamental function alone.

Everything is derived from the derivatives of ``Phi = L^2 / 2`` at a tangent
point, up to one order in x and three in y.  Those derivatives come either
from jets (the production path) or from finite differences (the oracle).
"""
from __future__ import annotations

import functools
import itertools
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .errors import DegenerateMetricError
from .jets import Jet, fd, lift
from .jets import linalg as jet_linalg

DET_FLOOR = 1e-12
COND_WARN = 1e10


@dataclass(frozen=True, eq=False)
class TangentPoint:
    """A base point x with a nonzero supporting element y."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=float).reshape(-1)
        y = np.array(self.y, dtype=float).reshape(-1)
        if x.shape != y.shape:
            raise ValueError(f"x and y must have equal length, got {x.shape} and {y.shape}")
        if not np.any(y):
            raise ValueError("supporting element y must be nonzero")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def dim(self) -> int:
        return self.x.shape[0]

    def scaled(self, lam: float) -> "TangentPoint":
        return TangentPoint(self.x, lam * self.y)

    def to_dict(self) -> dict:
        return {"x": self.x.tolist(), "y": self.y.tolist()}


@dataclass(frozen=True, eq=False)
class FinslerSpace:
    """Fundamental function ``L(x, y)`` on an n-dimensional chart.

    ``fundamental`` receives sequences of coordinates which may be floats,
    mpmath numbers or jets, and must only combine them arithmetically
    (use ``**0.5`` or :func:`betafinsler.jets.sqrt` for roots).
    """

    dim: int
    fundamental: Callable
    name: str = "finsler"

    def L(self, x, y):
        return self.fundamental(x, y)

    def frame(self, point: TangentPoint, method: str = "jet") -> "PointFrame":
        return point_frame(self, point, method)


# built-in fundamental functions ------------------------------------------

def _quad(a, y):
    n = len(y)
    acc = 0.0
    for i in range(n):
        for j in range(n):
            aij = a[i][j]
            if isinstance(aij, (int, float)) and aij == 0:
                continue
            acc = acc + aij * y[i] * y[j]
    return acc


def euclidean(n: int) -> FinslerSpace:
    return FinslerSpace(n, lambda x, y: sum((t * t for t in y), 0.0) ** 0.5, "euclidean")


def riemannian(a, n: int | None = None, name: str = "riemannian") -> FinslerSpace:
    """L = sqrt(a_ij(x) y^i y^j) for a constant SPD matrix or a callable a(x)."""
    if callable(a):
        if n is None:
            raise ValueError("dimension required for a callable metric")
        return FinslerSpace(n, lambda x, y: _quad(a(x), y) ** 0.5, name)
    a = np.asarray(a, dtype=float)
    rows = a.tolist()
    return FinslerSpace(a.shape[0], lambda x, y: _quad(rows, y) ** 0.5, name)


def conformal_factor(c: float):
    def phi(x):
        return 1.0 + c * sum((t * t for t in x), 0.0)
    return phi


def conformally_flat(n: int, c: float) -> FinslerSpace:
    """Riemannian a_ij = (1 + c |x|^2) delta_ij."""
    phi = conformal_factor(c)
    return FinslerSpace(n, lambda x, y: (phi(x) * sum((t * t for t in y), 0.0)) ** 0.5,
                        f"conformal({c})")


def randers_space(a, b, name: str = "randers") -> FinslerSpace:
    """L = sqrt(a_ij y^i y^j) + b_i(x) y^i with constant a and polynomial b."""
    a = np.asarray(a, dtype=float)
    rows = a.tolist()

    def L(x, y):
        bx = b(x)
        return _quad(rows, y) ** 0.5 + sum((bi * yi for bi, yi in zip(bx, y)), 0.0)

    return FinslerSpace(a.shape[0], L, name)


# derivative blocks --------------------------------------------------------

@dataclass(frozen=True)
class DerivativeBlocks:
    """Partials of Phi = L^2/2 at a point; x-index first, then y-indices."""

    L: float
    phi_y: np.ndarray     # [i]
    phi_yy: np.ndarray    # [i, j]
    phi_yyy: np.ndarray   # [i, j, k]
    phi_x: np.ndarray     # [s]
    phi_xy: np.ndarray    # [s, i]
    phi_xyy: np.ndarray   # [s, i, j]


def phi_jet(space: FinslerSpace, point: TangentPoint, x_order: int = 1, y_order: int = 3):
    xs, ys = lift(point, x_order, y_order)
    Lj = space.L(xs, ys)
    if not isinstance(Lj, Jet):
        Lj = Jet.constant(xs[0].space, float(Lj))
    if not Lj.value > 0:
        raise DegenerateMetricError(f"L must be positive, got {Lj.value!r}")
    return Lj, 0.5 * Lj * Lj, xs, ys


def jet_blocks(space: FinslerSpace, point: TangentPoint) -> DerivativeBlocks:
    Lj, phi, _, _ = phi_jet(space, point)
    return DerivativeBlocks(
        L=Lj.value,
        phi_y=phi.partials(0, 1),
        phi_yy=phi.partials(0, 2),
        phi_yyy=phi.partials(0, 3),
        phi_x=phi.partials(1, 0),
        phi_xy=phi.partials(1, 1),
        phi_xyy=phi.partials(1, 2),
    )


def fd_blocks(space: FinslerSpace, point: TangentPoint, h: float = fd.DEFAULT_STEP,
              dps: int = fd.DEFAULT_DPS) -> DerivativeBlocks:
    """Same blocks by central differences on mpmath evaluations of L."""
    n = point.dim

    def phi(*args):
        L = space.L(list(args[:n]), list(args[n:]))
        return L * L / 2

    args = list(point.x) + list(point.y)
    cache: dict[tuple, float] = {}

    def d(xslots, yslots):
        key = tuple(sorted(xslots)) + tuple(sorted(n + s for s in yslots))
        if key not in cache:
            cache[key] = fd.central_partial(phi, args, list(key), h=h, dps=dps)
        return cache[key]

    def block(xc, yc):
        shape = (n,) * (xc + yc)
        out = np.empty(shape)
        for multi in itertools.product(range(n), repeat=xc + yc):
            out[multi] = d(multi[:xc], multi[xc:])
        return out

    Lval = float(space.L(list(point.x), list(point.y)))
    return DerivativeBlocks(Lval, block(0, 1), block(0, 2), block(0, 3),
                            block(1, 0), block(1, 1), block(1, 2))


# the frame ------------------------------------------------------------------

def inverse_metric(g: np.ndarray) -> np.ndarray:
    """LU inverse with a scale-free degeneracy test and a conditioning warning."""
    d = np.sqrt(np.abs(np.diag(g)))
    if np.any(d == 0):
        raise DegenerateMetricError("metric has a vanishing diagonal entry")
    normalized = g / np.outer(d, d)
    if abs(np.linalg.det(normalized)) < DET_FLOOR:
        raise DegenerateMetricError("metric tensor is singular at this point")
    cond = np.linalg.cond(g)
    if cond > COND_WARN:
        warnings.warn(f"metric condition number {cond:.3g} exceeds {COND_WARN:g}", stacklevel=2)
    lu = scipy.linalg.lu_factor(g)
    inv = scipy.linalg.lu_solve(lu, np.eye(g.shape[0]))
    return 0.5 * (inv + inv.T)


class PointFrame:
    """Tensor fields of a Finsler space at one tangent point, computed lazily."""

    def __init__(self, point: TangentPoint, blocks: DerivativeBlocks):
        self.point = point
        self.blocks = blocks
        self.L = blocks.L

    @property
    def y(self):
        return self.point.y

    @functools.cached_property
    def y_low(self):
        return self.blocks.phi_y

    @functools.cached_property
    def g(self):
        g = self.blocks.phi_yy
        return 0.5 * (g + g.T)

    @functools.cached_property
    def g_inv(self):
        return inverse_metric(self.g)

    @functools.cached_property
    def h(self):
        return self.g - np.outer(self.y_low, self.y_low) / self.L**2

    @functools.cached_property
    def C(self):
        return 0.5 * self.blocks.phi_yyy

    @functools.cached_property
    def C_assoc(self):
        """C^h_ij = g^{hr} C_rij, indexed [h, i, j]."""
        return np.einsum("hr,rij->hij", self.g_inv, self.C)

    @functools.cached_property
    def dg_x(self):
        """d_s g_ij indexed [s, i, j]."""
        return self.blocks.phi_xyy

    @functools.cached_property
    def _spray_source(self):
        b = self.blocks
        return b.phi_xy.T @ self.y - b.phi_x

    @functools.cached_property
    def G(self):
        return 0.5 * self.g_inv @ self._spray_source

    @functools.cached_property
    def N(self):
        """N^i_j = dG^i/dy^j, indexed [i, j]."""
        b = self.blocks
        dA = b.phi_xy.T + np.einsum("s,srj->rj", self.y, b.phi_xyy) - b.phi_xy
        return 0.5 * self.g_inv @ dA - 2.0 * np.einsum("ijb,b->ij", self.C_assoc, self.G)

    @functools.cached_property
    def delta_g(self):
        """delta_j g_hk = d_j g_hk - N^r_j dg_hk/dy^r, indexed [j, h, k]."""
        return self.dg_x - 2.0 * np.einsum("rj,hkr->jhk", self.N, self.C)

    @functools.cached_property
    def F(self):
        """Cartan connection F^i_jk, indexed [i, j, k]."""
        dg = self.delta_g
        T = dg + dg.transpose(2, 1, 0) - dg.transpose(1, 0, 2)
        return 0.5 * np.einsum("ih,jhk->ijk", self.g_inv, T)

    def hcov(self, w, dw_x, dw_y):
        """h-covariant derivative w_{i|j} of a covector with known partials.

        ``dw_x[j, i] = d_j w_i`` and ``dw_y[r, i] = dw_i/dy^r``; result is [i, j].
        """
        return dw_x.T - dw_y.T @ self.N - np.einsum("r,rij->ij", w, self.F)

    @functools.cached_property
    def g_hcov(self):
        """g_ij|k indexed [i, j, k]; vanishes for the Cartan connection."""
        dg = self.delta_g.transpose(1, 2, 0)
        return (dg - np.einsum("rj,rik->ijk", self.g, self.F)
                - np.einsum("ir,rjk->ijk", self.g, self.F))


def point_frame(space: FinslerSpace, point: TangentPoint, method: str = "jet") -> PointFrame:
    if point.dim != space.dim:
        raise ValueError(f"point has dimension {point.dim}, space has {space.dim}")
    if method == "jet":
        blocks = jet_blocks(space, point)
    elif method == "fd":
        blocks = fd_blocks(space, point)
    else:
        raise ValueError(f"unknown method {method!r}")
    return PointFrame(point, blocks)


# operation-level API ----------------------------------------------------------

def metric_tensor(space, point, method="jet"):
    fr = point_frame(space, point, method)
    fr.g_inv  # raises on degeneracy
    return fr.g


def angular_metric(frame: PointFrame):
    return frame.h


def cartan_tensor(space, point, method="jet"):
    return point_frame(space, point, method).C


def associate_cartan(frame: PointFrame):
    return frame.C_assoc


def spray(space, point, method="jet"):
    return point_frame(space, point, method).G


def nonlinear_connection(space, point, method="jet"):
    return point_frame(space, point, method).N


def cartan_connection(space, point, method="jet"):
    return point_frame(space, point, method).F


def spray_jet(space: FinslerSpace, point: TangentPoint) -> list[Jet]:
    """Spray coefficients as jets of y-order one (value and dG^i/dy^j)."""
    _, phi, _, ys = phi_jet(space, point)
    n = space.dim
    g = [[phi.dy(i).dy(j).truncate(0, 1) for j in range(n)] for i in range(n)]
    A = []
    for r in range(n):
        acc = -phi.dx(r).truncate(0, 1)
        for s in range(n):
            acc = acc + ys[s] * phi.dx(s).dy(r)
        A.append(acc.truncate(0, 1))
    ginv = jet_linalg.inverse(g)
    G = []
    for i in range(n):
        acc = ginv[i][0] * A[0]
        for r in range(1, n):
            acc = acc + ginv[i][r] * A[r]
        G.append(0.5 * acc)
    return G


def hcov_covector(space: FinslerSpace, point: TangentPoint, w, frame: PointFrame | None = None):
    """w_{i|j} for a covector field ``w(x, y)`` evaluable on jets."""
    frame = frame or point_frame(space, point)
    # full y-order so that w itself may take y-derivatives (e.g. y_i = dPhi/dy^i)
    xs, ys = lift(point, 1, 3)
    comps = w(xs, ys)
    n = space.dim
    val = np.zeros(n)
    dw_x = np.zeros((n, n))
    dw_y = np.zeros((n, n))
    for i, c in enumerate(comps):
        if isinstance(c, Jet):
            val[i] = c.value
            dw_x[:, i] = c.partials(1, 0)
            dw_y[:, i] = c.partials(0, 1)
        else:
            val[i] = float(c)
    return frame.hcov(val, dw_x, dw_y)


def lowered_field(frame: PointFrame, v):
    """v_i = g_il v^l with its x- and y-partials, for a field v^l(x)."""
    x = frame.point.x
    vv = v.value(x)
    J = v.jacobian(x)  # [l, j] = d_j v^l
    w = frame.g @ vv
    dw_x = np.einsum("jil,l->ji", frame.dg_x, vv) + (frame.g @ J).T
    dw_y = 2.0 * np.einsum("ilr,l->ri", frame.C, vv)
    return w, dw_x, dw_y
