"""The beta-change L -> Lbar = f(L, beta), its closed-form tensors and difference tensors.

Two routes are kept side by side.  The *direct* route applies
:mod:`betafinsler.finsler` to ``Lbar`` itself and is authoritative.  The
*closed-form* route evaluates closed expressions in terms of the
base tensors and the scalars of :class:`BetaScalars`; its agreement with the
direct route is what the test-suite measures.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DegenerateChangeError
from .fields import PolynomialField
from .finsler import FinslerSpace, PointFrame, TangentPoint, inverse_metric, point_frame, spray_jet
from .jets import variables

TAU_FLOOR = 1e-12
BETA_FLOOR = 1e-9


@dataclass(frozen=True, eq=False)
class BetaChange:
    """Lbar = f(L, beta) with beta = b_i(x) y^i.

    ``f`` takes (L, beta) as floats, mpmath numbers or jets and must be
    positively homogeneous of degree one.
    """

    f: Callable
    b: PolynomialField
    name: str = "beta-change"
    params: dict = field(default_factory=dict)

    def beta(self, x, y):
        return sum((bi * yi for bi, yi in zip(self.b(x), y)), 0.0)

    def apply(self, space: FinslerSpace) -> FinslerSpace:
        f, L = self.f, space.L

        def Lbar(x, y):
            return f(L(x, y), self.beta(x, y))

        return FinslerSpace(space.dim, Lbar, f"{self.name}[{space.name}]")


def identity_change(b: PolynomialField) -> BetaChange:
    return BetaChange(lambda L, beta: L + 0.0 * beta, b, "identity", {"kind": "identity"})


def randers_change(b: PolynomialField) -> BetaChange:
    return BetaChange(lambda L, beta: L + beta, b, "randers", {"kind": "randers"})


def matsumoto_change(b: PolynomialField) -> BetaChange:
    return BetaChange(lambda L, beta: L * L / (L - beta), b, "matsumoto", {"kind": "matsumoto"})


def power_series_change(coeffs, b: PolynomialField) -> BetaChange:
    """f = sum_k c_k L^(1-k) beta^k, a finite (alpha, beta)-type family."""
    coeffs = [float(c) for c in coeffs]

    def f(L, beta):
        acc = coeffs[0] * L
        for k, c in enumerate(coeffs[1:], start=1):
            if c:
                acc = acc + c * beta**k * L ** (1 - k)
        return acc

    return BetaChange(f, b, "custom-power", {"kind": "custom-power", "coeffs": coeffs})


# scalars ----------------------------------------------------------------------

@dataclass(frozen=True)
class BetaScalars:
    L: float
    beta: float
    f: float
    f1: float
    f2: float
    f11: float
    f12: float
    f22: float
    p: float
    q: float
    q0: float
    q_1: float
    q_2: float
    p0: float
    p_1: float
    p_2: float
    p02: float
    dp_dbeta: float
    dp_1_dbeta: float
    dp_2_dbeta: float
    b2: float
    nu: float
    tau: float
    s0: float
    s0_uncorrected: float
    s_1: float
    s_2: float
    b_low: np.ndarray
    b_up: np.ndarray
    y_low: np.ndarray
    m: np.ndarray
    m_up: np.ndarray
    Q: np.ndarray

    @property
    def beta_singular(self) -> bool:
        return not np.isfinite(self.s_2)


def f_partials(change: BetaChange, L: float, beta: float):
    """f and its (L, beta)-partials up to order two, plus beta-derivatives
    (L held fixed) of p, p0, p_{-1}, p_{-2} taken on jets of order three."""
    Lj, bj = variables([L, beta], 3)
    F = change.f(Lj, bj)
    F1, F2 = F.dy(0), F.dy(1)
    p = F * F1 / Lj
    p0 = F * F2.dy(1) + F2 * F2
    p_1 = F * F1.dy(1) / Lj + p * F2 / F
    p_2 = F * (F1.dy(0) - F1 / Lj) / Lj**2 + p * p / (F * F)
    return dict(
        f=F.value, f1=F.partial(y=(0,)), f2=F.partial(y=(1,)),
        f11=F.partial(y=(0, 0)), f12=F.partial(y=(0, 1)), f22=F.partial(y=(1, 1)),
        p02=p0.partial(y=(1,)), dp_dbeta=p.partial(y=(1,)),
        dp_1_dbeta=p_1.partial(y=(1,)), dp_2_dbeta=p_2.partial(y=(1,)),
    )


def beta_scalars(space: FinslerSpace, change: BetaChange, point: TangentPoint,
                 frame: PointFrame | None = None) -> BetaScalars:
    frame = frame or point_frame(space, point)
    x, y = point.x, point.y
    L = frame.L
    b_low = change.b.value(x)
    beta = float(b_low @ y)
    d = f_partials(change, L, beta)
    f, f1, f2, f11, f12, f22 = (d[k] for k in ("f", "f1", "f2", "f11", "f12", "f22"))
    if not f > 0:
        raise DegenerateChangeError("nonpositive-Lbar", f"Lbar = {f!r} <= 0 at x={x}, y={y}")
    if not f1 > 0:
        raise DegenerateChangeError("nonpositive-f1", f"f_1 = {f1!r} <= 0 at x={x}, y={y}")
    p = f * f1 / L
    q = f * f2
    q0 = f * f22
    q_1 = f * f12 / L
    q_2 = f * (f11 - f1 / L) / L**2
    p0 = q0 + f2**2
    p_1 = q_1 + p * f2 / f
    p_2 = q_2 + p**2 / f**2
    b_up = frame.g_inv @ b_low
    b2 = float(b_low @ b_up)
    nu = b2 - beta**2 / L**2
    Lbar = f
    tau = Lbar**2 * (p + nu * q0) / L**2
    if abs(tau) <= TAU_FLOOR * max(1.0, abs(Lbar**2 * p / L**2)):
        raise DegenerateChangeError("tau-zero", f"tau = {tau!r} vanishes at x={x}, y={y}")
    denom = tau * p * L**2
    s0 = Lbar**2 * q0 / denom
    s0_uncorrected = Lbar * q0 / denom
    s_1 = p_1 * Lbar**2 / denom
    if abs(beta) > BETA_FLOOR * L:
        s_2 = p_1 * (nu * p * L**2 - b2 * Lbar**2) / (denom * beta)
    else:
        s_2 = float("nan")
    y_low = frame.y_low
    m = b_low - beta / L**2 * y_low
    m_up = frame.g_inv @ m
    Q = s0 * b_up + s_1 * y
    return BetaScalars(L=L, beta=beta, f=f, f1=f1, f2=f2, f11=f11, f12=f12, f22=f22,
                       p=p, q=q, q0=q0, q_1=q_1, q_2=q_2, p0=p0, p_1=p_1, p_2=p_2,
                       p02=d["p02"], dp_dbeta=d["dp_dbeta"], dp_1_dbeta=d["dp_1_dbeta"],
                       dp_2_dbeta=d["dp_2_dbeta"], b2=b2, nu=nu, tau=tau, s0=s0, s0_uncorrected=s0_uncorrected,
                       s_1=s_1, s_2=s_2, b_low=b_low, b_up=b_up, y_low=y_low, m=m,
                       m_up=m_up, Q=Q)


# closed forms -------------------------------------------------------------------

def beta_angular_metric(sc: BetaScalars, h: np.ndarray) -> np.ndarray:
    return sc.p * h + sc.q0 * np.outer(sc.m, sc.m)


def beta_metric(sc: BetaScalars, g: np.ndarray) -> np.ndarray:
    b, yl = sc.b_low, sc.y_low
    return (sc.p * g + sc.p0 * np.outer(b, b)
            + sc.p_1 * (np.outer(b, yl) + np.outer(yl, b)) + sc.p_2 * np.outer(yl, yl))


def beta_inverse_metric(gbar: np.ndarray) -> np.ndarray:
    """Authoritative inverse: numerical LU inverse of gbar_ij."""
    return inverse_metric(gbar)


def closed_inverse_metric(sc: BetaScalars, g_inv: np.ndarray, y: np.ndarray,
                          uncorrected: bool = False) -> np.ndarray:
    """Diagnostic inverse from the s-coefficients (nan when beta = 0)."""
    s0 = sc.s0_uncorrected if uncorrected else sc.s0
    bu = sc.b_up
    return (g_inv / sc.p - s0 * np.outer(bu, bu)
            - sc.s_1 * (np.outer(bu, y) + np.outer(y, bu)) - sc.s_2 * np.outer(y, y))


def _cyclic_hm(h, m):
    return (np.einsum("ij,k->ijk", h, m) + np.einsum("jk,i->ijk", h, m)
            + np.einsum("ki,j->ijk", h, m))


def beta_cartan(sc: BetaScalars, frame: PointFrame) -> np.ndarray:
    m = sc.m
    return (sc.p * frame.C + 0.5 * sc.p_1 * _cyclic_hm(frame.h, m)
            + 0.5 * sc.p02 * np.einsum("i,j,k->ijk", m, m, m))


def v_tensor(sc: BetaScalars, frame: PointFrame, uncorrected: bool = False) -> np.ndarray:
    """V^h_ij with Cbar^h_ij = C^h_ij - V^h_ij, indexed [h, i, j].

    ``uncorrected=True`` evaluates an uncorrected variant (opposite sign
    on the Q^h m_i m_j term, p_{-2} in place of p_{-1} on h_ij, and Lbar in
    place of Lbar^2 in s0); it is kept only for the deviation report.
    """
    m, p = sc.m, sc.p
    mm = np.outer(m, m)
    Cb = np.einsum("imj,m->ij", frame.C, sc.b_up)
    hh = np.einsum("hr,ir->hi", frame.g_inv, frame.h)  # h^h_i
    if uncorrected:
        Q = sc.s0_uncorrected * sc.b_up + sc.s_1 * frame.y
        sign, coef_h = -1.0, sc.p_2
    else:
        Q = sc.Q
        sign, coef_h = 1.0, sc.p_1
    raised = sc.m_up / p - sc.nu * Q  # equals gbar^{hr} m_r
    return (np.einsum("h,ij->hij", Q, p * Cb + sign * sc.p_1 * mm)
            - 0.5 * np.einsum("h,ij->hij", raised, sc.p02 * mm + coef_h * frame.h)
            - sc.p_1 * (np.einsum("hi,j->hij", hh, m) + np.einsum("hj,i->hij", hh, m)) / (2 * p))


def beta_associate_cartan(sc: BetaScalars, frame: PointFrame) -> np.ndarray:
    return frame.C_assoc - v_tensor(sc, frame)


# difference tensors -------------------------------------------------------------------

def one_form_hcov(frame: PointFrame, b: PolynomialField) -> np.ndarray:
    """b_{i|j} for an x-only 1-form, indexed [i, j]."""
    x = frame.point.x
    n = frame.point.dim
    return frame.hcov(b.value(x), b.jacobian(x).T, np.zeros((n, n)))


@dataclass
class DifferenceTensors:
    D: np.ndarray        # D^i
    Dn: np.ndarray       # D^i_j, indexed [i, j]
    Dc: np.ndarray       # D^i_jk, indexed [i, j, k]
    E: np.ndarray
    F: np.ndarray        # F_jk (antisymmetric part of b_{j|k})
    F_up: np.ndarray     # F^i_j
    V: np.ndarray        # V^h_ij from Cbar^h = C^h - V, direct route
    b_hcov: np.ndarray


class ChangePair:
    """Base and changed frames at one point with every derived quantity cached."""

    def __init__(self, space: FinslerSpace, change: BetaChange, point: TangentPoint,
                 bar_space: FinslerSpace | None = None):
        self.space = space
        self.change = change
        self.point = point
        self.bar_space = bar_space or change.apply(space)
        self.base = point_frame(space, point)
        self.bar = point_frame(self.bar_space, point)

    @functools.cached_property
    def scalars(self) -> BetaScalars:
        return beta_scalars(self.space, self.change, self.point, self.base)

    @functools.cached_property
    def differences(self) -> DifferenceTensors:
        base, bar = self.base, self.bar
        bh = one_form_hcov(base, self.change.b)
        E = 0.5 * (bh + bh.T)
        F = 0.5 * (bh - bh.T)
        return DifferenceTensors(
            D=bar.G - base.G, Dn=bar.N - base.N, Dc=bar.F - base.F,
            E=E, F=F, F_up=base.g_inv @ F,
            V=base.C_assoc - bar.C_assoc, b_hcov=bh,
        )

    def spray_difference_jet(self):
        """D^i as jets of y-order one, from the two sprays independently."""
        Gb = spray_jet(self.bar_space, self.point)
        G = spray_jet(self.space, self.point)
        return [a - b for a, b in zip(Gb, G)]

    # closed-form difference tensors, diagnostic only ---------------------------

    def closed_difference_vector(self) -> np.ndarray:
        return _closed_D(self.base, self.scalars, self.differences)

    def closed_difference_nlc(self, h: float = 1e-5) -> np.ndarray:
        """d/dy^j of the closed-form D^i by Richardson central differences."""
        n = self.point.dim
        x, y = self.point.x, self.point.y
        step = h * np.linalg.norm(y)

        def Dc(yy):
            pt = TangentPoint(x, yy)
            fr = point_frame(self.space, pt)
            sc = beta_scalars(self.space, self.change, pt, fr)
            bh = one_form_hcov(fr, self.change.b)
            F = 0.5 * (bh - bh.T)
            d = DifferenceTensors(None, None, None, 0.5 * (bh + bh.T), F, fr.g_inv @ F,
                                  None, bh)
            return _closed_D(fr, sc, d)

        out = np.zeros((n, n))
        for j in range(n):
            e = np.zeros(n)
            e[j] = step
            d1 = (Dc(y + e) - Dc(y - e)) / (2 * step)
            d2 = (Dc(y + 2 * e) - Dc(y - 2 * e)) / (4 * step)
            out[:, j] = (4 * d1 - d2) / 3
        return out

    def closed_difference_connection(self, reading: str = "lowered", h: float = 1e-5) -> np.ndarray:
        """The closed bracket expression for D^i_jk, diagnostic only.

        ``reading="lowered"``: Q_k = g_kr Q^r and B_kj = 2 dQ_k/dy^j (by
        Richardson differences), prefactor with the s-coefficients.
        ``reading="expanded"``: Q_k = p0 b_k + p_{-1} y_k, B_kj = (1/2)
        d(gbar_kj)/dbeta at fixed L, prefactor gbar^{is}; this is the form
        obtained by expanding the h-covariant derivatives of gbar_ij.

        Both take D^r_s from the direct route and read V_jkr as
        Cbar_jkr - p C_jkr, so only the bracket's own reading is measured.
        """
        base, sc, dt = self.base, self.scalars, self.differences
        n = self.point.dim
        x, y = self.point.x, self.point.y
        if reading == "lowered":
            Q_low = base.g @ sc.Q
            step = h * np.linalg.norm(y)

            def q_low(yy):
                pt = TangentPoint(x, yy)
                fr = point_frame(self.space, pt)
                return fr.g @ beta_scalars(self.space, self.change, pt, fr).Q

            B = np.zeros((n, n))  # B[k, j]
            for j in range(n):
                e = np.zeros(n)
                e[j] = step
                d1 = (q_low(y + e) - q_low(y - e)) / (2 * step)
                d2 = (q_low(y + 2 * e) - q_low(y - 2 * e)) / (4 * step)
                B[:, j] = 2 * (4 * d1 - d2) / 3
            bu = sc.b_up
            pref = (base.g_inv / sc.p - np.outer(sc.Q, bu)
                    - np.outer(sc.s_1 * bu + sc.s_2 * y, y))
        elif reading == "expanded":
            b, yl = sc.b_low, sc.y_low
            Q_low = sc.p0 * b + sc.p_1 * yl
            B = 0.5 * (sc.dp_dbeta * base.g + sc.p02 * np.outer(b, b)
                       + sc.dp_1_dbeta * (np.outer(b, yl) + np.outer(yl, b))
                       + sc.dp_2_dbeta * np.outer(yl, yl))
            pref = self.bar.g_inv
        else:
            raise ValueError(f"unknown reading {reading!r}")
        b0 = y @ dt.b_hcov  # b_{0|k}
        Cbar = sc.p * base.C + self.v_lower()
        Dn = dt.Dn  # [r, s] = D^r_s
        E, F = dt.E, dt.F
        T = (np.einsum("sj,k->sjk", B, b0) + np.einsum("sk,j->sjk", B, b0)
             - np.einsum("kj,s->sjk", B, b0)
             + np.einsum("sj,k->sjk", F, Q_low) + np.einsum("sk,j->sjk", F, Q_low)
             + np.einsum("kj,s->sjk", E, Q_low)
             + np.einsum("jkr,rs->sjk", Cbar, Dn)
             - np.einsum("skm,mj->sjk", Cbar, Dn) - np.einsum("sjm,mk->sjk", Cbar, Dn))
        return np.einsum("is,sjk->ijk", pref, T)

    def v_lower(self) -> np.ndarray:
        sc = self.scalars
        return beta_cartan(sc, self.base) - sc.p * self.base.C


def _closed_D(frame: PointFrame, sc: BetaScalars, d: DifferenceTensors) -> np.ndarray:
    y = frame.y
    F0_up = d.F_up @ y
    E00 = y @ d.E @ y
    Fr0 = d.F @ y  # F_{r0}
    return (sc.q / sc.p) * F0_up + (sc.p * E00 - 2 * sc.q * (Fr0 @ sc.b_up)) * sc.Q / 2


def difference_vector(space, change, point):
    return ChangePair(space, change, point).differences.D


def difference_nlc(space, change, point):
    return ChangePair(space, change, point).differences.Dn


def difference_connection(space, change, point):
    return ChangePair(space, change, point).differences.Dc
