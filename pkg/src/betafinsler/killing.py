"""Killing vector fields under a beta-change: residual tensors and verdicts.

Every claim is represented by a residual whose vanishing is the claim.
``killing_residual`` applied to the changed space (lowering with gbar) is
the Killing equation of that space; ``proof_lhs_bar`` is the expression
obtained by expanding the changed-space equation with the base metric, which lowers v with the *base* metric and
differentiates with the changed connection.  The two differ in general,
and reports keep both.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .beta_change import ChangePair
from .fields import PolynomialField
from .finsler import FinslerSpace, PointFrame, TangentPoint, lowered_field, point_frame

KILLING_RTOL = 1e-8
# contraction weight of the Cbar^h_ij (C_rhl v^l D^r) term
DEFAULT_WEIGHT = 2.0
CORRECTED_WEIGHT = 4.0


def killing_tolerance(frame: PointFrame, rtol: float = KILLING_RTOL) -> float:
    return rtol * (1.0 + float(np.abs(frame.g).max()))


def lie_derivative_metric(frame: PointFrame, v: PolynomialField) -> np.ndarray:
    """Lie derivative of g_ij along the complete lift of v^i(x)."""
    x, y, g = frame.point.x, frame.y, frame.g
    vv = v.value(x)
    J = v.jacobian(x)  # [r, s] = d_s v^r
    return (np.einsum("r,rij->ij", vv, frame.dg_x) + J.T @ g + g @ J
            + 2.0 * np.einsum("ijr,r->ij", frame.C, J @ y))


def covariant_lowered(frame: PointFrame, v: PolynomialField, connection: PointFrame | None = None):
    """v_{i|j} of v_i = g_il v^l (g from ``frame``) under ``connection``'s h-derivative."""
    connection = connection or frame
    w, dw_x, dw_y = lowered_field(frame, v)
    return connection.hcov(w, dw_x, dw_y)


def killing_residual(frame: PointFrame, v: PolynomialField) -> np.ndarray:
    """v_i|j + v_j|i + 2 C^h_ij v_h|0 in the space of ``frame``."""
    vh = covariant_lowered(frame, v)
    v0 = vh @ frame.y
    return vh + vh.T + 2.0 * np.einsum("hij,h->ij", frame.C_assoc, v0)


def proof_lhs_bar(pair: ChangePair, v: PolynomialField) -> np.ndarray:
    """v_i||j + v_j||i + 2 Cbar^h_ij v_h||0 with v_i lowered by the base metric."""
    vh = covariant_lowered(pair.base, v, connection=pair.bar)
    v0 = vh @ pair.point.y
    return vh + vh.T + 2.0 * np.einsum("hij,h->ij", pair.bar.C_assoc, v0)


def _pieces(pair: ChangePair, v: PolynomialField):
    base = pair.base
    d = pair.differences
    vv = v.value(pair.point.x)
    v_low = base.g @ vv
    v0 = covariant_lowered(base, v) @ pair.point.y  # v_{h|0}
    CvDn = np.einsum("rjl,l,ri->ij", base.C, vv, d.Dn)  # C_rjl v^l D^r_i
    first = (np.einsum("hij,h->ij", d.V, v0) + CvDn + CvDn.T
             + np.einsum("r,rij->ij", v_low, d.Dc))
    CvD = np.einsum("rhl,l,r->h", base.C, vv, d.D)  # C_rhl v^l D^r
    vDn = v_low @ d.Dn  # v_r D^r_h
    return first, CvD, vDn, v_low


def theorem1_residual(pair: ChangePair, v: PolynomialField,
                      weight: float = DEFAULT_WEIGHT) -> np.ndarray:
    """V^h_ij v_h|0 + C_rjl v^l D^r_i + C_ril v^l D^r_j + v_r D^r_ij
    + Cbar^h_ij (w C_rhl v^l D^r + v_r D^r_h), with w = 2 by default.

    Passing ``weight=CORRECTED_WEIGHT`` uses D^r_0 = 2 D^r when contracting
    v_h||0, which is what the expansion of v_h||0 actually yields.
    """
    first, CvD, vDn, _ = _pieces(pair, v)
    return first + np.einsum("hij,h->ij", pair.bar.C_assoc, weight * CvD + vDn)


def corollary_checks(pair: ChangePair, v: PolynomialField):
    """(transvection residual [j], reduced-condition residual [i, j], v_r D^r)."""
    first, CvD, vDn, v_low = _pieces(pair, v)
    d = pair.differences
    transvection = 2.0 * np.einsum("rjl,l,r->j", pair.base.C, v.value(pair.point.x), d.D) + vDn
    return transvection, first, float(v_low @ d.D)


@dataclass
class KillingReport:
    point: TangentPoint
    killing_residual_base: np.ndarray
    killing_residual_bar: np.ndarray
    lie_base: np.ndarray
    lie_bar: np.ndarray
    proof_lhs_bar: np.ndarray
    theorem1_residual: np.ndarray
    theorem1_corrected: np.ndarray
    corollary_b_residual: np.ndarray
    transvection_residual: np.ndarray
    orthogonality: float
    tol_base: float
    tol_bar: float

    @property
    def base_killing(self) -> bool:
        return _maxabs(self.killing_residual_base) < self.tol_base

    @property
    def bar_killing(self) -> bool:
        return _maxabs(self.killing_residual_bar) < self.tol_bar

    def condition_holds(self, tol: float, corrected: bool = False) -> bool | None:
        """Condition verdict, or None when the base hypothesis fails."""
        if not self.base_killing:
            return None
        r = self.theorem1_corrected if corrected else self.theorem1_residual
        return _maxabs(r) < tol


def _maxabs(a) -> float:
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


def killing_report(pair: ChangePair, v: PolynomialField, rtol: float = KILLING_RTOL) -> KillingReport:
    base, bar = pair.base, pair.bar
    transvection, corb, orth = corollary_checks(pair, v)
    return KillingReport(
        point=pair.point,
        killing_residual_base=killing_residual(base, v),
        killing_residual_bar=killing_residual(bar, v),
        lie_base=lie_derivative_metric(base, v),
        lie_bar=lie_derivative_metric(bar, v),
        proof_lhs_bar=proof_lhs_bar(pair, v),
        theorem1_residual=theorem1_residual(pair, v),
        theorem1_corrected=theorem1_residual(pair, v, CORRECTED_WEIGHT),
        corollary_b_residual=corb,
        transvection_residual=transvection,
        orthogonality=orth,
        tol_base=killing_tolerance(base, rtol),
        tol_bar=killing_tolerance(bar, rtol),
    )


def is_killing(space: FinslerSpace, v: PolynomialField, points, rtol: float = KILLING_RTOL) -> bool:
    """Direct-oracle verdict: Lie derivative of g vanishes at every point."""
    for pt in points:
        fr = point_frame(space, pt)
        if _maxabs(lie_derivative_metric(fr, v)) >= killing_tolerance(fr, rtol):
            return False
    return True
