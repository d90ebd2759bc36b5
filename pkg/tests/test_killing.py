import numpy as np
import pytest

from betafinsler import fields as fld
from betafinsler.beta_change import ChangePair, identity_change, randers_change
from betafinsler.finsler import TangentPoint, conformally_flat, euclidean, point_frame
from betafinsler.killing import (CORRECTED_WEIGHT, covariant_lowered, is_killing, killing_report,
                                 killing_residual, killing_tolerance, lie_derivative_metric,
                                 proof_lhs_bar, theorem1_residual)
from betafinsler.scenarios import get_scenario

POINT = TangentPoint([0.3, -0.4, 0.5], [1.0, 0.2, -0.5])
POINT2 = TangentPoint([0.3, -0.4], [1.0, 0.2])
RANDERS_B3 = randers_change(fld.constant([0.0, 0.0, 0.3]))


def maxabs(a):
    return float(np.max(np.abs(a)))


def test_translation_is_killing_in_flat_space():
    fr = point_frame(euclidean(3), POINT)
    assert maxabs(lie_derivative_metric(fr, fld.translation(3, 1))) < 1e-15


def test_rotation_is_killing_in_the_plane():
    fr = point_frame(euclidean(2), POINT2)
    rot = fld.rotation(2, 0, 1)
    assert np.allclose(rot.value([0.3, -0.4]), [0.4, 0.3])
    assert maxabs(lie_derivative_metric(fr, rot)) < 1e-15
    assert maxabs(killing_residual(fr, rot)) < 1e-15


def test_dilation_scales_the_metric():
    fr = point_frame(euclidean(2), POINT2)
    dil = fld.dilation(2)
    assert np.allclose(lie_derivative_metric(fr, dil), 2 * np.eye(2), atol=1e-14)
    assert np.allclose(killing_residual(fr, dil), 2 * np.eye(2), atol=1e-14)


def test_riemannian_killing_equation_is_symmetrised_derivative():
    fr = point_frame(conformally_flat(3, 0.1), POINT)
    rot = fld.rotation(3, 0, 1)
    vh = covariant_lowered(fr, rot)
    assert np.allclose(killing_residual(fr, rot), vh + vh.T, atol=1e-15)
    assert maxabs(vh + vh.T) < 1e-12


@pytest.mark.parametrize("name", ["randers-rot3", "matsumoto", "nonparallel",
                                  "randers-base-matsumoto", "custom-power-4d"])
def test_lie_derivative_equals_killing_equation(name):
    sc = get_scenario(name)
    for pt in sc.points(5):
        cp = ChangePair(sc.space, sc.change, pt, sc.bar_space)
        for v, _ in sc.fields:
            for fr in (cp.base, cp.bar):
                assert maxabs(lie_derivative_metric(fr, v) - killing_residual(fr, v)) < 1e-8


def test_randers_rotation_about_b_is_killing_in_both():
    cp = ChangePair(euclidean(3), RANDERS_B3, POINT)
    rot3 = fld.rotation(3, 0, 1)
    assert maxabs(killing_residual(cp.base, rot3)) < 1e-12
    assert maxabs(killing_residual(cp.bar, rot3)) < 1e-12


def test_killing_tolerance_scales_with_metric():
    fr = point_frame(euclidean(3), POINT)
    assert killing_tolerance(fr) == pytest.approx(2e-8)


def test_identity_change_condition_vanishes():
    cp = ChangePair(conformally_flat(3, 0.1), identity_change(fld.constant([0.1, 0, 0.2])), POINT)
    for v in (fld.rotation(3, 0, 1), fld.rotation(3, 1, 2)):
        r = killing_report(cp, v)
        assert r.base_killing and r.bar_killing
        assert maxabs(r.theorem1_residual) < 1e-12
        assert maxabs(r.transvection_residual) < 1e-12
        assert maxabs(r.corollary_b_residual) < 1e-12
        assert abs(r.orthogonality) < 1e-12


def test_rotation_off_axis_witnesses_only_if_direction():
    cp = ChangePair(euclidean(3), RANDERS_B3, POINT)
    r = killing_report(cp, fld.rotation(3, 1, 2))
    assert r.base_killing and not r.bar_killing
    # magnitudes recorded from the direct evaluation at this point
    assert maxabs(r.theorem1_residual) == pytest.approx(0.07360467515764174, rel=1e-9)
    assert maxabs(r.killing_residual_bar) == pytest.approx(0.25594503090861154, rel=1e-9)
    assert r.condition_holds(1e-7) is False


def test_hypothesis_violated_for_dilation():
    cp = ChangePair(euclidean(3), RANDERS_B3, POINT)
    r = killing_report(cp, fld.dilation(3))
    assert not r.base_killing
    assert r.condition_holds(1e-7) is None
    assert np.all(np.isfinite(r.theorem1_residual))


@pytest.mark.parametrize("name", ["randers-rot3", "conformal-rot3", "nonparallel",
                                  "rotational-form-2d"])
def test_proof_identity_on_riemannian_base(name):
    sc = get_scenario(name)
    for pt in sc.points(5):
        cp = ChangePair(sc.space, sc.change, pt, sc.bar_space)
        for v, _ in sc.fields:
            r = killing_report(cp, v)
            if r.base_killing:
                assert maxabs(r.proof_lhs_bar + 2 * r.theorem1_residual) < 1e-7


def test_proof_identity_with_cartan_base_needs_weight_four():
    sc = get_scenario("randers-base-matsumoto")
    for pt in sc.points(5):
        cp = ChangePair(sc.space, sc.change, pt, sc.bar_space)
        for v, _ in sc.fields:
            lhs = proof_lhs_bar(cp, v)
            assert maxabs(lhs + 2 * theorem1_residual(cp, v, CORRECTED_WEIGHT)) < 1e-7


@pytest.mark.parametrize("name", ["nonparallel", "randers-base-matsumoto", "matsumoto"])
def test_transvection_chain(name):
    sc = get_scenario(name)
    for pt in sc.points(5):
        cp = ChangePair(sc.space, sc.change, pt, sc.bar_space)
        for v, _ in sc.fields:
            r = killing_report(cp, v)
            n_vec = r.transvection_residual
            assert maxabs(r.theorem1_residual @ pt.y - n_vec) < 1e-10
            assert abs(n_vec @ pt.y - 2 * r.orthogonality) < 1e-10


def test_residuals_are_symmetric_and_finite():
    sc = get_scenario("randers-base-matsumoto")
    cp = ChangePair(sc.space, sc.change, sc.points(1)[0], sc.bar_space)
    r = killing_report(cp, sc.fields[0][0])
    for t in (r.killing_residual_base, r.killing_residual_bar, r.theorem1_residual,
              r.corollary_b_residual):
        assert np.all(np.isfinite(t))
        assert np.allclose(t, t.T, atol=1e-12)


@pytest.mark.parametrize("name", ["randers-rot3", "matsumoto", "custom-power-4d"])
def test_scaling_y_changes_no_verdict(name):
    sc = get_scenario(name)
    pts = sc.points(5)
    for v, _ in sc.fields:
        for space in (sc.space, sc.bar_space):
            assert is_killing(space, v, pts) == is_killing(space, v, [p.scaled(2.0) for p in pts])
