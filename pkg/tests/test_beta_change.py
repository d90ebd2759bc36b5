import numpy as np
import pytest

from betafinsler import fields as fld
from betafinsler.beta_change import (ChangePair, beta_angular_metric, beta_associate_cartan,
                                     beta_cartan, beta_inverse_metric, beta_metric, beta_scalars,
                                     closed_inverse_metric, difference_connection,
                                     difference_nlc, difference_vector, identity_change,
                                     matsumoto_change, power_series_change, randers_change,
                                     v_tensor)
from betafinsler.errors import DegenerateChangeError
from betafinsler.finsler import TangentPoint, conformally_flat, euclidean, point_frame
from betafinsler.jets.fd import central_partial

from helpers import rel_err

POINT = TangentPoint([0.3, -0.4, 0.5], [1.0, 0.2, -0.5])
B_CONST = fld.constant([0.1, 0.0, 0.3])
B_NONPAR = fld.PolynomialField(np.zeros(3), np.array([[0, 0.1, 0], [0, 0, 0], [0, 0, 0]]),
                               np.zeros((3, 3, 3)))
B_CLOSED = fld.PolynomialField(np.array([0.05, 0.0, 0.1]), 0.1 * np.eye(3), np.zeros((3, 3, 3)))


def pair(space, change, point=POINT):
    return ChangePair(space, change, point)


def test_identity_scalars():
    sc = beta_scalars(euclidean(3), identity_change(B_CONST), POINT)
    L = sc.L
    assert sc.p == pytest.approx(1.0)
    for name in ("q0", "q_1", "f2", "p0", "p_1", "p_2", "q"):
        assert getattr(sc, name) == pytest.approx(0.0, abs=1e-15), name
    # the definition gives q_{-2} = -1/L^2, cancelled by p^2/f^2 in p_{-2}
    assert sc.q_2 == pytest.approx(-1.0 / L ** 2)
    fr = point_frame(euclidean(3), POINT)
    assert np.allclose(beta_metric(sc, fr.g), fr.g, atol=1e-14)


def test_randers_scalars():
    sc = beta_scalars(euclidean(3), randers_change(B_CONST), POINT)
    assert (sc.f1, sc.f2) == (pytest.approx(1.0), pytest.approx(1.0))
    for name in ("f11", "f12", "f22", "q0"):
        assert getattr(sc, name) == pytest.approx(0.0, abs=1e-15)
    assert sc.p == pytest.approx((sc.L + sc.beta) / sc.L)
    assert sc.p0 == pytest.approx(1.0)


def test_matsumoto_scalars_match_fd_of_f():
    # L = 1 and beta = 0.2 at this point
    point = TangentPoint([0.0, 0.0, 0.0], [0.6, 0.0, 0.8])
    ch = matsumoto_change(fld.constant([1 / 3, 0.0, 0.0]))
    sc = beta_scalars(euclidean(3), ch, point)
    assert sc.L == pytest.approx(1.0) and sc.beta == pytest.approx(0.2)

    def f(L, b):
        return L * L / (L - b)

    for name, slots in [("f1", [0]), ("f2", [1]), ("f11", [0, 0]), ("f12", [0, 1]),
                        ("f22", [1, 1])]:
        assert getattr(sc, name) == pytest.approx(central_partial(f, [1.0, 0.2], slots),
                                                  rel=1e-7), name
    # p02 = d p0 / d beta with p0 = f f22 + f2^2
    f2 = central_partial(f, [1.0, 0.2], [1])
    p02 = (central_partial(f, [1.0, 0.2], [1, 1, 1]) * f(1.0, 0.2)
           + 3 * f2 * central_partial(f, [1.0, 0.2], [1, 1]))
    assert sc.p02 == pytest.approx(p02, rel=1e-7)


def test_m_vector_identities():
    sc = beta_scalars(conformally_flat(3, 0.1), matsumoto_change(B_NONPAR), POINT)
    assert abs(sc.m @ POINT.y) < 1e-14
    assert sc.m @ sc.b_up == pytest.approx(sc.nu, rel=1e-12)


@pytest.mark.parametrize("change", [randers_change(B_CONST), matsumoto_change(B_CONST),
                                    power_series_change([1.0, 0.5, 0.25], B_CONST)])
def test_change_is_one_homogeneous(change):
    for lam in (0.5, 2.0, 3.0):
        assert change.f(lam * 1.3, lam * 0.2) == pytest.approx(lam * change.f(1.3, 0.2), rel=1e-9)


def test_degenerate_changes_are_reported():
    with pytest.raises(DegenerateChangeError) as err:
        beta_scalars(euclidean(3), randers_change(fld.constant([2.0, 0, 0])),
                     TangentPoint([0, 0, 0], [-1.0, 0, 0]))
    assert err.value.kind == "nonpositive-Lbar"
    with pytest.raises(DegenerateChangeError) as err:
        beta_scalars(euclidean(3), matsumoto_change(fld.constant([0.8, 0, 0])),
                     TangentPoint([0, 0, 0], [1.0, 0, 0]))
    assert err.value.kind == "nonpositive-f1"


def test_matsumoto_angular_metric_matches_oracle():
    point = TangentPoint([0.0, 0.0, 0.0], [1.0, 0.2, -0.5])
    cp = pair(euclidean(3), matsumoto_change(fld.constant([0.1, 0.0, 0.0])), point)
    assert rel_err(beta_angular_metric(cp.scalars, cp.base.h), cp.bar.h) < 1e-8


def test_identity_change_leaves_everything():
    cp = pair(conformally_flat(3, 0.1), identity_change(B_NONPAR))
    sc = cp.scalars
    assert np.allclose(beta_angular_metric(sc, cp.base.h), cp.base.h, atol=1e-14)
    assert np.allclose(beta_cartan(sc, cp.base), cp.base.C, atol=1e-14)
    assert np.allclose(v_tensor(sc, cp.base), 0.0, atol=1e-14)


def test_randers_change_q0_zero_gives_scaled_angular_metric():
    cp = pair(euclidean(3), randers_change(B_CONST))
    assert np.allclose(cp.bar.h, cp.scalars.p * cp.base.h, atol=1e-12)


def test_randers_metric_positive_definite_and_matches_oracle():
    cp = pair(euclidean(3), randers_change(fld.constant([0.0, 0.3, 0.1])))
    gbar = beta_metric(cp.scalars, cp.base.g)
    assert np.all(np.linalg.eigvalsh(gbar) > 0)
    assert rel_err(gbar, cp.bar.g) < 1e-8
    ginv = beta_inverse_metric(gbar)
    assert np.max(np.abs(ginv @ gbar - np.eye(3))) < 1e-10
    y = POINT.y
    assert y @ gbar @ y == pytest.approx(cp.scalars.f ** 2, rel=1e-12)


def test_closed_inverse_metric_deviation_report():
    cp = pair(euclidean(3), matsumoto_change(B_CONST))
    sc = cp.scalars
    corrected = rel_err(closed_inverse_metric(sc, cp.base.g_inv, POINT.y), cp.bar.g_inv)
    uncorrected = rel_err(closed_inverse_metric(sc, cp.base.g_inv, POINT.y, uncorrected=True),
                      cp.bar.g_inv)
    assert corrected < 1e-12
    # the uncorrected s0 carries Lbar where Lbar^2 belongs; the gap is recorded, not hidden
    assert np.isfinite(uncorrected) and uncorrected > 1e-6


def test_closed_inverse_is_nan_on_beta_zero_shell():
    point = TangentPoint(POINT.x, [0.0, 1.0, 0.0])  # beta = b_1 y^1 + b_3 y^3 = 0
    sc = beta_scalars(euclidean(3), randers_change(B_CONST), point)
    assert sc.beta_singular
    assert np.isnan(closed_inverse_metric(sc, np.eye(3), point.y)).any()


def test_riemannian_base_randers_cartan_specialisation():
    cp = pair(conformally_flat(3, 0.1), randers_change(B_CONST))
    sc = cp.scalars
    h, m = cp.base.h, sc.m
    cyc = (np.einsum("ij,k->ijk", h, m) + np.einsum("jk,i->ijk", h, m)
           + np.einsum("ki,j->ijk", h, m))
    assert abs(sc.p02) < 1e-14
    assert rel_err(0.5 * sc.p_1 * cyc, cp.bar.C) < 1e-10


@pytest.mark.parametrize("space", [euclidean(3), conformally_flat(3, 0.1)])
@pytest.mark.parametrize("change", [matsumoto_change(B_NONPAR),
                                    power_series_change([1.0, 0.5, 0.25], B_CONST)])
def test_cartan_closed_forms_match_oracle(space, change):
    cp = pair(space, change)
    sc = cp.scalars
    C = beta_cartan(sc, cp.base)
    assert rel_err(C, cp.bar.C) < 1e-7
    for perm in [(1, 0, 2), (0, 2, 1)]:
        assert np.allclose(C, C.transpose(perm), atol=1e-14)
    assert np.max(np.abs(C @ POINT.y)) < 1e-12
    assert rel_err(beta_associate_cartan(sc, cp.base), cp.bar.C_assoc) < 1e-7
    assert rel_err(np.einsum("hr,rij->hij", cp.bar.g_inv, C), cp.bar.C_assoc) < 1e-8


def test_parallel_one_form_has_no_spray_difference():
    cp = pair(euclidean(3), randers_change(fld.constant([0.0, 0.0, 0.3])))
    d = cp.differences
    assert np.allclose(d.E, 0) and np.allclose(d.F, 0)
    assert np.max(np.abs(d.D)) < 1e-14
    assert np.max(np.abs(d.Dn)) < 1e-14


def test_closed_one_form_difference_vector():
    cp = pair(euclidean(3), matsumoto_change(B_CLOSED))
    sc, d = cp.scalars, cp.differences
    assert np.max(np.abs(d.F)) < 1e-14
    E00 = POINT.y @ d.E @ POINT.y
    expect = sc.p * E00 * (sc.s_1 * POINT.y + sc.s0 * sc.b_up) / 2
    assert rel_err(expect, d.D) < 1e-10


def test_nonparallel_transvection_properties():
    cp = pair(euclidean(3), randers_change(B_NONPAR))
    d = cp.differences
    y = POINT.y
    assert np.max(np.abs(d.D)) > 1e-3  # the example really exercises D != 0
    assert np.max(np.abs(np.einsum("ijk,j,k->i", d.Dc, y, y) - 2 * d.D)) < 1e-8
    assert np.max(np.abs(d.Dc @ y - d.Dn)) < 1e-8
    dD = np.array([j.partials(0, 1) for j in cp.spray_difference_jet()])
    assert np.max(np.abs(dD - d.Dn)) < 1e-7


def test_difference_wrappers_agree_with_pair():
    sp, ch = conformally_flat(3, 0.1), matsumoto_change(B_NONPAR)
    d = pair(sp, ch).differences
    assert np.allclose(difference_vector(sp, ch, POINT), d.D)
    assert np.allclose(difference_nlc(sp, ch, POINT), d.Dn)
    assert np.allclose(difference_connection(sp, ch, POINT), d.Dc)


def test_identity_change_difference_tensors_vanish():
    d = pair(conformally_flat(3, 0.1), identity_change(B_NONPAR)).differences
    for t in (d.D, d.Dn, d.Dc):
        assert np.max(np.abs(t)) < 1e-12


@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_difference_tensor_homogeneity(lam):
    sp, ch = conformally_flat(3, 0.1), matsumoto_change(B_NONPAR)
    d1 = pair(sp, ch).differences
    d2 = pair(sp, ch, POINT.scaled(lam)).differences
    assert np.allclose(d2.D, lam ** 2 * d1.D, rtol=1e-8, atol=1e-13)
    assert np.allclose(d2.Dn, lam * d1.Dn, rtol=1e-8, atol=1e-13)
    assert np.allclose(d2.Dc, d1.Dc, rtol=1e-8, atol=1e-13)


@pytest.mark.parametrize("space", [euclidean(3), conformally_flat(3, 0.1)])
def test_closed_difference_forms(space):
    cp = pair(space, matsumoto_change(B_NONPAR))
    d = cp.differences
    # q = f f_2 reproduces the spray difference
    assert rel_err(cp.closed_difference_vector(), d.D) < 1e-10
    assert rel_err(cp.closed_difference_nlc(), d.Dn) < 1e-7
    # the expanded reading of the connection bracket is exact
    assert rel_err(cp.closed_difference_connection("expanded"), d.Dc) < 1e-8
    # the Q_k = g_kr Q^r reading is a diagnostic; it is evaluated, not trusted
    assert np.all(np.isfinite(cp.closed_difference_connection("lowered")))


def test_unknown_connection_reading():
    with pytest.raises(ValueError):
        pair(euclidean(3), randers_change(B_NONPAR)).closed_difference_connection("other")
