import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betafinsler.errors import JetDomainError
from betafinsler.finsler import TangentPoint
from betafinsler.jets import Jet, jet_space, lift, lift_x, reciprocal, sqrt, variables
from betafinsler.jets import linalg as jet_linalg
from betafinsler.jets.fd import central_partial, derivative

from helpers import evaluate, jet_vs_fd, random_polynomial


def test_lift_coordinate_function():
    xs, ys = lift(TangentPoint([0.3, -0.2], [1.0, 2.0]))
    F = ys[1]
    assert F.partial(y=(1,)) == 1.0
    assert F.partial(y=(0,)) == 0.0
    assert F.partial(x=(0,)) == 0.0
    assert F.partial(x=(1,), y=(1,)) == 0.0


def test_quadratic_norm_squared():
    _, ys = lift(TangentPoint([0.0, 0.0], [3.0, 4.0]))
    F = ys[0] * ys[0] + ys[1] * ys[1]
    assert F.value == 25.0
    assert F.partial(y=(0,)) == 6.0
    assert F.partial(y=(0, 0)) == 2.0
    assert F.partial(y=(0, 0, 0)) == 0.0


def test_bilinear_mixed_partial():
    xs, ys = lift(TangentPoint([2.0, 0.0], [0.0, 5.0]))
    F = xs[0] * ys[1]
    assert F.value == 10.0
    assert F.partial(x=(0,), y=(1,)) == 1.0


def test_lift_rejects_zero_y():
    with pytest.raises(JetDomainError) as err:
        lift(_ZeroY())
    assert err.value.op == "lift"


class _ZeroY:
    x = np.zeros(2)
    y = np.zeros(2)


def test_sqrt_constant():
    s = Jet.constant(jet_space(1, 2, 1, 3), 4.0).sqrt()
    assert s.value == 2.0
    assert np.all(s.c[1:] == 0)


def test_sqrt_derivative_at_nine():
    (t,) = variables([9.0], 3)
    assert math.isclose(sqrt(t).partial(y=(0,)), 1 / 6, rel_tol=1e-15)
    assert math.isclose(sqrt(t).partial(y=(0, 0)), -0.25 * 9.0 ** -1.5, rel_tol=1e-14)


def test_third_derivative_of_cube():
    _, ys = lift(TangentPoint([0.0], [0.7]))
    cube = ys[0] ** 3
    assert cube.partial(y=(0, 0, 0)) == pytest.approx(6.0, abs=1e-14)


@pytest.mark.parametrize("op,call", [
    ("sqrt", lambda t: t.sqrt()),
    ("reciprocal", lambda t: t.reciprocal()),
    ("division", lambda t: t / 0.0),
])
def test_domain_errors_name_the_operation(op, call):
    t = Jet.constant(jet_space(0, 1, 0, 2), 0.0 if op != "sqrt" else -1.0)
    with pytest.raises(JetDomainError) as err:
        call(t)
    assert err.value.op == op


def test_fractional_power_of_negative_rejected():
    (t,) = variables([-2.0], 2)
    with pytest.raises(JetDomainError):
        t ** 0.5


def test_scalar_dispatch():
    assert sqrt(9.0) == 3.0
    assert reciprocal(4.0) == 0.25
    assert float(sqrt(mpmath.mpf(2))) == pytest.approx(math.sqrt(2))


def test_dy_lowers_order_and_matches_partial():
    xs, ys = lift(TangentPoint([0.4, 0.1], [1.0, -0.5]))
    F = xs[0] * ys[0] ** 3 + ys[1] ** 2 * ys[0]
    dF = F.dy(0)
    assert dF.space.oy == 2
    assert dF.partial(y=(0, 0)) == pytest.approx(F.partial(y=(0, 0, 0)))
    assert dF.partial(x=(0,), y=(0,)) == pytest.approx(F.partial(x=(0,), y=(0, 0)))


def test_alignment_across_orders():
    xs, ys = lift(TangentPoint([0.4], [1.0]))
    a = ys[0] ** 3
    b = a.dy(0)  # order (1, 2)
    s = a + b
    assert s.space.oy == 2
    assert s.value == pytest.approx(1.0 + 3.0)


def test_jet_matrix_inverse():
    (u, v) = variables([0.3, 0.7], 2)
    M = [[1.0 + u * u, v], [v, 2.0 + u]]
    Mi = jet_linalg.inverse(M)
    for i in range(2):
        for j in range(2):
            acc = Mi[i][0] * M[0][j] + Mi[i][1] * M[1][j]
            assert acc.value == pytest.approx(float(i == j), abs=1e-14)
            assert np.allclose(acc.c[1:], 0.0, atol=1e-13)


def test_lift_x_has_no_y_slots():
    xs = lift_x([1.0, 2.0])
    assert xs[0].space.ny == 0
    assert (xs[0] * xs[1]).partial(x=(1,)) == 1.0


@pytest.mark.parametrize("seed", range(10))
def test_random_polynomials_match_finite_differences(seed):
    rng = np.random.default_rng(seed)
    n = 2
    poly = random_polynomial(rng, 2 * n)
    x = rng.uniform(-1, 1, n)
    y = rng.uniform(0.5, 1.5, n)
    assert jet_vs_fd(poly, n, x, y, h=1e-4) < 1e-6


def test_fd_oracle_univariate():
    assert derivative(lambda t: t ** 5, 1.3, order=3) == pytest.approx(60 * 1.3 ** 2, rel=1e-9)
    d = central_partial(lambda a, b: a * a * b, [2.0, 3.0], [0, 1])
    assert d == pytest.approx(4.0, rel=1e-12)


_coef = st.floats(-2, 2, allow_nan=False, allow_infinity=False)


@settings(max_examples=30, deadline=None)
@given(st.lists(_coef, min_size=6, max_size=6), st.lists(_coef, min_size=6, max_size=6))
def test_product_rule_is_leibniz_convolution(ca, cb):
    """Partials of a*b equal the Leibniz sum of partials of a and b."""
    xs, ys = lift(TangentPoint([0.2], [0.9]))
    basis = [1.0, xs[0], ys[0], xs[0] * ys[0], ys[0] * ys[0], ys[0] ** 3]
    a = sum((c * m for c, m in zip(ca, basis)), Jet.constant(xs[0].space, 0.0))
    b = sum((c * m for c, m in zip(cb, basis)), Jet.constant(xs[0].space, 0.0))
    p = a * b
    for kx in range(2):
        for ky in range(4):
            expect = 0.0
            for ix in range(kx + 1):
                for iy in range(ky + 1):
                    w = math.comb(kx, ix) * math.comb(ky, iy)
                    expect += w * (a.partial(x=(0,) * ix, y=(0,) * iy)
                                   * b.partial(x=(0,) * (kx - ix), y=(0,) * (ky - iy)))
            got = p.partial(x=(0,) * kx, y=(0,) * ky)
            assert got == pytest.approx(expect, rel=1e-12, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.2, 5.0), st.floats(-3, 3))
def test_power_composition_matches_closed_form(t, r):
    (u,) = variables([t], 3)
    p = u ** r
    for k in range(4):
        coef = math.prod(r - j for j in range(k))
        assert p.partial(y=(0,) * k) == pytest.approx(coef * t ** (r - k), rel=1e-10, abs=1e-12)
