import math
from fractions import Fraction

import pytest
from scipy.special import bernoulli, digamma

from lozenge.special import BERNOULLI, PoleProximityError, digamma_stirling, psi_q, q_number, q_product


def test_bernoulli_table():
    ref = bernoulli(14)
    for k, v in BERNOULLI.items():
        if k == 1:
            assert v == -0.5
        else:
            assert v == pytest.approx(ref[k], rel=1e-14)


@pytest.mark.parametrize("x", [5.0, 20.0, 100.0])
def test_digamma_bound_holds(x):
    val, bound = digamma_stirling(x)
    assert abs(val - digamma(x)) <= bound


def test_digamma_orders_agree_at_large_x():
    lo, _ = digamma_stirling(100.0, order=4)
    hi, _ = digamma_stirling(100.0, order=12)
    assert abs(lo - hi) < 1e-12


def test_digamma_complex_argument():
    val, bound = digamma_stirling(30 + 10j, order=8)
    assert abs(val - digamma(30 + 10j)) <= bound < 1e-15


@pytest.mark.parametrize("order", [-2, 3, 14])
def test_digamma_rejects_order(order):
    with pytest.raises(ValueError):
        digamma_stirling(10.0, order=order)


def test_digamma_pole():
    with pytest.raises(PoleProximityError):
        digamma_stirling(0)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_q_product_vanishes_at_powers(n):
    q = 1 / 3
    g, bound = q_product(q**n, q)
    assert abs(g) < 1e-15 and bound < 1e-12


def test_q_product_matches_long_product():
    q, x = 0.4, 0.7 + 0.2j
    g, bound = q_product(x, q, truncation=30)
    ref = math.prod(1 - q**n / x for n in range(1, 400))
    assert abs(g - ref) <= bound
    assert bound < 1e-10


def test_q_product_rejects_large_q():
    with pytest.raises(ValueError):
        q_product(0.5, 1.2)


def test_psi_q_is_log_derivative():
    q, x, h = 0.3, 0.8, 1e-6
    s, bound = psi_q(x, q)
    gp = (q_product(x + h, q)[0] - q_product(x - h, q)[0]) / (2 * h)
    assert s == pytest.approx(x * gp / q_product(x, q)[0], rel=1e-7)
    assert bound < 1e-30


def test_psi_q_pole_proximity():
    q = 0.5
    with pytest.raises(PoleProximityError, match="q\\^2"):
        psi_q(0.25 + 1e-14, q)
    s, _ = psi_q(0.25 + 1e-6, q)
    assert abs(s) > 1e4


def test_q_number():
    assert q_number(0, 0.3) == 0
    assert q_number(2, 0.25) == pytest.approx(4 - 0.25)
    # odd function of n
    assert q_number(-3, 0.7) == pytest.approx(-q_number(3, 0.7))
    assert q_number(2, Fraction(1, 4)) == pytest.approx(3.75)
