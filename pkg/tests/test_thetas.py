import random

import pytest

from e8anomaly.charforms import make_geometry, random_assignments
from e8anomaly.coeffring import Rational, RingError
from e8anomaly.qseries import STEP, QSeries
from e8anomaly.thetas import (
    THETA,
    THETA1,
    THETA2,
    THETA3,
    divided_theta,
    eisenstein,
    level_two_form,
    phi_series,
    theta_null,
    theta_prime_zero,
    theta_root_product,
    theta_series,
)


def integer_coeffs(series, upto):
    vals = series.rationals()
    return [vals[STEP * k] for k in range(upto + 1)]


def half_coeffs(series, upto_halves):
    vals = series.rationals()
    return [vals[STEP // 2 * k] for k in range(upto_halves + 1)]


# printed expansions
def test_eisenstein_goldens():
    assert integer_coeffs(eisenstein("E2", 3), 2) == [1, -24, -72]
    assert integer_coeffs(eisenstein("E4", 3), 3) == [1, 240, 2160, 6720]
    assert integer_coeffs(eisenstein("E6", 3), 3) == [1, -504, -16632, -122976]


def test_level_two_goldens():
    assert integer_coeffs(level_two_form("delta1", 2), 2) == [Rational(1, 4), 6, 6]
    assert integer_coeffs(level_two_form("eps1", 2), 2) == [Rational(1, 16), -1, 7]
    assert half_coeffs(level_two_form("delta2", 2).scale(8), 3) == [-1, -24, -24, -96]
    assert half_coeffs(level_two_form("eps2", 2), 3) == [0, 1, 8, 28]


def test_phi_direct_product():
    # prod (1 - q^n) to q^5, multiplied out by hand
    assert integer_coeffs(phi_series(5), 5) == [1, -1, -1, 0, 0, 1]


def test_theta_prime_is_eta_cubed():
    tp = theta_prime_zero(4)
    phi3 = phi_series(4) ** 3
    assert tp.rationals()[0] == 0
    assert tp.rationals()[1:] == phi3.rationals()[: tp.prec - 1]


def test_theta_nulls_product_is_twice_theta_prime():
    prod = theta_null(THETA1, 4) * theta_null(THETA2, 4) * theta_null(THETA3, 4)
    tp = theta_prime_zero(4)
    n = min(prod.prec, tp.prec)
    assert prod.rationals()[:n] == tp.scale(2).rationals()[:n]


def test_theta_of_even_root_needs_division():
    g = make_geometry(10, 1, 1, 2, assignments=random_assignments(10, 1, 1, random.Random(1)))
    with pytest.raises(RingError):
        theta_series(THETA, g.tangent[0], 2)
    d = divided_theta(g.tangent[0], 2)
    assert d.valuation() == 1


def test_theta_is_odd_in_the_line_class():
    g = make_geometry(10, 1, 1, 2, assignments=random_assignments(10, 1, 1, random.Random(2)))
    assert theta_series(THETA, -g.line, 2) == -theta_series(THETA, g.line, 2)
    assert theta_series(THETA3, -g.line, 2) == theta_series(THETA3, g.line, 2)


@pytest.mark.parametrize("kind", [THETA1, THETA2, THETA3])
def test_root_product_matches_literal_product(kind):
    g = make_geometry(14, 0, 1, 3, assignments=random_assignments(14, 0, 1, random.Random(3)))
    fast = theta_root_product(kind, g.e8roots[0], 3, g.ring)
    literal = QSeries.one(g.ring, fast.prec)
    for r in g.e8roots[0]:
        literal = literal * theta_series(kind, r, 3)
    assert fast == literal.truncate(fast.prec)


def test_unknown_kind():
    with pytest.raises(ValueError):
        theta_series("theta4", None, 2)
    with pytest.raises(ValueError):
        eisenstein("E8", 2)
