import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from e8anomaly.coeffring import Rational
from e8anomaly.qseries import QSeries, QSeriesError, q_coeff, q_divide, q_exp, q_invert
from e8anomaly.thetas import scalar_ring

R = scalar_ring()
ints = st.integers(min_value=-30, max_value=30)


def series(values, prec=17):
    return QSeries.from_rationals(R, list(values) + [0] * (prec - len(values)), prec)


def test_precision_bookkeeping():
    a = series([1, 2, 3])
    assert a.order == 2
    assert a.shift(1).prec == 18
    with pytest.raises(QSeriesError):
        a.shift(-1)
    with pytest.raises(QSeriesError):
        q_coeff(a, 17)
    with pytest.raises(QSeriesError):
        QSeries(R, [R.one], 2)


def test_valuation_aware_product():
    a = series([0, 1], prec=9)  # q^(1/8) + O(q^(9/8))
    b = series([1, 1], prec=9)
    assert (a * b).prec == 9
    assert (a * a).prec == 10


def test_division_cancels_leading_power():
    a = series([0, 2, 4], prec=17)
    b = series([0, 1, 2], prec=17)
    assert q_divide(a, b).rationals()[:16] == [2] + [0] * 15
    with pytest.raises(QSeriesError):
        q_divide(b, series([0, 0, 1]))


def test_invert_needs_unit():
    with pytest.raises(QSeriesError):
        q_invert(series([0, 1]))


def test_exp_needs_nilpotent():
    with pytest.raises(QSeriesError):
        q_exp(series([1]))


@settings(max_examples=50, deadline=None)
@given(st.lists(ints, min_size=1, max_size=17).filter(lambda v: v[0] != 0))
def test_invert_roundtrip(values):
    a = series(values)
    assert (a * q_invert(a)).rationals() == [1] + [0] * 16


@settings(max_examples=50, deadline=None)
@given(st.lists(ints, min_size=1, max_size=17), st.lists(ints, min_size=1, max_size=17))
def test_product_commutes_and_scales(x, y):
    a, b = series(x), series(y)
    assert a * b == b * a
    assert (a * b).scale(Rational(3, 2)) == a.scale(Rational(3, 2)) * b
