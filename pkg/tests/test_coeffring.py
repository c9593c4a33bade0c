from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from e8anomaly.coeffring import (
    LCLASS,
    TANGENT,
    Generator,
    MonomialLimitError,
    Rational,
    Ring,
    RingError,
    RingSpec,
    even_series,
    expm1_over,
    graded_part,
    ring_exp,
    ring_invert,
)

GENS = (Generator("x1", TANGENT), Generator("x2", TANGENT), Generator("u", LCLASS))


def evaluated(values=(2, Fraction(-1, 3), 5), top=10):
    return Ring(RingSpec("evaluated", top, GENS, dict(zip(("x1", "x2", "u"), values))))


def symbolic(top=10, max_terms=None):
    return Ring(RingSpec("symbolic", top, GENS, max_terms=max_terms))


rationals = st.fractions(min_value=-20, max_value=20, max_denominator=6)


def element(ring, coeffs):
    u = ring.gen("u")
    out = ring.zero
    for k, c in enumerate(coeffs):
        out = out + (u**k).scale(Rational(c.numerator, c.denominator))
    return out


def test_ring_validation():
    with pytest.raises(RingError):
        Ring(RingSpec("evaluated", 12, GENS, {"x1": 1, "x2": 1, "u": 1}))
    with pytest.raises(RingError):
        Ring(RingSpec("evaluated", 10, GENS, {"x1": 1}))
    with pytest.raises(RingError):
        Ring(RingSpec("tropical", 10, GENS))
    with pytest.raises(RingError):
        Ring(RingSpec("symbolic", 10, (GENS[0], GENS[0])))
    with pytest.raises(RingError):
        Ring(RingSpec("symbolic", 10, (Generator("a", "spin"),)))


def test_even_only_generator_has_no_value_in_evaluated_mode():
    R = evaluated()
    with pytest.raises(RingError):
        R.gen("x1")
    sq = R.root("x1").square
    assert sq.degree_coefficient(4) == 2
    assert R.root("x1").value is None
    assert R.root("u").value.degree_coefficient(2) == 5


def test_truncation_and_grading():
    R = evaluated()
    u = R.gen("u")
    assert (u**5).degree_coefficient(10) == 5**5
    assert (u**6).is_zero()
    x = ring_exp(u)
    assert graded_part(x, 4).degree_coefficient(4) == Rational(25, 2)
    with pytest.raises(RingError):
        graded_part(x, 3)
    with pytest.raises(RingError):
        graded_part(x, 12)


def test_mixed_rings_rejected():
    with pytest.raises(RingError):
        evaluated().one + evaluated().one


def test_exp_requires_nilpotent():
    R = evaluated()
    with pytest.raises(RingError):
        ring_exp(R.one)
    with pytest.raises(RingError):
        ring_invert(R.gen("u"))


def test_symbolic_evaluates_to_evaluated():
    S, E = symbolic(), evaluated()
    x1 = S.root("x1")
    u = S.gen("u")
    # cosh(x1) e^u - hand-built through even series of the root
    expr = even_series([Rational(1, 1), Rational(1, 2), Rational(1, 24)], x1) * ring_exp(u)
    expr_e = even_series([Rational(1, 1), Rational(1, 2), Rational(1, 24)], E.root("x1")) * ring_exp(E.gen("u"))
    assert S.evaluate(expr, E) == expr_e


def test_odd_power_of_even_generator_rejected_on_evaluation():
    S, E = symbolic(), evaluated()
    with pytest.raises(RingError):
        S.evaluate(S.gen("x1"), E)


def test_monomial_limit():
    S = symbolic(top=14, max_terms=10)
    s = S.one + S.gen("x1") + S.gen("x2") + S.gen("u")
    with pytest.raises(MonomialLimitError):
        s**6


@settings(max_examples=40, deadline=None)
@given(st.lists(rationals, min_size=1, max_size=6), st.lists(rationals, min_size=1, max_size=6),
       st.lists(rationals, min_size=1, max_size=6))
def test_ring_axioms(a, b, c):
    R = evaluated()
    x, y, z = element(R, a), element(R, b), element(R, c)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x


@settings(max_examples=40, deadline=None)
@given(st.lists(rationals, min_size=1, max_size=5), st.lists(rationals, min_size=1, max_size=5))
def test_exp_is_additive_on_nilpotents(a, b):
    R = evaluated()
    u = R.gen("u")
    x, y = element(R, a) * u, element(R, b) * u
    assert ring_exp(x + y) == ring_exp(x) * ring_exp(y)
    assert x * expm1_over(x) == ring_exp(x) - 1


@settings(max_examples=40, deadline=None)
@given(st.lists(rationals, min_size=2, max_size=6))
def test_invert(a):
    R = evaluated()
    x = element(R, a) + 1 if a[0] != -1 else element(R, a) + 2
    if not x.constant:
        return
    assert x * ring_invert(x) == R.one
