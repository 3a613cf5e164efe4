from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gdbialg.scalars import (
    GF, QQ, DivisionByZero, Field, FieldError, FieldMismatch, ScalarParseError, binomial, scalar_arith,
)

PRIMES = [3, 5, 7, 11, 101]


def test_rational_inverse_pair():
    assert scalar_arith("mul", QQ(Fraction(1, 3)), QQ(3)) == QQ(1)


def test_inverse_mod_5():
    assert scalar_arith("inv", GF(5)(3)).value == 2


def test_add_mod_5():
    assert scalar_arith("add", GF(5)(2), GF(5)(4)).value == 1


def test_eq_and_sub_div():
    F = GF(7)
    assert scalar_arith("eq", F(3), F(10)) is True
    assert scalar_arith("div", F(1), F(3)).value == 5
    assert scalar_arith("sub", QQ(1), QQ(Fraction(1, 2))) == QQ(Fraction(1, 2))


def test_characteristic_two_rejected():
    with pytest.raises(FieldError):
        GF(2)
    with pytest.raises(FieldError):
        Field.from_tag("F2")


def test_composite_modulus_rejected():
    with pytest.raises(FieldError):
        GF(9)


def test_zero_inverse():
    with pytest.raises(DivisionByZero):
        scalar_arith("inv", QQ(0))
    with pytest.raises(DivisionByZero):
        scalar_arith("inv", GF(3)(6))


def test_mixed_fields():
    with pytest.raises(FieldMismatch):
        scalar_arith("add", GF(3)(1), GF(5)(1))


def test_parse_and_render():
    assert QQ.parse("-6/4") == Fraction(-3, 2)
    assert QQ.render(QQ.parse("10/5")) == "2"
    assert GF(5).parse("1/3") == 2
    with pytest.raises(ScalarParseError):
        GF(5).parse("1/5")
    with pytest.raises(ScalarParseError):
        QQ.parse("one")


def test_field_tags():
    assert Field.from_tag("Q") == QQ
    assert Field.from_tag("F7") == GF(7)
    assert GF(7).tag == "F7" and QQ.tag == "Q"


@pytest.mark.parametrize("n,k,want", [(4, 2, 6), (1, -1, 0), (3, 5, 0), (0, 0, 1)])
def test_binomial_values(n, k, want):
    assert binomial(n, k) == want


def test_binomial_reduced_mod_3():
    assert GF(3).coerce(binomial(3, 1)) == 0


@given(st.integers(1, 40), st.integers(-3, 45))
def test_pascal_rule(n, k):
    assert binomial(n, k) == binomial(n - 1, k - 1) + binomial(n - 1, k)


fractions = st.fractions(max_denominator=50).filter(lambda x: abs(x) < 10**6)


@given(fractions, fractions, fractions)
def test_rational_field_axioms(a, b, c):
    A, B, C = QQ(a), QQ(b), QQ(c)
    assert A + B == B + A and A * B == B * A
    assert (A + B) + C == A + (B + C)
    assert A * (B + C) == A * B + A * C
    if b != 0:
        assert (A / B) * B == A


@given(st.sampled_from(PRIMES), st.integers(), st.integers(), st.integers())
def test_prime_field_axioms(p, a, b, c):
    F = GF(p)
    A, B, C = F(a), F(b), F(c)
    assert (A * B) * C == A * (B * C)
    assert A * (B + C) == A * B + A * C
    assert A - A == F(0)
    if B.value:
        assert B * B.inverse() == F(1)


@given(st.sampled_from([QQ, GF(3), GF(5), GF(13)]), fractions)
def test_render_parse_round_trip(F, x):
    try:
        raw = F.coerce(x)
    except DivisionByZero:
        return
    assert F.parse(F.render(raw)) == raw
