from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from openquintic.numfield import (
    ONE,
    SQRT5,
    FieldError,
    ParseError,
    QuadRat,
    qr_parse,
    qr_print,
)

rationals = st.fractions(min_value=-60, max_value=60, max_denominator=12)
quadrats = st.builds(QuadRat, rationals, rationals)
nonzero_quadrats = quadrats.filter(bool)


def test_sqrt5_squares_to_five():
    assert SQRT5 * SQRT5 == QuadRat(5)


def test_rationalized_inverse():
    assert 1 / SQRT5 == QuadRat(0, F(1, 5))


def test_norm_form_product():
    assert QuadRat(1, 1) * QuadRat(1, -1) == QuadRat(-4)


@pytest.mark.parametrize("value, conj, norm", [
    (QuadRat(2), QuadRat(2), F(4)),
    (SQRT5, -SQRT5, F(-5)),
    (QuadRat(3, 1), QuadRat(3, -1), F(4)),
])
def test_conjugate_and_norm(value, conj, norm):
    assert value.conjugate() == conj
    assert value.norm() == norm


def test_zero_has_no_inverse():
    with pytest.raises(FieldError):
        QuadRat(0).inverse()


@given(quadrats, quadrats, quadrats)
@settings(max_examples=150, deadline=None)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c


@given(nonzero_quadrats)
@settings(max_examples=150, deadline=None)
def test_inverse_via_conjugate(a):
    n = a.norm()
    assert n != 0
    assert a * (a.conjugate() * QuadRat(F(1, 1) / n)) == ONE
    assert a * a.inverse() == ONE


@given(quadrats)
@settings(max_examples=150, deadline=None)
def test_parse_print_round_trip(a):
    assert qr_parse(qr_print(a)) == a


@pytest.mark.parametrize("text, value", [
    ("1/5*r5", QuadRat(0, F(1, 5))),
    ("-25", QuadRat(-25)),
    ("3-1/2*r5", QuadRat(3, F(-1, 2))),
    ("0", QuadRat(0)),
    ("7+2*r5", QuadRat(7, 2)),
    ("-3/4*r5", QuadRat(0, F(-3, 4))),
])
def test_parse_examples(text, value):
    assert qr_parse(text) == value


def test_print_canonicalizes():
    assert qr_print(qr_parse("6/4")) == "3/2"
    assert qr_print(QuadRat(0)) == "0"


@pytest.mark.parametrize("bad", ["", "x", "1/2+", "1/2*r7", "2 2", "1/5*r5junk"])
def test_parse_errors_carry_position(bad):
    with pytest.raises(ParseError) as err:
        qr_parse(bad)
    assert "position" in str(err.value)


def test_exact_sqrt():
    assert QuadRat(F(9, 4)).sqrt() == QuadRat(F(3, 2))
    v = QuadRat(2, 3)
    root = (v * v).sqrt()
    assert root is not None and root * root == v * v
    assert QuadRat(2).sqrt() is None   # sqrt2 is not in the field
    assert QuadRat(5).sqrt() == SQRT5
    mixed = QuadRat(F(7, 2), F(3, 2))  # (3/2 + (1/2) r5)^2
    assert mixed.sqrt() is not None and mixed.sqrt() ** 2 == mixed


def test_power_and_int_mixing():
    assert (1 + SQRT5) ** 2 == QuadRat(6, 2)
    assert SQRT5 ** -2 == QuadRat(F(1, 5))
    assert 2 * SQRT5 - SQRT5 == SQRT5
