import random
from fractions import Fraction as F

import pytest

from openquintic.numfield import QuadRat
from openquintic.series import (
    InvariantTable,
    PrecisionError,
    PuiseuxSeries,
    SeriesDomainError,
    closed_lambert_sum,
    invert_closed_lambert,
    invert_open_lambert,
    open_lambert_sum,
    series_from_text,
    series_to_text,
)

PS = PuiseuxSeries


def rand_series(rng, trunc=40, ram=10):
    coeffs = {}
    for _ in range(rng.randint(0, 6)):
        coeffs[rng.randint(0, trunc - 1)] = QuadRat(
            F(rng.randint(-9, 9), rng.randint(1, 4)),
            F(rng.randint(-3, 3), rng.randint(1, 3)))
    return PS(coeffs, ram, trunc)


def test_difference_of_squares():
    one_plus = PS({0: 1, 10: 1})
    one_minus = PS({0: 1, 10: -1})
    assert one_plus * one_minus == PS({0: 1, 20: -1})


def test_ramification_bookkeeping():
    p = PS.constant(1)
    for _ in range(10):
        p = p * PS.monomial(1)
    assert p == PS.monomial(10)  # (q^(1/10))^10 = q


def test_geometric_series():
    geo = PS.constant(1, trunc=40) / PS({0: 1, 10: -1}, trunc=40)
    assert geo == PS({0: 1, 10: 1, 20: 1, 30: 1}, trunc=40)


def test_division_rejects_zero_known_part():
    with pytest.raises(SeriesDomainError):
        PS.constant(1, trunc=10) / PS.zero(trunc=10)


def test_division_rejects_negative_exponents():
    with pytest.raises(SeriesDomainError):
        PS.constant(1, trunc=30) / PS.monomial(10, trunc=30)


def test_nth_root_binomial():
    # independent oracle: (1 + u)^(1/10) binomial coefficients for u = 10q:
    # 1 + (1/10)u + (1/10)(1/10 - 1)/2 u^2 -> 1 + q - (9/2) q^2
    f = PS({0: 1, 10: 10}, trunc=40)
    r = f.nth_root(10)
    assert r.coefficient(10) == QuadRat(1)
    assert r.coefficient(20) == QuadRat(F(-9, 2))
    power = PS.constant(1)
    for _ in range(10):
        power = (power * r).truncate(40)
    assert power == f


def test_nth_root_trivial_cases():
    assert PS.monomial(100).nth_root(10) == PS.monomial(10)
    assert PS.constant(1).nth_root(3) == PS.constant(1)


def test_nth_root_requires_unit_lead():
    with pytest.raises(SeriesDomainError):
        PS({0: 2}, trunc=10).nth_root(2)


def test_theta_examples():
    assert PS.monomial(5).theta(1) == PS.monomial(5, F(1, 2))
    assert PS.constant(7).theta(5).is_zero()
    assert PS({10: 1, 20: 1}).theta(5) == PS({10: 5, 20: 10})


def test_ring_axioms_random():
    rng = random.Random(5)
    for _ in range(60):
        a, b, c = (rand_series(rng) for _ in range(3))
        assert ((a + b) + c) == (a + (b + c))
        lhs = (a * b) * c
        rhs = a * (b * c)
        t = min(x for x in (lhs.trunc, rhs.trunc) if x is not None)
        assert lhs.truncate(t) == rhs.truncate(t)
        lhs2 = a * (b + c)
        rhs2 = a * b + a * c
        t2 = min(x for x in (lhs2.trunc, rhs2.trunc) if x is not None)
        assert lhs2.truncate(t2) == rhs2.truncate(t2)


def test_theta_leibniz_random():
    rng = random.Random(6)
    for _ in range(60):
        a, b = rand_series(rng), rand_series(rng)
        prod = a * b
        lhs = prod.theta(5)
        rhs = (a.theta(5) * b + a * b.theta(5)).truncate(lhs.trunc)
        assert lhs == rhs


def test_mul_then_div_identity():
    rng = random.Random(7)
    for _ in range(40):
        unit = rand_series(rng) + PS.constant(1, trunc=40)
        if unit.order() != 0:
            continue
        f = rand_series(rng)
        back = (f * unit) / unit
        assert back == f.truncate(back.trunc)


def test_precision_error_beyond_trunc():
    f = PS({0: 1}, trunc=5)
    with pytest.raises(PrecisionError):
        f.coefficient(5)


def test_serialization_round_trip():
    f = PS({0: QuadRat(0, F(1, 5)), 13: QuadRat(F(-7, 2), 3)}, trunc=21)
    assert series_from_text(series_to_text(f)) == f


# -- Lambert machinery ------------------------------------------------------

def _divisor_recursion_closed(coeffs, weight=3):
    """Independent oracle: peel divisor sums degree by degree."""
    n = {}
    for m in sorted(coeffs):
        acc = F(coeffs[m])
        for d in n:
            if m % d == 0:
                acc -= n[d] * d**weight
        n[m] = acc / F(m**weight)
    return n


def test_closed_inversion_against_divisor_oracle():
    coeffs = {1: F(2875), 2: F(4876875), 3: F(8564575000)}
    oracle = _divisor_recursion_closed(coeffs, weight=3)
    assert oracle == {1: F(2875), 2: F(609250), 3: F(317206375)}
    table = invert_closed_lambert(coeffs, 3)
    assert table.entries == oracle


def test_open_inversion_against_divisor_oracle():
    coeffs = {1: F(30), 3: F(13800), 5: F(27206280), 7: F(47823842250)}
    oracle = _divisor_recursion_closed(coeffs, weight=2)
    assert oracle == {1: F(30), 3: F(1530), 5: F(1088250), 7: F(975996780)}
    assert invert_open_lambert(coeffs, 7).entries == oracle


def test_single_divisor_cases():
    assert invert_closed_lambert({1: F(2875)}, 1)[1] == 2875
    assert invert_open_lambert({1: F(30)}, 1)[1] == 30


def test_lambert_two_sided_inverse():
    rng = random.Random(9)
    n = {d: F(rng.randint(-50, 50)) for d in range(1, 9)}
    forward = closed_lambert_sum(n, 8)
    assert invert_closed_lambert(forward, 8).entries == n
    n_odd = {d: F(rng.randint(-50, 50)) for d in range(1, 12, 2)}
    forward_o = open_lambert_sum(n_odd, 11)
    assert invert_open_lambert(forward_o, 11).entries == n_odd


def test_lambert_input_validation():
    with pytest.raises(KeyError):
        invert_closed_lambert({2: F(1)}, 2)   # degree 1 missing
    with pytest.raises(KeyError):
        invert_open_lambert({1: F(1), 2: F(1)}, 3)  # even index


def test_invariant_table_validation():
    with pytest.raises(ValueError):
        InvariantTable("open", {2: F(1)})
    with pytest.raises(ValueError):
        InvariantTable("closed", {0: F(1)})
    with pytest.raises(ValueError):
        InvariantTable("sideways", {1: F(1)})
