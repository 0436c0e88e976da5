"""Exact-arithmetic oracles: Euclid digits, round trips, mirror, totients."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gblab.rationals import (
    ContinuedFraction,
    Rational,
    cf_expand,
    cf_value,
    denominator_blocks,
    enumerate_omega,
    gauss_orbit,
    mirror,
    omega_count,
    orbit_depth,
    totient_sieve,
)


def euclid_digits(a, q):
    # Independent oracle: plain remainder chain, no shared code path.
    out = []
    while a:
        out.append(q // a)
        q, a = a, q % a
    return out


def test_cf_expand_hand_cases():
    assert cf_expand(Rational(3, 7)).coeffs == (2, 3)
    assert cf_expand(Rational(1, 1)).coeffs == (1,)
    assert cf_expand(Rational(1, 5)).coeffs == (5,)


def test_cf_expand_matches_euclid_oracle():
    cf = cf_expand(Rational(355, 452))
    assert list(cf.coeffs) == euclid_digits(355, 452)
    assert cf.coeffs[-1] >= 2
    assert cf_value(cf) == Rational(355, 452)


def test_cf_value_hand_cases():
    assert cf_value(ContinuedFraction((2, 3))) == Rational(3, 7)
    assert cf_value(ContinuedFraction((1,))) == Rational(1, 1)
    with pytest.raises(ValueError):
        cf_value(ContinuedFraction(()))
    with pytest.raises(ValueError):
        cf_value(ContinuedFraction((3, 1)))


@given(st.lists(st.integers(1, 30), min_size=1, max_size=12))
@settings(max_examples=200, deadline=None)
def test_cf_round_trip_random_words(word):
    if len(word) > 1 and word[-1] < 2:
        word[-1] += 1
    cf = ContinuedFraction(tuple(word))
    if len(word) > 1 and word[0] == 0:
        return
    x = cf_value(cf)
    if x == Rational(1, 1):
        assert cf.coeffs == (1,)
        return
    assert cf_expand(x).coeffs == cf.coeffs


def test_gauss_orbit_hand_cases():
    orb = gauss_orbit(Rational(3, 7))
    assert orb.points == (Rational(3, 7), Rational(1, 3))
    assert gauss_orbit(Rational(1, 5)).points == (Rational(1, 5),)


def test_gauss_orbit_fibonacci():
    orb = gauss_orbit(Rational(89, 144))
    assert len(orb) == 10
    assert list(cf_expand(Rational(89, 144)).coeffs) == euclid_digits(89, 144)


def test_orbit_exactness_and_digit_sums_exhaustive():
    # Digit chain along the orbit must match direct Euclid remainders,
    # and cf_value(cf_expand(x)) must be the identity.
    for x in enumerate_omega(120):
        cf = cf_expand(x)
        assert list(cf.coeffs) == euclid_digits(x.num, x.den)
        assert cf_value(cf) == x
        orb = gauss_orbit(x)
        assert len(orb) == cf.depth == orbit_depth(x)
        for j, pt in enumerate(orb.points):
            assert cf_expand(pt).coeffs == cf.coeffs[j:]


def test_depth_continuant_bound():
    for x in enumerate_omega(500):
        assert orbit_depth(x) <= 2.08 * math.log(x.den) + 2


def test_mirror_hand_case():
    assert mirror(Rational(2, 7)) == Rational(3, 7)


def test_mirror_involution_and_denominator():
    # Word reversal is an involution on (0,1/2]; on (1/2,1) the canonical
    # word starts with digit 1 and reversal composes to the reflection 1-x
    # (e.g. 2/3 = [0;1,2] -> [0;2,1] = 1/3 = [0;3] -> 1/3).
    for x in enumerate_omega(200):
        if x == Rational(1, 1):
            continue
        m = mirror(x)
        assert m.den == x.den
        if 2 * x.num <= x.den:
            assert mirror(m) == x
        else:
            assert mirror(m) == Rational(x.den - x.num, x.den)


def test_mirror_modular_inverse_on_odd_depth():
    x = Rational(3, 11)
    assert orbit_depth(x) % 2 == 1
    assert mirror(x).num * 3 % 11 == 1
    for x in enumerate_omega(150):
        if x.den == 1 or orbit_depth(x) % 2 == 0:
            continue
        assert mirror(x).num * x.num % x.den == 1


def test_mirror_rejects_one():
    with pytest.raises(ValueError):
        mirror(Rational(1, 1))


def test_omega_counts():
    assert list(enumerate_omega(1)) == [Rational(1, 1)]
    assert len(list(enumerate_omega(5))) == 10
    assert omega_count(1000) == 304192


def test_enumeration_matches_totient_sieve():
    for Q in (10, 100):
        xs = list(enumerate_omega(Q))
        assert len(xs) == omega_count(Q)
        assert len(set(xs)) == len(xs)
        phi = totient_sieve(Q)
        for q in range(1, Q + 1):
            assert sum(1 for x in xs if x.den == q) == phi[q] if q > 1 else 1


def test_enumeration_order_and_partitioning():
    full = list(enumerate_omega(60))
    dens = [x.den for x in full]
    assert dens == sorted(dens)
    for q in set(dens):
        nums = [x.num for x in full if x.den == q]
        assert nums == sorted(nums)
    blocks = denominator_blocks(60, 7)
    assert blocks[0][0] == 1 and blocks[-1][1] == 60
    stitched = []
    for lo, hi in blocks:
        assert lo <= hi
        stitched.extend(enumerate_omega(60, lo, hi))
    assert stitched == full


def test_blocks_cover_range_disjointly():
    for Q, n in ((1000, 16), (5, 64), (37, 3)):
        blocks = denominator_blocks(Q, n)
        assert blocks[0][0] == 1 and blocks[-1][1] == Q
        for (lo1, hi1), (lo2, hi2) in zip(blocks, blocks[1:]):
            assert lo2 == hi1 + 1
        assert len(blocks) <= n
