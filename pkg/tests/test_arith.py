import math
import random

import gmpy2
import pytest
from hypothesis import given, settings, strategies as st

from firstkind.arith import (
    Factorization,
    SmallFactorTable,
    as_perfect_square,
    divisors_from_factors,
    divisors_via_r,
    factorize,
    is_probable_prime,
    is_square,
    isqrt,
)

from oracles import trial_divisors, trial_factor


@given(st.integers(min_value=0, max_value=1 << 400))
def test_isqrt_matches_gmpy2(n):
    assert isqrt(n) == int(gmpy2.isqrt(n))


@given(st.integers(min_value=0, max_value=1 << 300))
def test_square_detection(n):
    r = as_perfect_square(n)
    assert (r is not None) == bool(gmpy2.is_square(n))
    if r is not None:
        assert r * r == n
    sq = n * n
    assert as_perfect_square(sq) == n
    assert is_square(sq)
    # neighbours of a large square are never squares
    if n > 1:
        assert not is_square(sq + 1) and not is_square(sq - 1)


def test_square_examples():
    assert as_perfect_square(32761) == 181
    assert as_perfect_square(37261) is None
    assert as_perfect_square(0) == 0 and as_perfect_square(1) == 1
    assert not is_square(-4)
    with pytest.raises(ValueError):
        isqrt(-1)
    with pytest.raises(ValueError):
        as_perfect_square(-1)


def test_primality_small_range():
    for n in range(-5, 20000):
        assert is_probable_prime(n) == (n > 1 and bool(gmpy2.is_prime(n))), n


@pytest.mark.parametrize("n", [561, 1105, 1729, 2047, 3215031751, 3825123056546413051,
                               318665857834031151167461, 2**61 - 1, 2**89 - 1, (2**61 - 1) * (2**31 - 1)])
def test_primality_hard_cases(n):
    assert is_probable_prime(n) == bool(gmpy2.is_prime(n, 50))


@settings(max_examples=300)
@given(st.integers(min_value=1, max_value=10**6))
def test_factorize_matches_trial_division(n):
    assert list(factorize(n).factors) == trial_factor(n)


def test_factorize_semiprimes():
    rng = random.Random(1)
    for _ in range(20):
        p = int(gmpy2.next_prime(rng.randrange(10**9, 10**11)))
        q = int(gmpy2.next_prime(rng.randrange(10**9, 10**11)))
        f = factorize(p * q * 12)
        assert f.value == p * q * 12
        assert all(is_probable_prime(x) for x, _ in f.factors)


def test_factorization_validates():
    assert Factorization(12, ((2, 2), (3, 1))).divisors() == [1, 2, 3, 4, 6, 12]
    with pytest.raises(ValueError):
        Factorization(12, ((3, 1), (2, 2)))
    with pytest.raises(ValueError):
        Factorization(13, ((2, 2), (3, 1)))
    with pytest.raises(ValueError):
        factorize(0)


@settings(max_examples=200)
@given(st.integers(min_value=2, max_value=20000))
def test_divisors_via_r(r):
    assert divisors_via_r(r) == trial_divisors(r * r - 1)


def test_divisors_via_r_examples():
    assert divisors_via_r(4) == [1, 3, 5, 15]
    assert divisors_via_r(2) == [1, 3]
    with pytest.raises(ValueError):
        divisors_via_r(1)


def test_divisors_via_r_large():
    r = 10**12 + 39
    divs = divisors_via_r(r)
    w = r * r - 1
    assert all(w % d == 0 for d in divs)
    assert len(divs) == math.prod(e + 1 for _, e in factorize(w).factors)


def test_factor_table_agrees():
    table = SmallFactorTable(5000)
    for n in range(1, 5001):
        assert sorted(table.factor_dict(n).items()) == trial_factor(n)
        assert factorize(n, table) == factorize(n)
    for r in range(2, 4999):
        assert divisors_via_r(r, table) == divisors_via_r(r)


def test_divisors_from_factors():
    assert divisors_from_factors([]) == [1]
    assert divisors_from_factors([(2, 3)]) == [1, 2, 4, 8]
