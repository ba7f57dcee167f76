from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from friends20.core_arith import (
    MR_CERTIFIED_LIMIT,
    FactoredNat,
    PrimeTable,
    WitnessTooLarge,
    abundancy,
    abundancy_sup,
    configure,
    factor_dict,
    is_friend_of_20,
    is_prime,
    primes_up_to,
    sigma,
    valuation,
)


def test_abundancy_of_20():
    assert abundancy(20) == Fraction(21, 10)
    assert sigma(20) == 42
    assert not is_friend_of_20(20)


def test_perfect_numbers():
    for n in (6, 28, 496, 8128):
        assert abundancy(n) == 2


@given(st.integers(min_value=1, max_value=10**6))
def test_sigma_matches_sympy(n):
    assert sigma(n) == sympy.divisor_sigma(n)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=2, max_value=10**30))
def test_factor_matches_sympy(n):
    assert factor_dict(n) == dict(sorted(sympy.factorint(n).items()))


def test_factor_composite_above_certified_bound():
    p, q = 10000000019, 1000000000000000000000007
    assert sympy.isprime(p) and sympy.isprime(q) and p * q > MR_CERTIFIED_LIMIT
    assert factor_dict(p * q) == {p: 1, q: 1}


def test_seedless_factoring_is_repeatable():
    configure(seedless=True)
    try:
        n = 10403 * 1000000007 * 998244353
        assert factor_dict(n) == factor_dict(n) == {101: 1, 103: 1, 998244353: 1, 1000000007: 1}
    finally:
        configure(seedless=False)


@given(st.integers(min_value=0, max_value=10**7))
def test_is_prime_small_range(n):
    assert is_prime(n) == sympy.isprime(n)


@settings(max_examples=200)
@given(st.integers(min_value=2**22, max_value=MR_CERTIFIED_LIMIT - 1))
def test_is_prime_large_range(n):
    assert is_prime(n) == sympy.isprime(n)


def test_strong_pseudoprimes_rejected():
    # strong pseudoprime to the first 12 prime bases
    assert not is_prime(318665857834031151167461)
    assert not is_prime(3825123056546413051)


def test_primality_refused_above_certified_bound():
    with pytest.raises(WitnessTooLarge):
        is_prime(2**89 - 1)


def test_prime_table_extends_on_demand():
    table = PrimeTable(initial=50)
    it = table.after(40)
    got = [next(it) for _ in range(30)]
    assert got == [p for p in primes_up_to(500) if p > 40][:30]


def test_factored_nat_canonical():
    a = FactoredNat(((5, 1), (2, 2), (5, 0)))
    assert a.factors == ((2, 2), (5, 1))
    assert a.value == 20 and int(a) == 20 and str(a) == "2^2 * 5"
    assert a.v(5) == 1 and a.v(3) == 0
    assert (a * FactoredNat.of(10)).as_dict() == {2: 3, 5: 2}
    assert FactoredNat().value == 1
    with pytest.raises(ValueError):
        FactoredNat(((4, 1),))
    with pytest.raises(ValueError):
        factor_dict(0)


def test_valuation():
    assert valuation(2 * 5**4 * 11, 5) == 4
    with pytest.raises(ValueError):
        valuation(0, 3)


def test_abundancy_sup():
    assert abundancy_sup([2, 5]) == Fraction(5, 2)
    with pytest.raises(ValueError):
        abundancy_sup([5, 5])
    with pytest.raises(ValueError):
        abundancy_sup([9])


odd_part = st.dictionaries(st.sampled_from([3, 5, 7, 11, 13, 17, 19, 23]), st.integers(1, 6), min_size=1)


@given(odd_part, st.integers(2, 50))
def test_multiplying_raises_abundancy(exps, k):
    n = FactoredNat.from_dict(exps).value
    assert abundancy(k * n) > abundancy(n)


@given(st.lists(st.integers(1, 6), min_size=1, max_size=5))
def test_smaller_primes_give_larger_abundancy(exps):
    small = [2, 3, 5, 7, 11][: len(exps)]
    large = [13, 17, 19, 23, 29][: len(exps)]
    lhs = FactoredNat(tuple(zip(small, exps)))
    rhs = FactoredNat(tuple(zip(large, exps)))
    assert abundancy(lhs) >= abundancy(rhs)


@given(odd_part)
def test_abundancy_below_supremum(exps):
    n = FactoredNat.from_dict(exps)
    assert abundancy(n) < abundancy_sup(n.primes)
