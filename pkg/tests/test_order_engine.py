from __future__ import annotations

import math

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from friends20.core_arith import WitnessTooLarge
from friends20.order_engine import (
    OrderRecord,
    divides_sigma_even_power,
    five_divides_constraint,
    forced_companions,
    minimal_witness_exponent,
    mult_order,
    repunit,
    sigma_period,
)

ODD_PRIMES = list(sympy.primerange(3, 200))


def direct_divides(p: int, q: int, a: int) -> bool:
    return sum(pow(q, k, p) for k in range(2 * a + 1)) % p == 0


def test_order_criterion_matches_direct_sums():
    # all odd primes p, q <= 200 and a <= 60, by running geometric sums mod p
    for p in ODD_PRIMES:
        for q in ODD_PRIMES:
            if p == q:
                continue
            total, power = 1, 1
            for a in range(1, 61):
                power = power * q % p
                total += power
                power = power * q % p
                total += power
                assert divides_sigma_even_power(p, q, a) == (total % p == 0), (p, q, a)


@given(st.sampled_from(ODD_PRIMES), st.sampled_from(ODD_PRIMES + [2]), st.integers(1, 300))
def test_periodicity(p, q, a):
    if p == q:
        return
    f = sigma_period(q, p)
    if f is None:
        assert not divides_sigma_even_power(p, q, a)
    else:
        assert divides_sigma_even_power(p, q, a) == ((2 * a + 1) % f == 0)
        assert f == (p if q % p == 1 else mult_order(q, p))


@given(st.sampled_from(list(sympy.primerange(2, 5000))), st.integers(2, 10**6))
def test_mult_order_matches_sympy(p, q):
    if q % p == 0:
        with pytest.raises(ValueError):
            mult_order(q, p)
        return
    assert mult_order(q, p) == sympy.n_order(q, p)


def test_order_records_divide_p_minus_one():
    for p in ODD_PRIMES:
        for q in (2, 3, 5, 7, 11, 31):
            if p != q:
                rec = OrderRecord.of(p, q)
                assert (p - 1) % rec.order == 0
    with pytest.raises(ValueError):
        OrderRecord(11, 5, 4)


def test_known_table_values():
    assert sigma_period(5, 35671) == 29
    assert sigma_period(151, 3) == 3
    assert sigma_period(71, 883) == 7
    assert mult_order(5, 11) == 5
    # q = 1 (mod p): the period is p itself while the order is 1
    assert mult_order(11, 5) == 1 and sigma_period(11, 5) == 5


def test_repunit_is_sigma_of_power():
    for q in (3, 5, 11):
        for f in range(1, 12):
            assert repunit(q, f) == sympy.divisor_sigma(q ** (f - 1))


def test_forced_companions_of_59_in_sigma_of_5_powers():
    cs = forced_companions(5, 59)
    assert cs.f == 29
    assert {59, 35671} <= cs.companions
    assert cs.companions == {59, 35671, 22125996444329}
    assert math.prod(cs.companions) == cs.witness == repunit(5, 29)


def test_forced_companion_soundness():
    checked = 0
    for q in (5, 11, 13, 31, 71):
        for p in sympy.primerange(3, 120):
            if p == q:
                continue
            try:
                cs = forced_companions(q, p)
            except WitnessTooLarge:
                continue
            checked += 1
            if cs.never:
                assert cs.companions == frozenset()
                continue
            value = sum(q**k for k in range(cs.f))
            for r in cs.companions:
                assert value % r == 0 and sympy.isprime(r)
            assert p in cs.companions
            # whenever p divides sigma(q^2a), so does every companion
            for a in range(1, 40):
                if divides_sigma_even_power(p, q, a):
                    s = sum(q**k for k in range(2 * a + 1))
                    assert all(s % r == 0 for r in cs.companions)
    assert checked > 100


def test_nested_periods_divide_together():
    # if the period of p* divides the period of p, p*p* divides sigma together with p
    for q in (5, 11, 31):
        primes = [p for p in sympy.primerange(3, 400) if p != q and sigma_period(q, p)]
        for p in primes:
            for p2 in primes:
                if p != p2 and sigma_period(q, p) % sigma_period(q, p2) == 0:
                    a = (sigma_period(q, p) - 1) // 2
                    assert divides_sigma_even_power(p2, q, a)


def test_five_divides_constraint():
    for q in sympy.primerange(11, 2000):
        reachable = any(divides_sigma_even_power(5, q, a) for a in range(1, 11))
        assert five_divides_constraint(q) == reachable == (q % 10 == 1)
    with pytest.raises(ValueError):
        five_divides_constraint(9)


def test_minimal_witness_exponent():
    assert minimal_witness_exponent(31, 5) == 1
    assert minimal_witness_exponent(11, 5) == 2
    assert minimal_witness_exponent(3, 5) is None
    for p, q in ((59, 5), (7, 71), (13, 107)):
        a = minimal_witness_exponent(p, q)
        assert divides_sigma_even_power(p, q, a)
        assert not any(divides_sigma_even_power(p, q, b) for b in range(1, a))


def test_huge_repunit_refused():
    with pytest.raises(WitnessTooLarge):
        forced_companions(10007, 1000003)
