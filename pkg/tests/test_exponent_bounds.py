from __future__ import annotations

import pytest
from sympy.utilities.iterables import partitions as sympy_partitions

from friends20.core_arith import FactoredNat, is_friend_of_20
from friends20.exponent_bounds import (
    CongruenceFilterSpec,
    PartitionValueSet,
    congruence_reject,
    congruence_specs,
    min_partition_value,
    omega_capital_lower_bound,
    omega_m_lower_bound,
    partitions,
    size_lower_bound,
    size_upper_bound,
)
from friends20.search import SearchConfig, admissible_m


def oracle_min(n: int, a: int) -> int:
    return min(sum(a**c * k for c, k in p.items()) - sum(p.values()) for p in sympy_partitions(n))


@pytest.mark.parametrize("a", [3, 5, 7])
def test_minimum_matches_partition_oracle(a):
    for n in range(1, 13):
        assert min_partition_value(n, a) == oracle_min(n, a) == PartitionValueSet.build(n, a).minimum()


def test_partition_generator_counts():
    from sympy import partition as npartitions

    for n in range(1, 16):
        got = list(partitions(n))
        assert len(got) == len(set(got)) == npartitions(n)
        assert all(sum(p) == n and list(p) == sorted(p, reverse=True) for p in got)


def test_base_five_odd_lengths():
    for a in range(1, 7):
        assert min_partition_value(2 * a - 1, 5) == 8 * a - 4 == oracle_min(2 * a - 1, 5)


def test_small_examples():
    assert min_partition_value(1, 5) == 4
    assert sorted(PartitionValueSet.build(3, 5).values) == [12, 28, 124]
    with pytest.raises(ValueError):
        min_partition_value(3, 2)
    with pytest.raises(ValueError):
        min_partition_value(0, 5)


def test_linear_minus_power_decreasing():
    for a in (3, 4, 5, 7):
        values = [a * x - a**x for x in range(1, 21)]
        assert all(u > v for u, v in zip(values, values[1:]))


def test_omega_bounds():
    assert omega_capital_lower_bound(1, 6) == 13
    assert omega_capital_lower_bound(2, 6) == 19
    assert omega_capital_lower_bound(1, 7) == 15
    assert omega_m_lower_bound(1, 6) == 5
    assert omega_m_lower_bound(2, 6) == 7
    assert omega_m_lower_bound(1, 8) == 7
    for a in range(1, 10):
        for w in range(6, 15):
            assert 2 * omega_m_lower_bound(a, w) + 2 * a + 1 == omega_capital_lower_bound(a, w)
    with pytest.raises(ValueError):
        omega_capital_lower_bound(1, 5)


def test_size_upper_bound():
    assert size_upper_bound(5, 1).exponent == 3969
    assert size_upper_bound(7, 2).exponent == 3969
    for a in range(1, 5):
        sb = size_upper_bound(2 * a - 2, a)
        assert sb.exponent == 1 and sb.value() == 60
    big = size_upper_bound(5, 1)
    assert len(str(big.value())) == 3090
    assert big.exceeds(10**3000) and not big.exceeds(10**3100)
    with pytest.raises(OverflowError):
        size_upper_bound(20, 1).value()
    with pytest.raises(ValueError):
        size_upper_bound(1, 3)


def test_size_lower_bound():
    lb = size_lower_bound()
    assert lb.value == 2 * 5**4 * 11**2 * 13**2 * 17**2 * 19**2 == 2666779651250
    assert lb.certified and lb.value > 2 * 10**12
    assert lb.distinct_primes == 6


def test_congruence_filter_examples():
    spec = CongruenceFilterSpec.for_prime(31)
    assert spec.f == 3
    assert congruence_reject({5: 2, 11: 2, 13: 2, 17: 2, 19: 2, 23: 2}, spec)
    assert not congruence_reject({5: 4, 11: 2, 13: 2}, spec)
    assert not congruence_reject({5: 2, 11: 4, 13: 2}, spec)
    with pytest.raises(ValueError):
        CongruenceFilterSpec(11, 5)
    with pytest.raises(ValueError):
        CongruenceFilterSpec(31, 4)


def test_congruence_specs_are_valid():
    specs = congruence_specs(500)
    assert [s.p for s in specs if s.f % 2][:3] == [19, 31, 79]
    for s in specs:
        assert s.p % 6 == 1 and s.f % 3 == 0 and pow(5, s.f, s.p) == 1


def test_congruence_filter_only_hits_its_hypothesis():
    cfg = SearchConfig(limit=10**7)
    specs = congruence_specs(200)
    fired = 0
    for a in range(1, cfg.a_max + 1):
        for m in admissible_m(1, cfg.m_bound(a)).tolist():
            n = 2 * 25**a * m * m
            exps = {p: e for p, e in FactoredNat.of(n).factors if p != 2}
            for s in specs:
                if congruence_reject(exps, s):
                    fired += 1
                    assert all((e + 1) % s.f == 0 for e in exps.values())
                    assert not is_friend_of_20(n)
    assert fired > 0
