from __future__ import annotations

import math
from fractions import Fraction

import pytest
import sympy

from friends20.bound_engine import (
    UNBOUNDED,
    check_friend_shape,
    exceeds_with_min_exponents,
    feasibility_product,
    fixed_supremum,
    max_feasible_prime,
    prime_window,
    second_prime_bound,
    window_size_estimate,
)
from friends20.core_arith import FRIEND_RATIO, FactoredNat


def brute_window(fixed, slots, floor=None):
    """Largest admissible q whose best case still reaches 21/10, by direct scan."""
    floor = max(fixed) if floor is None else floor
    base = Fraction(3, 2) * math.prod(Fraction(p, p - 1) for p in fixed if p != 2)
    admissible = [p for p in sympy.primerange(floor + 1, 5000) if p not in (3, 7) and p not in fixed]
    best = None
    for i, q in enumerate(admissible[:-slots]):
        value = base * math.prod(Fraction(r, r - 1) for r in admissible[i : i + slots])
        if value >= FRIEND_RATIO:
            best = q
        else:
            break
    return best


@pytest.mark.parametrize(
    "fixed, slots, expected",
    [
        ([2, 5], 2, 17),
        ([2, 5, 17], 1, 19),
        ([2, 5, 11, 59], 1, 1069),
        ([2, 5, 11], 1, 53),
        ([2, 5, 13], 1, 29),
        ([2, 5, 11], 2, 109),
        ([2, 5, 13], 2, 59),
        ([2, 5, 19], 2, 31),
        ([2, 5, 17], 2, 31),
        ([2, 5, 13, 31], 1, 2011),
        ([2, 5], 3, 19),
        ([2, 5, 19], 1, None),
        ([2, 5], 1, None),
    ],
)
def test_windows(fixed, slots, expected):
    assert max_feasible_prime(fixed, slots) == expected
    assert brute_window(fixed, slots) == expected


def test_window_boundary_witnesses():
    w = prime_window([2, 5, 11, 59], 1)
    assert feasibility_product([2, 5, 11, 59], 1069, 1) >= FRIEND_RATIO
    assert feasibility_product([2, 5, 11, 59], 1087, 1) < FRIEND_RATIO
    assert w.candidates()[0] == 61 and w.candidates()[-1] == 1069


def test_unbounded_window():
    assert max_feasible_prime([2, 5, 11, 41], 1) == UNBOUNDED
    assert fixed_supremum([2, 5, 11, 41]) >= FRIEND_RATIO
    with pytest.raises(ValueError):
        prime_window([2, 5, 11, 41], 1).candidates()


def test_omega_three_product():
    # two odd primes 5 and 11 at most: 3/2 * 5/4 * 11/10 = 33/16
    assert feasibility_product([2, 5], 11, 1) == Fraction(33, 16) < FRIEND_RATIO


def test_window_estimate_is_an_upper_bound():
    for fixed, slots in (([2, 5], 2), ([2, 5, 11], 2), ([2, 5, 13, 31], 1), ([2, 5, 11, 59], 1)):
        bound = max_feasible_prime(fixed, slots)
        assert window_size_estimate(fixed, slots) >= bound


def test_argument_checks():
    with pytest.raises(ValueError):
        max_feasible_prime([2, 11], 1)
    with pytest.raises(ValueError):
        max_feasible_prime([2, 5], 0)
    with pytest.raises(ValueError):
        second_prime_bound([2, 5], 1)
    assert second_prime_bound([2, 5, 17], 1) == 19


def test_min_exponent_overshoot():
    assert exceeds_with_min_exponents(2 * 5**2 * 11**2 * 13**2)
    assert not exceeds_with_min_exponents(2 * 5**2 * 11**2)
    with pytest.raises(ValueError):
        check_friend_shape(FactoredNat.of(4 * 25))
    with pytest.raises(ValueError):
        check_friend_shape(FactoredNat.of(2 * 5**3))
