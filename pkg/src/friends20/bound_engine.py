"""Upper bounds for successive prime divisors of a hypothetical friend of 20.

A friend ``N = 2 * 5^(2a) * m^2`` has ``I(N) = 21/10`` while ``I(N)`` is
strictly below ``3/2 * prod p/(p-1)`` over its odd primes (the factor of 2
is exact because 2 divides N exactly once).  If the primes still to be
chosen are at least ``q``, the best they can contribute is the product over
the next consecutive admissible primes starting at ``q``; once that falls
under 21/10 no larger ``q`` can work either.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import islice
from typing import Iterable, Iterator

from .core_arith import FRIEND_RATIO, PRIMES, FactoredNat, abundancy, as_factored

EXCLUDED = frozenset({3, 7})
UNBOUNDED = math.inf


def fixed_supremum(fixed: Iterable[int]) -> Fraction:
    """``3/2`` for the prime 2 times ``p/(p-1)`` for every other fixed prime."""
    prod = Fraction(1)
    for p in fixed:
        prod *= Fraction(3, 2) if p == 2 else Fraction(p, p - 1)
    return prod


def candidate_stream(floor: int, skip: Iterable[int] = ()) -> Iterator[int]:
    """Admissible primes above ``floor``: never 3 or 7, never an already fixed prime."""
    skip = EXCLUDED | frozenset(skip)
    return (p for p in PRIMES.after(floor) if p not in skip)


def feasibility_product(fixed: Iterable[int], q: int, slots: int, skip: Iterable[int] = ()) -> Fraction:
    """Sup product with ``slots`` consecutive admissible primes starting at ``q``."""
    fixed = list(fixed)
    prod = fixed_supremum(fixed)
    for r in islice(candidate_stream(q - 1, set(skip) | set(fixed)), slots):
        prod *= Fraction(r, r - 1)
    return prod


def _check(fixed: list[int], slots: int) -> None:
    if 2 not in fixed or 5 not in fixed:
        raise ValueError(f"fixed primes must contain 2 and 5, got {fixed}")
    if len(set(fixed)) != len(fixed):
        raise ValueError(f"fixed primes must be distinct, got {fixed}")
    if slots < 1:
        raise ValueError("free_slots must be >= 1")


@dataclass(frozen=True)
class PrimeWindow:
    """Admissible range ``lower..upper`` for the next free prime.

    ``upper`` is :data:`UNBOUNDED` when the fixed primes alone already
    permit abundancy 21/10, and ``None`` when even the smallest admissible
    candidate fails.
    """

    fixed_primes: tuple[int, ...]
    free_slots: int
    lower: int
    upper: int | float | None

    @property
    def empty(self) -> bool:
        return self.upper is None

    @property
    def bounded(self) -> bool:
        return self.upper is not None and self.upper != UNBOUNDED

    def candidates(self) -> list[int]:
        if not self.bounded:
            raise ValueError("only a bounded window can be enumerated")
        out = []
        for p in candidate_stream(self.lower - 1, self.fixed_primes):
            if p > self.upper:
                break
            out.append(p)
        return out


def prime_window(
    fixed: Iterable[int],
    free_slots: int,
    floor: int | None = None,
    target: Fraction = FRIEND_RATIO,
) -> PrimeWindow:
    fixed = list(fixed)
    _check(fixed, free_slots)
    if floor is None:
        floor = max(fixed)
    stream = candidate_stream(floor, fixed)
    lower = next(stream)
    if fixed_supremum(fixed) >= target:
        return PrimeWindow(tuple(fixed), free_slots, lower, UNBOUNDED)
    best = None
    q = lower
    while feasibility_product(fixed, q, free_slots) >= target:
        best = q
        q = next(stream)
    return PrimeWindow(tuple(fixed), free_slots, lower, best)


def max_feasible_prime(
    fixed: Iterable[int],
    free_slots: int,
    target: Fraction = FRIEND_RATIO,
    floor: int | None = None,
) -> int | float | None:
    """Largest admissible prime the next free slot can take.

    Returns ``None`` for an empty window and :data:`UNBOUNDED` (``math.inf``)
    when every admissible prime is feasible.
    """
    return prime_window(fixed, free_slots, floor, target).upper


def second_prime_bound(fixed: Iterable[int], slots: int) -> int | float | None:
    fixed = list(fixed)
    if not any(p not in (2, 5) for p in fixed):
        raise ValueError("second_prime_bound needs an odd prime beyond 5 among the fixed primes")
    return max_feasible_prime(fixed, slots)


def window_size_estimate(fixed: Iterable[int], free_slots: int, target: Fraction = FRIEND_RATIO) -> float:
    """Cheap upper estimate of the window's upper bound (no scanning).

    Each slot contributes at most ``q/(q-1)``, so feasibility requires
    ``(q/(q-1))^k >= target / fixed_sup``.
    """
    sup = fixed_supremum(fixed)
    if sup >= target:
        return math.inf
    need = float(target / sup) ** (1.0 / free_slots)
    return 1.0 / (1.0 - 1.0 / need) + 1.0


def check_friend_shape(assigned: FactoredNat) -> None:
    if assigned.v(2) != 1:
        raise ValueError("the prime 2 must appear with exponent exactly 1")
    if assigned.v(5) < 2:
        raise ValueError("the prime 5 must appear with a positive even exponent")
    for p, e in assigned.factors:
        if p != 2 and e % 2:
            raise ValueError(f"odd exponent {e} on {p}")


def exceeds_with_min_exponents(assigned: int | FactoredNat, target: Fraction = FRIEND_RATIO) -> bool:
    """Whether ``I(assigned) > 21/10``, which rules out every multiple of it."""
    assigned = as_factored(assigned)
    check_friend_shape(assigned)
    return abundancy(assigned) > target
