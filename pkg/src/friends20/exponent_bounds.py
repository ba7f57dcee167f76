"""Partition values, the Omega lower bound, size bounds and congruence filters."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping

from .core_arith import is_prime
from .order_engine import mult_order

SIZE_FLOOR = 2 * 10**12
SIZE_WITNESS = ((2, 1), (5, 4), (11, 2), (13, 2), (17, 2), (19, 2))


def partitions(n: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    """Partitions of ``n`` as non-increasing tuples (descending-parts recursion)."""
    if largest is None:
        largest = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def partition_value(parts: tuple[int, ...], a: int) -> int:
    return sum(a**c for c in parts) - len(parts)


@dataclass(frozen=True)
class PartitionValueSet:
    """The multiset of ``sum(a^c_i) - r`` over all partitions ``(c_1..c_r)`` of ``n``."""

    n: int
    a: int
    values: tuple[int, ...]

    @classmethod
    def build(cls, n: int, a: int) -> PartitionValueSet:
        if n < 1:
            raise ValueError("n must be >= 1")
        return cls(n, a, tuple(partition_value(p, a) for p in partitions(n)))

    def minimum(self) -> int:
        return min(self.values)


def min_partition_value(n: int, a: int) -> int:
    """Minimum of ``sum(a^c_i) - r`` over partitions of ``n``; attained by all ones.

    Every part satisfies ``a*c <= a^c`` once ``a >= 3``, so the all-ones
    partition gives the least value ``n*(a - 1)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if a <= 2:
        raise ValueError(f"base must exceed e (a >= 3), got {a}")
    return n * (a - 1)


def omega_capital_lower_bound(a: int, omega: int) -> int:
    """Lower bound ``2*omega + 6a - 5`` on Omega(N) for a friend N = 2*5^(2a)*m^2."""
    if a < 1 or omega < 6:
        raise ValueError("requires a >= 1 and omega >= 6")
    return 2 * omega + 6 * a - 5


def omega_m_lower_bound(a: int, omega_N: int) -> int:
    """Lower bound ``omega(N) + 2a - 3`` on Omega(m)."""
    if a < 1 or omega_N < 6:
        raise ValueError("requires a >= 1 and omega >= 6")
    return omega_N + 2 * a - 3


@dataclass(frozen=True)
class SizeBound:
    """The bound ``mantissa * base^exponent``, kept symbolic."""

    mantissa: int
    base: int
    exponent: int

    DIGIT_BUDGET = 100_000

    def value(self, digit_budget: int | None = None) -> int:
        budget = self.DIGIT_BUDGET if digit_budget is None else digit_budget
        # log10(6) < 0.7782
        if self.exponent * 0.7782 > budget:
            raise OverflowError(f"6^{self.exponent} exceeds the {budget}-digit budget")
        return self.mantissa * self.base**self.exponent

    def exceeds(self, n: int) -> bool:
        """Exact test ``n < mantissa * base^exponent`` without expanding needlessly."""
        if self.exponent > n.bit_length():
            return True
        return n < self.mantissa * self.base**self.exponent

    def __str__(self) -> str:
        return f"{self.mantissa}*{self.base}^{self.exponent}"


def size_upper_bound(K: int, a: int) -> SizeBound:
    """``N < 10 * 6^((2^(K-2a+3) - 1)^2)`` when Omega(m) <= K."""
    k = K - 2 * a + 3
    if a < 1 or k < 1:
        raise ValueError(f"inconsistent K={K}, a={a}: need K - 2a + 3 >= 1")
    return SizeBound(10, 6, (2**k - 1) ** 2)


@dataclass(frozen=True)
class SizeLowerBound:
    witness: tuple[tuple[int, int], ...]
    value: int
    floor: int

    @property
    def certified(self) -> bool:
        return self.value > self.floor

    @property
    def distinct_primes(self) -> int:
        return len(self.witness)


def size_lower_bound() -> SizeLowerBound:
    value = 1
    for p, e in SIZE_WITNESS:
        value *= p**e
    return SizeLowerBound(SIZE_WITNESS, value, SIZE_FLOOR)


@dataclass(frozen=True)
class CongruenceFilterSpec:
    """A prime ``p = 1 (mod 6)`` where 5 has order ``f`` divisible by 3."""

    p: int
    f: int

    def __post_init__(self):
        if not is_prime(self.p) or self.p % 6 != 1:
            raise ValueError(f"{self.p} is not a prime = 1 (mod 6)")
        if self.f % 3 or pow(5, self.f, self.p) != 1:
            raise ValueError(f"invalid order {self.f} for 5 mod {self.p}")

    @classmethod
    def for_prime(cls, p: int) -> CongruenceFilterSpec:
        return cls(p, mult_order(5, p))


def congruence_specs(limit: int) -> list[CongruenceFilterSpec]:
    """All valid filter specs with ``p <= limit``."""
    out = []
    for p in range(7, limit + 1, 6):
        if is_prime(p) and mult_order(5, p) % 3 == 0:
            out.append(CongruenceFilterSpec.for_prime(p))
    return out


def congruence_reject(exponents: Mapping[int, int], spec: CongruenceFilterSpec) -> bool:
    """True when every odd-prime exponent, 5's included, is ``-1 (mod f)``.

    ``exponents`` maps each odd prime of the signature to its (known) exponent.
    Such a signature cannot be a friend of 20: the exponent of 5 forces
    ``p | N`` and then ``3 | sigma(p^(v_p))``.
    """
    if spec.f % 3:
        raise ValueError("filter requires 3 | f")
    if 5 not in exponents:
        raise ValueError("signature must contain the prime 5")
    if (exponents[5] + 1) % spec.f:
        return False
    return all((e + 1) % spec.f == 0 for p, e in exponents.items() if p != 2)
