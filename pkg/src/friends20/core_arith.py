"""Exact integer and rational arithmetic: factorization, sigma, abundancy.

Everything that feeds a decision is exact.  Abundancy values are
:class:`fractions.Fraction` instances (aliased as :data:`ExactRatio`), and
prime factorizations are held in the immutable :class:`FactoredNat`.
"""

from __future__ import annotations

import bisect
import math
import random
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Iterator

import numpy as np

ExactRatio = Fraction

FRIEND_RATIO = Fraction(21, 10)

SPF_LIMIT = 1 << 22
# Strong-pseudoprime test to the first 13 prime bases is exact below this bound.
MR_CERTIFIED_LIMIT = 3317044064679887385961981
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


class WitnessTooLarge(ValueError):
    """Raised when a number is too large for certified primality/factoring."""


_spf_lock = threading.Lock()
_spf_cache: np.ndarray | None = None
_rng = random.Random()
_seedless = False


def configure(*, seedless: bool | None = None) -> None:
    """Select deterministic Pollard-rho starting points (``seedless=True``)."""
    global _seedless
    if seedless is not None:
        _seedless = seedless


def spf_table(limit: int = SPF_LIMIT) -> np.ndarray:
    """Smallest-prime-factor table covering ``0..limit`` (shared, grow-only)."""
    global _spf_cache
    table = _spf_cache
    if table is not None and len(table) > limit:
        return table
    with _spf_lock:
        if _spf_cache is not None and len(_spf_cache) > limit:
            return _spf_cache
        size = max(limit, SPF_LIMIT) + 1
        spf = np.zeros(size, dtype=np.uint32)
        spf[1] = 1
        for p in range(2, math.isqrt(size - 1) + 1):
            if spf[p] == 0:
                block = spf[p * p :: p]
                block[block == 0] = p
        unset = spf == 0
        spf[unset] = np.arange(size, dtype=np.uint32)[unset]
        _spf_cache = spf
        return spf


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray(b"\x01") * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytes(len(range(p * p, n + 1, p)))
    return [i for i, flag in enumerate(sieve) if flag]


class PrimeTable:
    """Grow-only ascending list of primes; reads need no lock."""

    def __init__(self, initial: int = 1 << 12):
        self._lock = threading.Lock()
        self._limit = initial
        self._primes = primes_up_to(initial)

    def ensure(self, n: int) -> None:
        if n <= self._limit:
            return
        with self._lock:
            if n <= self._limit:
                return
            new_limit = max(n, 2 * self._limit)
            self._primes = primes_up_to(new_limit)
            self._limit = new_limit

    def after(self, start: int) -> Iterator[int]:
        """Yield the primes strictly greater than ``start``, without end."""
        current = start
        while True:
            primes = self._primes
            i = bisect.bisect_right(primes, current)
            if i == len(primes):
                self.ensure(2 * max(self._limit, current))
                continue
            while i < len(primes):
                current = primes[i]
                yield current
                i += 1


PRIMES = PrimeTable()


def _miller_rabin(n: int) -> bool:
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_prime(n: int) -> bool:
    """Deterministic primality test.

    Exact below ``MR_CERTIFIED_LIMIT``.  Above it a failed strong test still
    proves compositeness, but a probable prime raises
    :class:`WitnessTooLarge` instead of returning an uncertified answer.
    """
    if n < 2:
        return False
    if n < SPF_LIMIT:
        return int(spf_table()[n]) == n
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return False
    if not _miller_rabin(n):
        return False
    if n >= MR_CERTIFIED_LIMIT:
        raise WitnessTooLarge(f"a {n.bit_length()}-bit probable prime cannot be certified")
    return True


def _brent(n: int) -> int:
    """Return a nontrivial factor of the odd composite ``n``."""
    if n % 2 == 0:
        return 2
    c = 0
    while True:
        if _seedless:
            c += 1
            y, m = 2, 128
        else:
            c = _rng.randrange(1, n)
            y, m = _rng.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def _factor_into(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if n < SPF_LIMIT:
        spf = spf_table()
        while n > 1:
            p = int(spf[n])
            out[p] = out.get(p, 0) + 1
            n //= p
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _brent(n)
    _factor_into(d, out)
    _factor_into(n // d, out)


def factor_dict(n: int) -> dict[int, int]:
    if n < 1:
        raise ValueError(f"factor requires n >= 1, got {n}")
    out: dict[int, int] = {}
    for p in (2, 3, 5, 7, 11, 13):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    _factor_into(n, out)
    return dict(sorted(out.items()))


@dataclass(frozen=True)
class FactoredNat:
    """A positive integer stored as its canonical prime factorization.

    ``factors`` is a tuple of ``(prime, exponent)`` pairs with strictly
    increasing primes and positive exponents; the empty tuple is 1.
    Construction canonicalizes (sort, merge, drop zero exponents) and
    checks that every base is prime.
    """

    factors: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        merged: dict[int, int] = {}
        for p, e in self.factors:
            p, e = int(p), int(e)
            if e < 0:
                raise ValueError(f"negative exponent {e} for {p}")
            if e:
                merged[p] = merged.get(p, 0) + e
        for p in merged:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
        object.__setattr__(self, "factors", tuple(sorted(merged.items())))

    @classmethod
    def of(cls, n: int) -> FactoredNat:
        return cls(tuple(factor_dict(n).items()))

    @classmethod
    def from_dict(cls, d: dict[int, int]) -> FactoredNat:
        return cls(tuple(d.items()))

    @property
    def value(self) -> int:
        return reduce(lambda acc, pe: acc * pe[0] ** pe[1], self.factors, 1)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def as_dict(self) -> dict[int, int]:
        return dict(self.factors)

    def v(self, p: int) -> int:
        """p-adic valuation."""
        for q, e in self.factors:
            if q == p:
                return e
        return 0

    @property
    def omega(self) -> int:
        return len(self.factors)

    @property
    def big_omega(self) -> int:
        return sum(e for _, e in self.factors)

    def __mul__(self, other: FactoredNat) -> FactoredNat:
        return FactoredNat(self.factors + other.factors)

    def __int__(self) -> int:
        return self.value

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        return " * ".join(f"{p}^{e}" if e > 1 else str(p) for p, e in self.factors)


def as_factored(x: int | FactoredNat) -> FactoredNat:
    return x if isinstance(x, FactoredNat) else FactoredNat.of(x)


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0 is undefined")
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def sigma_prime_power(p: int, e: int) -> int:
    return (p ** (e + 1) - 1) // (p - 1)


def sigma(x: int | FactoredNat) -> int:
    """Sum of divisors, computed multiplicatively per prime power."""
    f = as_factored(x)
    result = 1
    for p, e in f.factors:
        result *= sigma_prime_power(p, e)
    return result


def abundancy(x: int | FactoredNat) -> Fraction:
    f = as_factored(x)
    return Fraction(sigma(f), f.value)


def abundancy_sup(primes: Iterable[int]) -> Fraction:
    """Exact ``prod p/(p-1)``: the supremum of I(n) over n with these primes."""
    primes = list(primes)
    if not primes:
        raise ValueError("abundancy_sup needs at least one prime")
    if len(set(primes)) != len(primes):
        raise ValueError(f"duplicate primes in {primes}")
    result = Fraction(1)
    for p in primes:
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        result *= Fraction(p, p - 1)
    return result


def is_friend_of_20(n: int) -> bool:
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return n != 20 and 10 * sigma(n) == 21 * n
