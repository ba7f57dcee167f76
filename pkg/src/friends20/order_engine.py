"""Multiplicative orders and the even-power sigma divisibility criterion.

For primes ``p != q`` the question "does p divide sigma(q^(2a))?" depends
only on ``2a + 1`` modulo a period:

* if ``q = 1 (mod p)`` then ``sigma(q^(2a)) = 2a + 1 (mod p)`` and the
  period is ``p`` itself;
* otherwise ``p | sigma(q^(2a))`` iff ``ord_p(q)`` divides ``2a + 1``, which
  needs the order to be odd.

That period is what :func:`sigma_period` returns.  Whenever ``p`` divides
``sigma(q^(2a))`` the whole repunit ``(q^f - 1)/(q - 1)`` with ``f`` the
period divides it too, so every prime factor of that repunit is forced
along with ``p``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .core_arith import WitnessTooLarge, factor_dict, is_prime

REPUNIT_DIGIT_LIMIT = 50


@lru_cache(maxsize=1 << 16)
def mult_order(q: int, p: int) -> int:
    """Smallest ``f >= 1`` with ``q^f = 1 (mod p)``, for prime ``p`` not dividing ``q``."""
    if q % p == 0:
        raise ValueError(f"{p} divides {q}; the order is undefined")
    if p == 2:
        return 1
    f = p - 1
    for r in factor_dict(p - 1):
        while f % r == 0 and pow(q, f // r, p) == 1:
            f //= r
    return f


@lru_cache(maxsize=1 << 16)
def sigma_period(q: int, p: int) -> int | None:
    """The odd ``f > 1`` with ``p | sigma(q^(2a))`` iff ``f | 2a + 1``.

    Returns ``None`` when ``p`` never divides ``sigma(q^(2a))``.
    """
    if p == q:
        raise ValueError("p and q must differ")
    if p == 2:
        return None
    if q % p == 1:
        return p
    f = mult_order(q, p)
    return f if f % 2 == 1 else None


def repunit(q: int, f: int) -> int:
    """``(q^f - 1)/(q - 1) = sigma(q^(f-1))``."""
    return (q**f - 1) // (q - 1)


@dataclass(frozen=True)
class OrderRecord:
    p: int
    q: int
    order: int

    def __post_init__(self):
        if self.p == self.q:
            raise ValueError("p and q must differ")
        if pow(self.q, self.order, self.p) != 1 or (self.p - 1) % self.order:
            raise ValueError(f"{self.order} is not the order of {self.q} mod {self.p}")

    @classmethod
    def of(cls, p: int, q: int) -> OrderRecord:
        return cls(p, q, mult_order(q, p))

    @property
    def period(self) -> int | None:
        """Divisibility period for sigma of even powers (``p`` when the order is 1)."""
        if self.order == 1:
            return self.p if self.p != 2 else None
        return self.order if self.order % 2 else None


@dataclass(frozen=True)
class CompanionSet:
    """Primes forced into ``sigma(q^(2a))`` as soon as ``p`` divides it.

    ``f`` is ``None`` (and ``companions`` empty) when ``p`` can never
    divide ``sigma(q^(2a))``.
    """

    q: int
    p: int
    f: int | None
    companions: frozenset[int] = field(default_factory=frozenset)
    witness: int | None = None

    @property
    def never(self) -> bool:
        return self.f is None


def divides_sigma_even_power(p: int, q: int, a: int) -> bool:
    if a < 1:
        raise ValueError(f"a must be >= 1, got {a}")
    f = sigma_period(q, p)
    return f is not None and (2 * a + 1) % f == 0


def five_divides_constraint(q: int) -> bool:
    """Whether 5 can divide ``sigma(q^(2a))`` for some ``a``; true iff q = 1 (mod 10)."""
    if q <= 5 or not is_prime(q):
        raise ValueError(f"expected a prime > 5, got {q}")
    return q % 10 == 1


def forced_companions(q: int, p: int, digit_limit: int = REPUNIT_DIGIT_LIMIT) -> CompanionSet:
    """All prime factors of the minimal repunit that ``p | sigma(q^(2a))`` forces.

    Raises :class:`~friends20.core_arith.WitnessTooLarge` when the repunit
    has more than ``digit_limit`` digits or a factor cannot be certified.
    """
    f = sigma_period(q, p)
    if f is None:
        return CompanionSet(q, p, None)
    r = repunit(q, f)
    if r.bit_length() * 0.30103 > digit_limit:
        raise WitnessTooLarge(f"repunit ({q}^{f} - 1)/({q} - 1) exceeds {digit_limit} digits")
    return CompanionSet(q, p, f, frozenset(factor_dict(r)), r)


def minimal_witness_exponent(p: int, q: int) -> int | None:
    """Smallest ``a >= 1`` with ``p | sigma(q^(2a))``, or ``None``."""
    f = sigma_period(q, p)
    return None if f is None else (f - 1) // 2
