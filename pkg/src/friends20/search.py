"""Exhaustive search for friends of 20 below a limit.

The structured search only visits numbers of the required shape
``N = 2 * 5^(2a) * m^2`` with ``m`` odd and prime to 3, 5 and 7, and gets
``sigma(m^2)`` from the smallest-prime-factor table of ``m``.  The naive
scan sieves ``sigma(n)`` for every ``n`` up to its limit and is used only as
an independent cross-check on small ranges.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .core_arith import FactoredNat, is_friend_of_20, sigma, sigma_prime_power, spf_table
from .eliminator import structural_filters
from .exponent_bounds import SIZE_FLOOR, congruence_reject, congruence_specs, omega_capital_lower_bound

DEFAULT_LIMIT = 2 * 10**12
SCAN_LIMIT = 10**8
CHECKPOINT_FORMAT = "friends20-search-checkpoint/1"


class CheckpointError(RuntimeError):
    """The checkpoint file is unreadable or belongs to a different run."""


class TheoryViolation(RuntimeError):
    """A friend was found that the structural theory says cannot exist."""


@dataclass(frozen=True)
class SearchConfig:
    limit: int = DEFAULT_LIMIT
    shard_count: int = 1
    checkpoint_path: str | None = None
    workers: int = 1

    def __post_init__(self):
        if self.limit < 20:
            raise ValueError("limit must be at least 20")
        if self.shard_count < 1 or self.workers < 1:
            raise ValueError("shard_count and workers must be positive")

    @property
    def a_max(self) -> int:
        """Largest ``a`` with ``2 * 5^(2a) <= limit`` (the ``m = 1`` candidate included)."""
        a = 0
        while 2 * 25 ** (a + 1) <= self.limit:
            a += 1
        return a

    def m_bound(self, a: int) -> int:
        return math.isqrt(self.limit // (2 * 25**a))

    def shards(self) -> list[tuple[int, int, int]]:
        """``(a, lo, hi)`` ranges, inclusive, covering every ``m`` exactly once."""
        out = []
        for a in range(1, self.a_max + 1):
            top = self.m_bound(a)
            edges = np.linspace(0, top, self.shard_count + 1).round().astype(int)
            for lo, hi in zip(edges[:-1], edges[1:]):
                if hi > lo:
                    out.append((a, int(lo) + 1, int(hi)))
        return out


@dataclass
class ShardResult:
    a: int
    lo: int
    hi: int
    candidates: int
    friends: list[int]
    checksum: str

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.a, self.lo, self.hi)


@dataclass
class SearchReport:
    limit: int
    candidates_tested: int
    friends_found: list[int]
    elapsed: float
    shard_checksums: list[dict] = field(default_factory=list)
    resumed_shards: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def admissible_m(lo: int, hi: int) -> np.ndarray:
    m = np.arange(lo, hi + 1, dtype=np.int64)
    return m[(m % 2 == 1) & (m % 3 != 0) & (m % 5 != 0) & (m % 7 != 0)]


def sigma_of_square(m: int, spf: np.ndarray) -> int:
    """``sigma(m^2)`` from the factorization of ``m`` (exponents doubled)."""
    total = 1
    while m > 1:
        p = int(spf[m])
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        total *= (p ** (2 * e + 1) - 1) // (p - 1)
    return total


def run_shard(a: int, lo: int, hi: int) -> ShardResult:
    spf = spf_table(hi)
    five_power = 25**a
    five_sigma = sigma_prime_power(5, 2 * a)
    digest = hashlib.sha256(f"{a}:{lo}:{hi}".encode())
    friends = []
    ms = admissible_m(lo, hi)
    for m in ms.tolist():
        s = sigma_of_square(m, spf)
        digest.update(f"{m}:{s};".encode())
        # 10 * 3 * sigma(5^2a) * s == 21 * 2 * 5^2a * m^2
        if 5 * five_sigma * s == 7 * five_power * m * m:
            friends.append(2 * five_power * m * m)
    return ShardResult(a, lo, hi, len(ms), friends, digest.hexdigest())


def _header(cfg: SearchConfig) -> str:
    return json.dumps({"format": CHECKPOINT_FORMAT, "limit": cfg.limit, "shard_count": cfg.shard_count}, sort_keys=True)


def _load_checkpoint(cfg: SearchConfig, expected: set[tuple[int, int, int]]) -> dict[tuple[int, int, int], ShardResult]:
    path = cfg.checkpoint_path
    if not path or not os.path.exists(path):
        return {}
    with open(path) as fh:
        text = fh.read()
    if not text:
        return {}
    if not text.endswith("\n"):
        raise CheckpointError(f"{path}: last record is truncated")
    lines = text.splitlines()
    if lines[0] != _header(cfg):
        raise CheckpointError(f"{path}: header does not match this configuration")
    done = {}
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            rec = json.loads(line)
            res = ShardResult(**rec)
        except (ValueError, TypeError) as exc:
            raise CheckpointError(f"{path}:{lineno}: malformed record ({exc})") from None
        if res.key not in expected:
            raise CheckpointError(f"{path}:{lineno}: unknown shard {res.key}")
        if res.key in done:
            raise CheckpointError(f"{path}:{lineno}: shard {res.key} recorded twice")
        done[res.key] = res
    return done


def _append(path: str, line: str) -> None:
    with open(path, "a") as fh:
        fh.write(line + "\n")
        fh.flush()
        os.fsync(fh.fileno())


def structured_search(cfg: SearchConfig) -> SearchReport:
    """Test every ``N = 2 * 5^(2a) * m^2 <= limit`` with ``gcd(m, 210) = 1``."""
    start = time.perf_counter()
    shards = cfg.shards()
    done = _load_checkpoint(cfg, set(shards))
    if cfg.checkpoint_path and not done:
        with open(cfg.checkpoint_path, "w") as fh:
            fh.write(_header(cfg) + "\n")
    todo = [s for s in shards if s not in done]
    spf_table(max((hi for _, _, hi in todo), default=1))

    def record(res: ShardResult) -> None:
        done[res.key] = res
        if cfg.checkpoint_path:
            _append(cfg.checkpoint_path, json.dumps(asdict(res), sort_keys=True))

    if cfg.workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            for res in pool.map(run_shard, *zip(*todo)):
                record(res)
    else:
        for shard in todo:
            record(run_shard(*shard))

    results = [done[s] for s in shards]
    friends = sorted(n for r in results for n in r.friends)
    for n in friends:
        report = certify(n)
        if not report["consistent_with_theory"]:
            raise TheoryViolation(f"{n} is a friend of 20 but fails {report['failed']}")
    return SearchReport(
        limit=cfg.limit,
        candidates_tested=sum(r.candidates for r in results),
        friends_found=friends,
        elapsed=time.perf_counter() - start,
        shard_checksums=[{"a": r.a, "lo": r.lo, "hi": r.hi, "checksum": r.checksum} for r in results],
        resumed_shards=len(shards) - len(todo),
    )


# ---------------------------------------------------------------------------
# naive cross-check


def sigma_sieve(limit: int) -> np.ndarray:
    """``sigma(n)`` for ``0 <= n <= limit`` by summing divisor pairs ``d <= n/d``."""
    if limit > SCAN_LIMIT:
        raise ValueError(f"scan limit {limit} exceeds the memory budget of {SCAN_LIMIT}")
    sig = np.zeros(limit + 1, dtype=np.int64)
    for d in range(1, math.isqrt(limit) + 1):
        cofactors = np.arange(d, limit // d + 1, dtype=np.int64)
        sig[d * cofactors] += d + cofactors
        sig[d * d] -= d
    return sig


def shape_mask(limit: int) -> np.ndarray:
    """Boolean mask of ``n <= limit`` of the form ``2 * 5^(2a) * m^2``, ``gcd(m, 210) = 1``.

    Decided from ``n`` alone (valuations and a square test), independent of
    the structured enumeration.
    """
    n = np.arange(limit + 1, dtype=np.int64)
    mask = np.zeros(limit + 1, dtype=bool)
    half = np.where(n % 4 == 2, n // 2, 0)
    rest = half.copy()
    v5 = np.zeros_like(n)
    while True:
        div = (rest > 0) & (rest % 5 == 0)
        if not div.any():
            break
        rest[div] //= 5
        v5[div] += 1
    ok = (half > 0) & (v5 >= 2) & (v5 % 2 == 0) & (rest % 3 != 0) & (rest % 7 != 0)
    root = np.sqrt(rest.astype(np.float64)).round().astype(np.int64)
    ok &= root * root == rest
    mask[ok] = True
    return mask


def naive_scan(limit: int) -> list[int]:
    """All ``n <= limit`` other than 20 with ``10 * sigma(n) = 21 * n``."""
    sig = sigma_sieve(limit)
    n = np.arange(limit + 1, dtype=np.int64)
    hits = np.nonzero((10 * sig == 21 * n) & (n > 0))[0]
    return [int(x) for x in hits if x != 20]


@dataclass
class ScanReport:
    limit: int
    friends: list[int]
    sanity: dict
    shape_candidates: int
    shape_friends: list[int]

    def to_dict(self) -> dict:
        return asdict(self)


def scan_report(limit: int) -> ScanReport:
    sig = sigma_sieve(limit)
    n = np.arange(limit + 1, dtype=np.int64)
    hits = np.nonzero((10 * sig == 21 * n) & (n > 0))[0]
    friends = [int(x) for x in hits if x != 20]
    sanity = {}
    for k in (6, 20, 28):
        if k <= limit:
            sanity[str(k)] = int(sig[k])
    mask = shape_mask(limit)
    return ScanReport(limit, friends, sanity, int(mask.sum()), [x for x in friends if mask[x]])


# ---------------------------------------------------------------------------
# certification


def certify(n: int, filter_limit: int = 1000) -> dict:
    """Check ``n`` against the friend equation and every necessary condition.

    The number 20 itself is the reference point, not a candidate; its shape
    checks are skipped and reported as such.
    """
    if n < 2:
        raise ValueError("certify needs n >= 2")
    fac = FactoredNat.of(n)
    exps = fac.as_dict()
    friend = is_friend_of_20(n)
    report: dict = {
        "n": n,
        "factorization": str(fac),
        "sigma": sigma(fac),
        "is_friend": friend,
        "omega": fac.omega,
        "big_omega": fac.big_omega,
    }
    if n == 20:
        report.update(structural=[], checks={}, failed=[], consistent_with_theory=True, note="reference number")
        return report
    violations = structural_filters(fac)
    checks = {"structural": not violations, "omega_at_least_6": fac.omega >= 6, "size_floor": n > SIZE_FLOOR}
    witnesses: dict = {"size_floor": SIZE_FLOOR}
    if not violations:
        a = exps[5] // 2
        if fac.omega >= 6:
            need = omega_capital_lower_bound(a, fac.omega)
            checks["big_omega_bound"] = fac.big_omega >= need
            witnesses["big_omega_bound"] = need
        odd = {p: e for p, e in exps.items() if p != 2}
        rejecting = [s.p for s in congruence_specs(filter_limit) if congruence_reject(odd, s)]
        checks["congruence"] = not rejecting
        if rejecting:
            witnesses["congruence"] = rejecting
    failed = sorted(k for k, v in checks.items() if not v)
    report.update(structural=violations, checks=checks, witnesses=witnesses, failed=failed)
    report["consistent_with_theory"] = not failed
    return report

