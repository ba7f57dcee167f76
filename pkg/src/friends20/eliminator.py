"""Case elimination for friends of 20 with a fixed number of distinct primes.

The search tree walks the odd primes of ``N = 2 * 5^(2a) * m^2`` in
increasing order.  At each node the primes found so far give a window for
the next one (:mod:`friends20.bound_engine`).  When the window is unbounded
an exponent is capped instead, and each exact exponent is pushed through
``sigma`` to see which primes it drags in.  When no slots remain, the
supply problem (who divides whose sigma) is solved exhaustively.

Every decision is written to a :class:`~friends20.proof.ProofLog` that
:func:`~friends20.proof.verify_proof_log` re-checks without this module.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable

from .bound_engine import candidate_stream, feasibility_product, fixed_supremum, prime_window, window_size_estimate
from .core_arith import (
    FRIEND_RATIO,
    PRIMES,
    FactoredNat,
    as_factored,
    MR_CERTIFIED_LIMIT,
    WitnessTooLarge,
    factor_dict,
    is_prime,
    sigma_prime_power,
)
from .exponent_bounds import congruence_reject, congruence_specs
from .order_engine import repunit, sigma_period
from .proof import ELIMINATED, INCONCLUSIVE, ProofLog, ProofStep, frac_str

log = logging.getLogger(__name__)

WINDOW_LIMIT = 10**6
MAX_CAP_EXPONENT = 60
FACTOR_DIGIT_LIMIT = 60
TRIAL_LIMIT = 10**5


class FriendFound(RuntimeError):
    """Raised if a branch closes on an exact 21/10: a counterexample."""


class BudgetExceeded(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# signatures and structural filters


@dataclass(frozen=True)
class CandidateSignature:
    """Prime signature of a candidate: ``{prime: exponent}`` with 2 and 5 present.

    An exponent of ``None`` means "some positive even exponent".
    """

    exponents: tuple[tuple[int, int | None], ...]

    @classmethod
    def of(cls, mapping: dict[int, int | None]) -> CandidateSignature:
        return cls(tuple(sorted(mapping.items())))

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.exponents)

    @property
    def odd_primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.exponents if p != 2)

    def exponent(self, p: int) -> int | None:
        return dict(self.exponents)[p]

    @property
    def exact(self) -> bool:
        return all(e is not None for _, e in self.exponents)


def structural_filters(n: int | FactoredNat | CandidateSignature) -> list[str]:
    """Shape violations: the ways ``n`` fails to look like ``2 * 5^(2a) * m^2``."""
    if isinstance(n, CandidateSignature):
        exps = dict(n.exponents)
    else:
        n = as_factored(n)
        if n.value < 2:
            raise ValueError("structural_filters needs n >= 2")
        exps = n.as_dict()
    out = []
    if exps.get(2) != 1:
        out.append("two-adic")
    if 5 not in exps or (exps[5] is not None and (exps[5] < 2 or exps[5] % 2)):
        out.append("five-adic")
    for p, e in sorted(exps.items()):
        if p not in (2, 5) and e is not None and (e < 2 or e % 2):
            out.append(f"odd exponent on {p}")
    if 3 in exps:
        out.append("divisible by 3")
    if 7 in exps:
        out.append("divisible by 7")
    return out


def _strip(n: int, primes: Iterable[int]) -> int:
    for p in primes:
        while n % p == 0:
            n //= p
    return n


def _factor_over(n: int, primes: list[int]) -> list[list[int]]:
    """Exponent pairs of ``n`` over ``primes``; ``n`` must have no other factor."""
    out = []
    for p in primes:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            out.append([p, e])
    if n != 1:
        raise ValueError("cofactor left after dividing out the given primes")
    return out


def _small_factor(n: int, limit: int = TRIAL_LIMIT) -> int | None:
    """A prime factor of ``n`` that is cheap to find and certify, if any."""
    for p in PRIMES.after(1):
        if p > limit:
            break
        if n % p == 0:
            return p
    if 3 < n < MR_CERTIFIED_LIMIT:
        if is_prime(n):
            return n
        if n.bit_length() <= 132:
            return min(factor_dict(n))
    return None


def pair_status(q: int, d: int, S: frozenset[int], exps: dict[int, int]) -> dict:
    """How ``d`` can divide ``sigma(q^e)`` inside a signature whose primes are ``S``."""
    if q in exps:
        value = sigma_prime_power(q, exps[q])
        if _strip(value, S) > 1 or value % 49 == 0:
            return {"code": "spoiled", "f": None}
        return {"code": "div" if value % d == 0 else "nodiv", "f": None}
    f = sigma_period(q, d)
    if f is None:
        return {"code": "never", "f": None}
    R = repunit(q, f)
    rest = _strip(R, S)
    if rest > 1:
        info = {"code": "escape", "f": f}
        r = _small_factor(rest)
        if r is not None:
            info["escape"] = r
        return info
    if R % 49 == 0:
        return {"code": "square7", "f": f}
    return {"code": "ok", "f": f, "repunit": R}


def supply_options(q: int, S: frozenset[int], table: dict) -> list[frozenset[int]]:
    """Possible sets of primes of ``S`` dividing ``sigma(q^e)``."""
    others = sorted(S - {q})
    if q in table.get("_exact", ()):
        if table[(q, others[0])]["code"] == "spoiled":
            return []
        return [frozenset(d for d in others if table[(q, d)]["code"] == "div")]
    ok = [d for d in others if table[(q, d)]["code"] == "ok"]
    bad = [table[(q, d)]["f"] for d in others if table[(q, d)]["code"] in ("escape", "square7")]
    found = set()
    for k in range(1, 1 << len(ok)):
        chosen = [d for i, d in enumerate(ok) if k >> i & 1]
        L = math.lcm(*(table[(q, d)]["f"] for d in chosen))
        if any(L % f == 0 for f in bad):
            continue
        found.add(frozenset(d for d in ok if L % table[(q, d)]["f"] == 0))
    return sorted(found, key=sorted)


@dataclass(frozen=True)
class ClosureResult:
    feasible: bool
    reason: str
    solution: tuple[frozenset[int], ...] | None = None


def supply_closure(sig: CandidateSignature) -> tuple[ClosureResult, dict]:
    """Solve the supply problem for a complete signature.

    Returns the verdict and the pair table it was derived from.
    """
    P = sig.odd_primes
    S = frozenset(P) | {7}
    exps = {p: e for p, e in sig.exponents if p != 2 and e is not None}
    table: dict = {"_exact": frozenset(exps)}
    for q in P:
        for d in sorted(S - {q}):
            table[(q, d)] = pair_status(q, d, S, exps)
    options = {q: supply_options(q, S, table) for q in P}
    if any(not opts for opts in options.values()):
        return ClosureResult(False, "no_outflow"), table
    demand = {5, 7} | (set(P) - {5})
    for d in sorted(demand):
        if not any(d in D for q in P for D in options[q]):
            return ClosureResult(False, "no_supplier"), table
    for combo in product(*(options[q] for q in P)):
        if sum(7 in D for D in combo) == 1 and demand <= set().union(*combo):
            return ClosureResult(True, "solution", combo), table
    return ClosureResult(False, "exhaustive"), table


# ---------------------------------------------------------------------------
# the search tree


@dataclass
class _Node:
    branch: tuple[str, ...]
    known: list[int]
    floor: int
    exps: dict[int, int]
    slots: int

    @classmethod
    def parse(cls, omega: int, branch: tuple[str, ...]) -> _Node:
        known, floor, exps = [5], 5, {}
        for tok in branch:
            if "^" in tok:
                q, e = tok.split("^")
                exps[int(q)] = int(e)
            elif tok.startswith("+"):
                known.append(int(tok[1:]))
            else:
                known.append(int(tok))
                floor = int(tok)
        return cls(branch, sorted(known), floor, exps, omega - 1 - len(known))

    def assignment(self, override: tuple[int, int] | None = None) -> list[list[int]]:
        out = [[2, 1]]
        for q in self.known:
            e = self.exps.get(q, 2)
            if override and override[0] == q:
                e = override[1]
            out.append([q, e])
        return out


def _abundancy_of(assign: list[list[int]]) -> Fraction:
    value = Fraction(1)
    for p, e in assign:
        value *= Fraction(sigma_prime_power(p, e), p**e)
    return value


@dataclass
class EliminationResult:
    omega: int
    log: ProofLog
    open_branches: list[dict] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def verdict(self) -> str:
        return self.log.verdict


class _Eliminator:
    def __init__(self, omega: int, budget: int | None, filter_limit: int = 100):
        self.omega = omega
        self.budget = budget
        self.log = ProofLog(omega)
        self.open: list[dict] = []
        self.filters = congruence_specs(filter_limit)

    def emit(self, kind: str, subject: dict, witness: dict, note: str = "") -> int:
        if self.budget is not None and len(self.log.steps) >= self.budget:
            raise BudgetExceeded(f"step budget {self.budget} exhausted")
        self.log.steps.append(ProofStep(kind, subject, witness, note))
        return len(self.log.steps) - 1

    def contradiction(self, node: _Node, ref: int, note: str) -> bool:
        self.emit("contradiction", {"branch": list(node.branch)}, {"step": ref}, note)
        return True

    def mark_open(self, node: _Node, reason: str) -> bool:
        self.open.append({"branch": list(node.branch), "reason": reason})
        return False

    def visit(self, branch: tuple[str, ...]) -> bool:
        node = _Node.parse(self.omega, branch)
        if branch and "^" in branch[-1]:
            outcome = self.force_sigma(node)
            if outcome is not None:
                return outcome
        lower = _abundancy_of(node.assignment())
        if lower > FRIEND_RATIO:
            ref = self.emit(
                "lower_bound_exceeds",
                {"branch": list(branch), "assignment": node.assignment()},
                {"abundancy": frac_str(lower)},
                "minimal exponents already overshoot 21/10",
            )
            return self.contradiction(node, ref, "abundancy too large")
        if node.slots == 0:
            return self.leaf(node)
        fixed = [2] + node.known
        if window_size_estimate(fixed, node.slots) > WINDOW_LIMIT:
            if fixed_supremum(fixed) >= FRIEND_RATIO:
                return self.unbounded(node)
            return self.mark_open(node, "window too large")
        window = prime_window(fixed, node.slots, floor=node.floor)
        subject = {"branch": list(branch), "fixed": fixed, "slots": node.slots}
        if window.empty:
            at_first = feasibility_product(fixed, window.lower, node.slots)
            self.emit(
                "upper_bound",
                subject,
                {"bound": None, "first": window.lower, "at_first": frac_str(at_first), "children": []},
                "no admissible prime reaches 21/10",
            )
            return True
        if window.bounded:
            nxt = next(candidate_stream(window.upper, fixed))
            children = window.candidates()
            self.emit(
                "upper_bound",
                subject,
                {
                    "bound": window.upper,
                    "at_bound": frac_str(feasibility_product(fixed, window.upper, node.slots)),
                    "next": nxt,
                    "at_next": frac_str(feasibility_product(fixed, nxt, node.slots)),
                    "children": children,
                },
            )
            closed = True
            for c in children:
                closed &= self.visit(branch + (str(c),))
            return closed
        return self.unbounded(node)

    def unbounded(self, node: _Node) -> bool:
        fixed = [2] + node.known
        self.emit(
            "upper_bound",
            {"branch": list(node.branch), "fixed": fixed, "slots": node.slots},
            {"bound": "unbounded", "limit": frac_str(fixed_supremum(fixed))},
            "the known primes alone allow 21/10; cap an exponent instead",
        )
        best = None
        for q in node.known:
            if q in node.exps:
                continue
            for E in range(4, MAX_CAP_EXPONENT + 1, 2):
                if _abundancy_of(node.assignment((q, E))) > FRIEND_RATIO:
                    if best is None or E < best[1]:
                        best = (q, E)
                    break
        if best is None:
            return self.mark_open(node, "no exponent cap")
        q, E = best
        kids = [f"{q}^{e}" for e in range(2, E, 2)]
        value = _abundancy_of(node.assignment(best))
        self.emit(
            "lower_bound_exceeds",
            {"branch": list(node.branch), "assignment": node.assignment(best), "cap": [q, E]},
            {"abundancy": frac_str(value), "children": kids},
            f"exponent of {q} is below {E}",
        )
        closed = True
        for k in kids:
            closed &= self.visit(node.branch + (k,))
        return closed

    def force_sigma(self, node: _Node) -> bool | None:
        """Push the newest exact exponent through sigma; ``None`` means carry on."""
        q, e = (int(x) for x in node.branch[-1].split("^"))
        value = sigma_prime_power(q, e)
        subject = {"branch": list(node.branch), "mode": "sigma", "prime": q, "exponent": e}
        if value % 49 == 0:
            ref = self.emit(
                "supply_constraint",
                subject,
                {"sigma": value, "verdict": "contradiction", "reason": "seven_square"},
                "7 may divide sigma(N)/N only once",
            )
            return self.contradiction(node, ref, "7 twice")
        S = set(node.known) | {7}
        rest = _strip(value, S)
        for r in PRIMES.after(1):
            if r > node.floor:
                break
            if r not in S and rest % r == 0:
                ref = self.emit(
                    "supply_constraint",
                    subject,
                    {"sigma": value, "verdict": "contradiction", "reason": "small_prime", "prime": r},
                    "sigma brings in a prime below the search floor",
                )
                return self.contradiction(node, ref, f"{r} cannot divide N")
        if rest.bit_length() * 0.30103 > FACTOR_DIGIT_LIMIT:
            return self.mark_open(node, f"cannot factor sigma({q}^{e})")
        try:
            factors = factor_dict(value)
        except WitnessTooLarge:
            return self.mark_open(node, f"uncertifiable factor of sigma({q}^{e})")
        outside = sorted(r for r in factors if r not in S)
        witness = {
            "sigma": value,
            "factors": [[r, m] for r, m in factors.items()],
            "outside": outside,
        }
        if len(outside) > node.slots:
            witness["verdict"] = "contradiction"
            ref = self.emit("supply_constraint", subject, witness, "more new primes than free slots")
            return self.contradiction(node, ref, "too many primes")
        if not outside:
            witness["verdict"] = "none"
            self.emit("supply_constraint", subject, witness)
            return None
        kids = ["+" + str(r) for r in outside]
        witness["verdict"] = "forced"
        witness["children"] = [kids]
        self.emit("supply_constraint", subject, witness, "new primes forced into N")
        return self.visit(node.branch + tuple(kids))

    def leaf(self, node: _Node) -> bool:
        P = node.known
        branch = list(node.branch)
        if all(q in node.exps for q in P):
            exps = {q: node.exps[q] for q in P}
            for spec in self.filters:
                if congruence_reject(exps, spec):
                    ref = self.emit("congruence_reject", {"branch": branch, "p": spec.p, "f": spec.f}, {})
                    return self.contradiction(node, ref, "congruence filter")
            value = _abundancy_of(node.assignment())
            if value == FRIEND_RATIO:
                raise FriendFound(f"abundancy 21/10 at {node.assignment()}")
            self.emit(
                "contradiction",
                {"branch": branch},
                {"rule": "exact", "abundancy": frac_str(value)},
                "all exponents fixed and the abundancy misses 21/10",
            )
            return True

        sig = CandidateSignature.of({2: 1, **{q: node.exps.get(q) for q in P}})
        result, table = supply_closure(sig)
        S = frozenset(P) | {7}
        for d, kind in ((5, "five_placement"), (7, "seven_placement")):
            rows = [[q, table[(q, d)]["code"], table[(q, d)]["f"]] for q in P if q != d]
            self.emit(kind, {"branch": branch, "demand": d}, {"suppliers": rows})
        for q in P:
            if q in node.exps:
                continue
            for d in sorted(S - {q}):
                info = table[(q, d)]
                if info["f"] is None:
                    continue
                witness = {"f": info["f"], "status": info["code"]}
                if info["code"] == "ok":
                    witness["factors"] = _factor_over(info["repunit"], sorted(S))
                if "escape" in info:
                    witness["escape"] = info["escape"]
                self.emit("forced_companion", {"branch": branch, "q": q, "d": d}, witness)
        rows = [[q, d, table[(q, d)]["code"], table[(q, d)]["f"]] for q in P for d in sorted(S - {q})]
        ref = self.emit(
            "supply_constraint",
            {"branch": branch, "mode": "closure"},
            {"table": rows, "reason": result.reason, "feasible": result.feasible},
        )
        if result.feasible:
            return self.mark_open(node, "supply problem has a solution")
        return self.contradiction(node, ref, f"supply closure fails ({result.reason})")


def eliminate_omega(omega: int, budget: int | None = None) -> EliminationResult:
    """Run the case elimination for ``omega(N) = omega``.

    Supported for ``omega`` in 3..5; larger values are accepted but
    usually end with open branches.
    """
    if omega < 3:
        raise ValueError("a friend of 20 has at least three distinct prime factors")
    start = time.perf_counter()
    job = _Eliminator(omega, budget)
    try:
        closed = job.visit(())
    except BudgetExceeded as exc:
        job.open.append({"branch": [], "reason": str(exc)})
        closed = False
    job.log.verdict = ELIMINATED if closed and not job.open else INCONCLUSIVE
    job.log.open_branches = job.open
    elapsed = time.perf_counter() - start
    log.info("omega=%d: %s in %d steps (%.1fs)", omega, job.log.verdict, len(job.log.steps), elapsed)
    return EliminationResult(omega, job.log, job.open, elapsed)

