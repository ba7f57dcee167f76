"""Proof-log records, JSON-lines serialization and the independent checker.

A log is a tree of branches flattened into steps.  Each step names its
branch as a list of tokens:

``"11"``
    the next odd prime, chosen from the window of the parent;
``"+71"``
    a prime forced into N by a sigma value;
``"5^4"``
    an exact exponent chosen after an exponent cap.

A branch is closed when it carries a ``contradiction`` step, or when one of
its splitting steps (``upper_bound`` with a finite window, a capping
``lower_bound_exceeds``, a forcing ``supply_constraint``) has only closed
children.  The checker below recomputes every witness on its own: orders by
divisor enumeration, repunits from scratch, abundancies from the closed
form, and it re-solves the supply problem at each leaf.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .core_arith import FRIEND_RATIO, is_prime

KINDS = (
    "upper_bound",
    "lower_bound_exceeds",
    "five_placement",
    "seven_placement",
    "supply_constraint",
    "forced_companion",
    "congruence_reject",
    "contradiction",
)
ELIMINATED = "ELIMINATED"
INCONCLUSIVE = "INCONCLUSIVE"
LOG_FORMAT = "friends20-prooflog/1"


def frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse_frac(s: str) -> Fraction:
    num, den = s.split("/")
    return Fraction(int(num), int(den))


@dataclass(frozen=True)
class ProofStep:
    kind: str
    subject: dict
    witness: dict
    note: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown step kind {self.kind!r}")

    @property
    def branch(self) -> tuple[str, ...]:
        return tuple(self.subject["branch"])

    def to_dict(self) -> dict:
        return {"kind": self.kind, "subject": self.subject, "witness": self.witness, "note": self.note}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> ProofStep:
        return cls(d["kind"], d["subject"], d["witness"], d.get("note", ""))


@dataclass
class ProofLog:
    omega: int
    steps: list[ProofStep] = field(default_factory=list)
    verdict: str = INCONCLUSIVE
    open_branches: list[dict] = field(default_factory=list)

    def header(self) -> dict:
        return {
            "format": LOG_FORMAT,
            "omega": self.omega,
            "verdict": self.verdict,
            "steps": len(self.steps),
            "open_branches": self.open_branches,
        }

    def to_jsonl(self) -> str:
        lines = [json.dumps(self.header(), sort_keys=True, separators=(",", ":"))]
        lines.extend(step.to_json() for step in self.steps)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> ProofLog:
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty proof log")
        head = json.loads(lines[0])
        if head.get("format") != LOG_FORMAT:
            raise ValueError("missing or unknown proof-log header")
        steps = [ProofStep.from_dict(json.loads(ln)) for ln in lines[1:]]
        return cls(head["omega"], steps, head["verdict"], head.get("open_branches", []))

    def branches(self) -> set[tuple[str, ...]]:
        return {s.branch for s in self.steps}

    def window_paths(self) -> set[tuple[int, ...]]:
        """Branches projected onto their window-chosen primes."""
        return {tuple(int(t) for t in b if t.isdigit()) for b in self.branches()}


# ---------------------------------------------------------------------------
# independent checker


@dataclass
class Verification:
    ok: bool
    step: int | None = None
    reason: str = ""
    closed_root: bool = False

    def __bool__(self) -> bool:
        return self.ok


class _Fail(Exception):
    pass


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise _Fail(msg)


@dataclass(frozen=True)
class _State:
    known: tuple[int, ...]
    floor: int
    slots: int
    exps: dict


def _state(omega: int, branch: tuple[str, ...]) -> _State:
    known = [5]
    floor = 5
    exps: dict[int, int] = {}
    for tok in branch:
        if "^" in tok:
            q, e = tok.split("^")
            q, e = int(q), int(e)
            _require(q in known and q not in exps and e >= 2 and e % 2 == 0, f"bad exponent token {tok}")
            exps[q] = e
        elif tok.startswith("+"):
            r = int(tok[1:])
            _require(r not in known and r > floor, f"bad forced token {tok}")
            known.append(r)
        else:
            r = int(tok)
            _require(r not in known and r > floor, f"bad window token {tok}")
            known.append(r)
            floor = r
    slots = omega - 1 - len(known)
    _require(slots >= 0, "branch has more primes than omega allows")
    return _State(tuple(sorted(known)), floor, slots, exps)


def _sigma_pp(p: int, e: int) -> int:
    return sum(p**k for k in range(e + 1))


def _abund(assign: list[tuple[int, int]]) -> Fraction:
    num = den = 1
    for p, e in assign:
        num *= _sigma_pp(p, e)
        den *= p**e
    return Fraction(num, den)


def _min_assignment(st: _State, override: tuple[int, int] | None = None) -> list[list[int]]:
    out = [[2, 1]]
    for q in st.known:
        e = st.exps.get(q, 2)
        if override and override[0] == q:
            e = override[1]
        out.append([q, e])
    return out


def _order(q: int, d: int) -> int:
    """Multiplicative order by scanning divisors of d-1 in increasing order."""
    n = d - 1
    small, large = [], []
    k = 1
    while k * k <= n:
        if n % k == 0:
            small.append(k)
            if k * k != n:
                large.append(n // k)
        k += 1
    for k in small + large[::-1]:
        if pow(q, k, d) == 1:
            return k
    raise _Fail(f"no order found for {q} mod {d}")


def _period(q: int, d: int) -> int | None:
    if q % d == 1:
        return d
    o = _order(q % d, d)
    return o if o % 2 else None


def _strip(n: int, primes) -> int:
    for p in primes:
        while n % p == 0:
            n //= p
    return n


def _candidates(st: _State, upto: int) -> list[int]:
    out = []
    for p in range(st.floor + 1, upto + 1):
        if p not in (3, 7) and p not in st.known and is_prime(p):
            out.append(p)
    return out


def _next_candidate(st: _State, after: int) -> int:
    p = after + 1
    while not (is_prime(p) and p not in (3, 7) and p not in st.known):
        p += 1
    return p


def _feasible(st: _State, q: int) -> Fraction:
    prod = Fraction(3, 2)
    for p in st.known:
        prod *= Fraction(p, p - 1)
    r = q
    for _ in range(st.slots):
        prod *= Fraction(r, r - 1)
        r = _next_candidate(st, r)
    return prod


def _pair_code(q: int, d: int, S: set[int], exps: dict) -> tuple[str, int | None]:
    if q in exps:
        value = _sigma_pp(q, exps[q])
        if _strip(value, S) > 1 or value % 49 == 0:
            return "spoiled", None
        return ("div" if value % d == 0 else "nodiv"), None
    f = _period(q, d)
    if f is None:
        return "never", None
    R = (q**f - 1) // (q - 1)
    if _strip(R, S) > 1:
        return "escape", f
    if R % 49 == 0:
        return "square7", f
    return "ok", f


def _supply_options(q: int, S: set[int], table: dict) -> list[frozenset]:
    others = sorted(S - {q})
    codes = {d: table[(q, d)] for d in others}
    if codes[others[0]][0] == "spoiled":
        return []
    if codes[others[0]][0] in ("div", "nodiv"):
        return [frozenset(d for d in others if codes[d][0] == "div")]
    ok = [d for d in others if codes[d][0] == "ok"]
    bad = [codes[d][1] for d in others if codes[d][0] in ("escape", "square7")]
    found = set()
    for mask in range(1, 1 << len(ok)):
        chosen = [ok[i] for i in range(len(ok)) if mask >> i & 1]
        L = math.lcm(*(codes[d][1] for d in chosen))
        if any(L % f == 0 for f in bad):
            continue
        found.add(frozenset(d for d in ok if L % codes[d][1] == 0))
    return sorted(found, key=sorted)


def _supply_feasible(P: list[int], options: dict) -> bool:
    demand = {5, 7} | (set(P) - {5})
    for combo in product(*(options[q] for q in P)):
        if sum(7 in D for D in combo) != 1:
            continue
        if demand <= set().union(*combo):
            return True
    return False


def _check_step(omega: int, i: int, step: ProofStep, steps: list[ProofStep]) -> list[tuple[str, ...]] | None:
    """Validate one step; return its children when it splits the branch."""
    b = step.branch
    st = _state(omega, b)
    w, s = step.witness, step.subject
    k = step.kind

    if k == "upper_bound":
        _require(st.slots >= 1, "window at a full branch")
        _require(sorted(s["fixed"]) == sorted((2,) + st.known) and s["slots"] == st.slots, "window subject mismatch")
        bound = w["bound"]
        sup = Fraction(3, 2)
        for p in st.known:
            sup *= Fraction(p, p - 1)
        if bound == "unbounded":
            _require(sup >= FRIEND_RATIO and parse_frac(w["limit"]) == sup, "unbounded claim fails")
            return None
        _require(sup < FRIEND_RATIO, "bounded claim on unbounded window")
        if bound is None:
            first = _next_candidate(st, st.floor)
            _require(w["first"] == first, "wrong first candidate")
            _require(_feasible(st, first) < FRIEND_RATIO, "first candidate is feasible")
            _require(parse_frac(w["at_first"]) == _feasible(st, first), "at_first mismatch")
            children: list[int] = []
        else:
            _require(_feasible(st, bound) >= FRIEND_RATIO, "bound is infeasible")
            nxt = _next_candidate(st, bound)
            _require(w["next"] == nxt and _feasible(st, nxt) < FRIEND_RATIO, "next prime still feasible")
            _require(parse_frac(w["at_bound"]) == _feasible(st, bound), "at_bound mismatch")
            _require(parse_frac(w["at_next"]) == _feasible(st, nxt), "at_next mismatch")
            children = _candidates(st, bound)
        _require(w["children"] == children, "window children mismatch")
        return [b + (str(c),) for c in children]

    if k == "lower_bound_exceeds":
        cap = s.get("cap")
        override = tuple(cap) if cap else None
        if override:
            _require(override[0] in st.known and override[0] not in st.exps, "cap on a fixed exponent")
            _require(override[1] >= 4 and override[1] % 2 == 0, "cap exponent")
        expect = _min_assignment(st, override)
        _require(s["assignment"] == expect, "assignment does not match branch")
        value = _abund(expect)
        _require(parse_frac(w["abundancy"]) == value and value > FRIEND_RATIO, "abundancy does not exceed 21/10")
        if override:
            q, E = override
            kids = [f"{q}^{e}" for e in range(2, E, 2)]
            _require(w["children"] == kids, "cap children mismatch")
            return [b + (c,) for c in kids]
        return None

    if k == "supply_constraint" and s.get("mode") == "sigma":
        _require(b and "^" in b[-1], "sigma forcing needs an exponent token")
        q, e = (int(x) for x in b[-1].split("^"))
        _require(s["prime"] == q and s["exponent"] == e, "sigma subject mismatch")
        value = _sigma_pp(q, e)
        _require(w["sigma"] == value, "sigma value mismatch")
        reason = w.get("reason")
        if reason == "seven_square":
            _require(w["verdict"] == "contradiction" and value % 49 == 0, "49 does not divide sigma")
            return None
        if reason == "small_prime":
            r = w["prime"]
            _require(w["verdict"] == "contradiction", "small_prime must be a contradiction")
            _require(value % r == 0 and is_prime(r), "small prime does not divide sigma")
            _require(r <= st.floor and r not in st.known and r != 7, "prime is not excluded")
            return None
        prod = 1
        for r, m in w["factors"]:
            _require(is_prime(r), f"{r} is not prime")
            prod *= r**m
        _require(prod == value, "sigma factors do not multiply back")
        primes = [r for r, _ in w["factors"]]
        outside = sorted(r for r in primes if r not in st.known and r != 7)
        _require(w["outside"] == outside, "outside primes mismatch")
        v7 = dict((r, m) for r, m in w["factors"]).get(7, 0)
        impossible = v7 >= 2 or any(r <= st.floor for r in outside) or len(outside) > st.slots
        if w["verdict"] == "contradiction":
            _require(impossible, "sigma contradiction not justified")
            return None
        _require(not impossible, "sigma value is already contradictory")
        if w["verdict"] == "forced":
            kids = ["+" + str(r) for r in outside]
            _require(outside and w["children"] == [kids], "forced children mismatch")
            return [b + tuple(kids)]
        _require(w["verdict"] == "none" and not outside, "bad sigma verdict")
        return None

    if k in ("five_placement", "seven_placement", "forced_companion") or (
        k == "supply_constraint" and s.get("mode") == "closure"
    ):
        _require(st.slots == 0, "leaf analysis on an open branch")
        P = list(st.known)
        S = set(P) | {7}
        if k == "forced_companion":
            q, d = s["q"], s["d"]
            _require(q in P and d in S and d != q, "pair outside the signature")
            f = _period(q, d)
            _require(w["f"] == f and f is not None, "period mismatch")
            R = (q**f - 1) // (q - 1)
            code, _ = _pair_code(q, d, S, st.exps)
            _require(w["status"] == code, "companion status mismatch")
            if "factors" in w:
                prod = 1
                for r, m in w["factors"]:
                    prod *= r**m
                _require(prod == R and w.get("repunit", R) == R, "repunit factors do not multiply back")
            if "escape" in w:
                r = w["escape"]
                _require(R % r == 0 and r not in S and is_prime(r), "escape prime invalid")
            return None
        if k in ("five_placement", "seven_placement"):
            d = 5 if k == "five_placement" else 7
            _require(s["demand"] == d, "placement demand mismatch")
            rows = [q for q in P if q != d]
            _require([r[0] for r in w["suppliers"]] == rows, "placement rows mismatch")
            for q, code, f in w["suppliers"]:
                _require((code, f) == _pair_code(q, d, S, st.exps), f"placement entry for {q} mismatch")
            return None
        table = {}
        for q, d, code, f in w["table"]:
            table[(q, d)] = (code, f)
        for q in P:
            for d in S - {q}:
                _require(table.get((q, d)) == _pair_code(q, d, S, st.exps), f"table entry ({q},{d}) mismatch")
        options = {q: _supply_options(q, S, table) for q in P}
        _require(not _supply_feasible(P, options), "supply problem has a solution")
        return None

    if k == "congruence_reject":
        _require(st.slots == 0 and set(st.exps) == set(st.known), "congruence filter needs exact exponents")
        p, f = s["p"], s["f"]
        _require(is_prime(p) and p % 6 == 1 and f == _order(5, p) and f % 3 == 0, "bad filter spec")
        _require(all((e + 1) % f == 0 for e in st.exps.values()), "filter does not apply")
        return None

    if k == "contradiction":
        ref = w.get("step")
        if ref is None:
            _require(w.get("rule") == "exact", "contradiction without a reference")
            _require(st.slots == 0 and set(st.exps) == set(st.known), "exact rule needs exact exponents")
            value = _abund(_min_assignment(st))
            _require(parse_frac(w["abundancy"]) == value and value != FRIEND_RATIO, "exact abundancy is 21/10")
            return None
        _require(0 <= ref < i and steps[ref].branch == b, "bad contradiction reference")
        target = steps[ref]
        refuting = (
            (target.kind == "lower_bound_exceeds" and not target.subject.get("cap"))
            or (target.kind == "supply_constraint" and target.subject.get("mode") == "closure")
            or (target.kind == "supply_constraint" and target.witness.get("verdict") == "contradiction")
            or target.kind == "congruence_reject"
        )
        _require(refuting, "referenced step does not refute the branch")
        return None

    raise _Fail(f"unhandled step kind {k}")


def verify_proof_log(log: ProofLog) -> Verification:
    """Re-check every step from its witness and the branch tree's closure."""
    splits: dict[tuple[str, ...], list[list[tuple[str, ...]]]] = {}
    contradicted: set[tuple[str, ...]] = set()
    reachable = {()}
    for i, step in enumerate(log.steps):
        try:
            _require(step.branch in reachable, "step on an unreachable branch")
            kids = _check_step(log.omega, i, step, log.steps)
        except _Fail as exc:
            return Verification(False, i, str(exc))
        except (KeyError, TypeError, ValueError) as exc:
            return Verification(False, i, f"malformed step: {exc!r}")
        if kids is not None:
            splits.setdefault(step.branch, []).append(kids)
            reachable.update(kids)
        if step.kind == "contradiction":
            contradicted.add(step.branch)

    memo: dict[tuple[str, ...], bool] = {}

    def closed(b: tuple[str, ...]) -> bool:
        if b not in memo:
            memo[b] = b in contradicted or any(all(closed(c) for c in kids) for kids in splits.get(b, []))
        return memo[b]

    root = closed(())
    if log.verdict == ELIMINATED and not root:
        return Verification(False, None, "verdict ELIMINATED but some branch is open", root)
    if log.verdict == INCONCLUSIVE and root:
        return Verification(False, None, "verdict INCONCLUSIVE but every branch is closed", root)
    return Verification(True, None, "", root)
