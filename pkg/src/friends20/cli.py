"""Command-line interface: ``friends20 <command> ...``.

Exit codes: 0 success, 1 a property violation or mismatch was found,
2 usage or input error, 3 inconclusive (budget exhausted or a witness too
large to factor with certified primality).

With ``--format text`` the first line is the headline result and every
payload field follows as ``key=<json>``, so text and JSON carry the same
information.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import core_arith
from .bound_engine import UNBOUNDED, feasibility_product, prime_window
from .core_arith import WitnessTooLarge, abundancy, factor_dict, is_friend_of_20, sigma
from .eliminator import eliminate_omega
from .exponent_bounds import (
    PartitionValueSet,
    min_partition_value,
    omega_capital_lower_bound,
    omega_m_lower_bound,
    size_upper_bound,
)
from .order_engine import forced_companions, mult_order, sigma_period
from .proof import ELIMINATED, ProofLog, frac_str, verify_proof_log
from .search import CheckpointError, SearchConfig, certify, scan_report, structured_search
from .table1 import table1_diff, table1_records

OK, VIOLATION, USAGE, INCONCLUSIVE = 0, 1, 2, 3


class Outcome:
    def __init__(self, payload: dict, code: int = OK, headline: str | None = None):
        self.payload = payload
        self.code = code
        self.headline = headline


def _headline(value) -> str:
    return value if isinstance(value, str) else json.dumps(value, sort_keys=True)


def render(outcome: Outcome, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(outcome.payload, sort_keys=True)
    head = outcome.headline if outcome.headline is not None else _headline(outcome.payload.get("result"))
    lines = [head]
    for key in sorted(outcome.payload):
        lines.append(f"{key}={json.dumps(outcome.payload[key], sort_keys=True)}")
    return "\n".join(lines)


def parse_text(text: str) -> dict:
    """Recover the JSON payload from ``--format text`` output."""
    out = {}
    for line in text.splitlines()[1:]:
        key, _, value = line.partition("=")
        out[key] = json.loads(value)
    return out


def _int(s: str) -> int:
    try:
        return int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {s!r}") from None


def _prime_list(s: str) -> list[int]:
    try:
        return [int(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}") from None


def _bound_value(x):
    if x is None:
        return None
    return "unbounded" if x == UNBOUNDED else int(x)


# ---------------------------------------------------------------------------
# commands


def cmd_factor(args) -> Outcome:
    fac = factor_dict(args.n)
    text = " * ".join(f"{p}^{e}" if e > 1 else str(p) for p, e in fac.items()) or "1"
    return Outcome({"n": args.n, "result": text, "factors": [[p, e] for p, e in fac.items()]})


def cmd_sigma(args) -> Outcome:
    return Outcome({"n": args.n, "result": sigma(args.n)})


def cmd_abundancy(args) -> Outcome:
    value = abundancy(args.n)
    return Outcome(
        {
            "n": args.n,
            "result": frac_str(value),
            "numerator": value.numerator,
            "denominator": value.denominator,
            "is_friend_of_20": is_friend_of_20(args.n),
        }
    )


def cmd_order(args) -> Outcome:
    return Outcome(
        {"q": args.q, "p": args.p, "result": mult_order(args.q, args.p), "sigma_period": sigma_period(args.q, args.p)}
    )


def cmd_companions(args) -> Outcome:
    cs = forced_companions(args.q, args.p)
    return Outcome(
        {
            "q": args.q,
            "p": args.p,
            "f": cs.f,
            "result": sorted(cs.companions),
            "repunit": cs.witness,
            "never": cs.never,
        }
    )


def cmd_bound(args) -> Outcome:
    w = prime_window(args.fixed, args.slots, floor=args.floor)
    payload = {
        "fixed": args.fixed,
        "slots": args.slots,
        "lower": w.lower,
        "result": _bound_value(w.upper),
    }
    if w.bounded:
        nxt = next(p for p in core_arith.PRIMES.after(w.upper) if p not in (3, 7) and p not in args.fixed)
        payload["at_bound"] = frac_str(feasibility_product(args.fixed, w.upper, args.slots))
        payload["next"] = nxt
        payload["at_next"] = frac_str(feasibility_product(args.fixed, nxt, args.slots))
        payload["candidates"] = w.candidates()
    elif w.empty:
        payload["at_first"] = frac_str(feasibility_product(args.fixed, w.lower, args.slots))
    return Outcome(payload)


def cmd_eliminate(args) -> Outcome:
    res = eliminate_omega(args.omega, budget=args.budget)
    if args.log:
        with open(args.log, "w") as fh:
            fh.write(res.log.to_jsonl())
    payload = {
        "omega": args.omega,
        "result": res.verdict,
        "steps": len(res.log.steps),
        "branches": len(res.log.branches()),
        "open_branches": res.open_branches,
        "log": args.log,
    }
    return Outcome(payload, OK if res.verdict == ELIMINATED else INCONCLUSIVE)


def cmd_verify_log(args) -> Outcome:
    with open(args.file) as fh:
        log = ProofLog.from_jsonl(fh.read())
    v = verify_proof_log(log)
    payload = {
        "file": args.file,
        "omega": log.omega,
        "verdict": log.verdict,
        "result": v.ok,
        "step": v.step,
        "reason": v.reason,
        "closed": v.closed_root,
    }
    return Outcome(payload, OK if v.ok else VIOLATION)


def cmd_table1(args) -> Outcome:
    records = [r.to_dict() for r in table1_records()]
    if not args.diff:
        return Outcome({"result": len(records), "records": records})
    diff = table1_diff()
    payload = {"result": "clean" if diff.clean else "mismatch", **diff.to_dict(), "records": records}
    return Outcome(payload, OK if diff.clean else VIOLATION)


def cmd_min_h(args) -> Outcome:
    payload = {"n": args.n, "a": args.a, "result": min_partition_value(args.n, args.a)}
    if args.n <= 40:
        payload["enumerated"] = PartitionValueSet.build(args.n, args.a).minimum()
    return Outcome(payload)


def cmd_bounds(args) -> Outcome:
    payload = {
        "a": args.a,
        "omega": args.omega,
        "result": omega_capital_lower_bound(args.a, args.omega),
        "omega_m": omega_m_lower_bound(args.a, args.omega),
    }
    if args.K is not None:
        sb = size_upper_bound(args.K, args.a)
        payload["K"] = args.K
        payload["size_upper_bound"] = str(sb)
        payload["size_exponent"] = sb.exponent
    return Outcome(payload)


def cmd_search(args) -> Outcome:
    cfg = SearchConfig(limit=args.limit, shard_count=args.shards, checkpoint_path=args.checkpoint, workers=args.workers)
    rep = structured_search(cfg)
    payload = rep.to_dict()
    payload["a_max"] = cfg.a_max
    payload["result"] = rep.friends_found
    return Outcome(payload, VIOLATION if rep.friends_found else OK)


def cmd_scan(args) -> Outcome:
    rep = scan_report(args.limit)
    sanity_ok = all(
        Fraction(v, int(k)) == {"6": 2, "28": 2, "20": Fraction(21, 10)}[k] for k, v in rep.sanity.items()
    )
    payload = rep.to_dict()
    payload["sanity_ok"] = sanity_ok
    payload["result"] = rep.friends
    cross = None
    if args.limit <= 10**8:
        st = structured_search(SearchConfig(limit=args.limit)) if args.limit >= 20 else None
        if st is not None:
            cross = st.candidates_tested == rep.shape_candidates and st.friends_found == rep.shape_friends
            payload["structured_candidates"] = st.candidates_tested
    payload["agrees_with_structured"] = cross
    bad = rep.friends or not sanity_ok or cross is False
    return Outcome(payload, VIOLATION if bad else OK)


def cmd_certify(args) -> Outcome:
    rep = certify(args.n)
    rep["result"] = rep["is_friend"]
    return Outcome(rep)


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default=argparse.SUPPRESS)
    common.add_argument("--seedless", action="store_true", default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="friends20", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    add("factor", cmd_factor, "prime factorization").add_argument("n", type=_int)
    add("sigma", cmd_sigma, "sum of divisors").add_argument("n", type=_int)
    add("abundancy", cmd_abundancy, "sigma(n)/n as a reduced fraction").add_argument("n", type=_int)
    p = add("order", cmd_order, "multiplicative order of Q modulo P")
    p.add_argument("q", type=_int)
    p.add_argument("p", type=_int)
    p = add("companions", cmd_companions, "primes forced into sigma(Q^2a) once P divides it")
    p.add_argument("q", type=_int)
    p.add_argument("p", type=_int)
    p = add("bound", cmd_bound, "window for the next prime divisor")
    p.add_argument("--fixed", type=_prime_list, required=True)
    p.add_argument("--slots", type=_int, required=True)
    p.add_argument("--floor", type=_int, default=None)
    p = add("eliminate", cmd_eliminate, "case elimination for a given number of distinct primes")
    p.add_argument("--omega", type=_int, required=True)
    p.add_argument("--budget", type=_int, default=None)
    p.add_argument("--log", default=None, help="write the JSON-lines proof log here")
    add("verify-log", cmd_verify_log, "re-check a proof log").add_argument("file")
    add("table1", cmd_table1, "regenerate the period table").add_argument("--diff", action="store_true")
    p = add("min-h", cmd_min_h, "minimum partition value")
    p.add_argument("n", type=_int)
    p.add_argument("a", type=_int)
    p = add("bounds", cmd_bounds, "Omega and size bounds")
    p.add_argument("--a", type=_int, required=True)
    p.add_argument("--omega", type=_int, required=True)
    p.add_argument("--K", type=_int, default=None)
    p = add("search", cmd_search, "structured search below a limit")
    p.add_argument("--limit", type=_int, default=SearchConfig.limit)
    p.add_argument("--shards", type=_int, default=1)
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--workers", type=_int, default=1)
    add("scan", cmd_scan, "naive sigma sieve cross-check").add_argument("--limit", type=_int, required=True)
    add("certify", cmd_certify, "check a number against every necessary condition").add_argument("n", type=_int)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    fmt = getattr(args, "format", "text")
    core_arith.configure(seedless=getattr(args, "seedless", False))
    try:
        outcome = args.func(args)
    except WitnessTooLarge as exc:
        print(f"friends20: inconclusive: {exc}", file=sys.stderr)
        return INCONCLUSIVE
    except (ValueError, CheckpointError, OSError) as exc:
        print(f"friends20: error: {exc}", file=sys.stderr)
        return USAGE
    print(render(outcome, fmt))
    return outcome.code


if __name__ == "__main__":
    sys.exit(main())
