"""Regeneration of the table of divisibility periods ``f`` for pairs ``(p, q)``.

The entry for ``(p, q)`` is the least ``f`` such that ``p | sigma(q^(2a))``
exactly when ``f | 2a + 1`` (see :func:`friends20.order_engine.sigma_period`).
A snapshot of the published table ships in ``data/table1_snapshot.json``; the
recomputation is treated as ground truth and the snapshot is only diffed
against it.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from importlib import resources

from .order_engine import sigma_period


@dataclass(frozen=True, order=True)
class PeriodRecord:
    q: int
    p: int
    f: int | None

    def to_dict(self) -> dict:
        return {"p": self.p, "q": self.q, "f": self.f}


@dataclass(frozen=True)
class SnapshotEntry:
    row: int
    col: int
    p: int
    q: int
    f: int


def load_snapshot() -> list[SnapshotEntry]:
    text = resources.files("friends20").joinpath("data/table1_snapshot.json").read_text()
    return [SnapshotEntry(**e) for e in json.loads(text)["entries"]]


def recompute(p: int, q: int) -> PeriodRecord:
    return PeriodRecord(q, p, sigma_period(q, p))


def table1_records(snapshot: list[SnapshotEntry] | None = None) -> list[PeriodRecord]:
    """Every distinct ``(p, q)`` of the table, recomputed and sorted by ``(q, p)``."""
    snapshot = load_snapshot() if snapshot is None else snapshot
    pairs = {(e.p, e.q) for e in snapshot}
    return sorted(recompute(p, q) for p, q in pairs)


@dataclass(frozen=True)
class Mismatch:
    row: int
    col: int
    p: int
    q: int
    snapshot_f: int
    computed_f: int | None

    @property
    def snapshot_value_consistent(self) -> bool:
        """Whether ``q^snapshot_f = 1 (mod p)`` at least holds."""
        return pow(self.q, self.snapshot_f, self.p) == 1

    def to_dict(self) -> dict:
        return {
            "row": self.row,
            "col": self.col,
            "p": self.p,
            "q": self.q,
            "snapshot_f": self.snapshot_f,
            "computed_f": self.computed_f,
            "snapshot_value_consistent": self.snapshot_value_consistent,
        }


@dataclass(frozen=True)
class TableDiff:
    entries: int
    distinct_pairs: int
    mismatches: tuple[Mismatch, ...]
    duplicates: tuple[tuple[int, int, tuple[tuple[int, int], ...]], ...]

    @property
    def clean(self) -> bool:
        return not self.mismatches

    def to_dict(self) -> dict:
        return {
            "entries": self.entries,
            "distinct_pairs": self.distinct_pairs,
            "mismatches": [m.to_dict() for m in self.mismatches],
            "duplicates": [{"p": p, "q": q, "positions": [list(x) for x in pos]} for p, q, pos in self.duplicates],
        }


def table1_diff(snapshot: list[SnapshotEntry] | None = None) -> TableDiff:
    """Compare the snapshot with the recomputation, entry by entry.

    Repeated ``(p, q)`` pairs are listed separately from value mismatches.
    """
    snapshot = load_snapshot() if snapshot is None else snapshot
    computed = {(r.p, r.q): r.f for r in table1_records(snapshot)}
    mismatches = []
    positions = defaultdict(list)
    for e in snapshot:
        positions[(e.p, e.q)].append((e.row, e.col))
        if computed[(e.p, e.q)] != e.f:
            mismatches.append(Mismatch(e.row, e.col, e.p, e.q, e.f, computed[(e.p, e.q)]))
    dups = tuple(sorted((p, q, tuple(pos)) for (p, q), pos in positions.items() if len(pos) > 1))
    return TableDiff(len(snapshot), len(computed), tuple(mismatches), dups)
