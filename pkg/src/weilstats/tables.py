"""The shipped record tables for the maximum point counts N_q(g) and the
bound-consistency diff.

Table cells come in three forms: an exact value "5", an interval
"80--91" (the true maximum lies inside), or "--408" (only an upper
bound is known).  The diff recomputes this package's own upper bounds
at every (g, q) and reports the slack; a table lower value exceeding
one of our bounds would falsify that bound and is reported loudly as a
VIOLATION.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from . import zeta_bounds as zb
from .errors import ValidationError


class EntryKind(enum.Enum):
    EXACT = "exact"
    INTERVAL = "interval"
    UPPER_ONLY = "upper_only"


@dataclass(frozen=True)
class TableEntry:
    q: int
    g: int
    kind: EntryKind
    lo: int | None  # best known curve (lower bound for N_q(g)); None if unknown
    hi: int         # best known upper bound

    @staticmethod
    def parse(g: int, q: int, cell: str) -> "TableEntry":
        cell = cell.strip()
        if cell.startswith("--"):
            return TableEntry(q=q, g=g, kind=EntryKind.UPPER_ONLY, lo=None, hi=int(cell[2:]))
        if "--" in cell:
            lo, hi = cell.split("--")
            lo, hi = int(lo), int(hi)
            if lo > hi:
                raise ValidationError(f"malformed interval {cell!r} at (g={g}, q={q})")
            return TableEntry(q=q, g=g, kind=EntryKind.INTERVAL, lo=lo, hi=hi)
        if not cell.isdigit():
            raise ValidationError(f"malformed cell {cell!r} at (g={g}, q={q})")
        v = int(cell)
        return TableEntry(q=q, g=g, kind=EntryKind.EXACT, lo=v, hi=v)


def parse_tables(source) -> list[TableEntry]:
    """Parse a table CSV (columns g, q, entry) from a path or a string."""
    if isinstance(source, str) and "\n" in source:
        text = source
    else:
        text = Path(source).read_text()
    entries = []
    lines = [l for l in text.strip().splitlines() if l.strip()]
    header = [h.strip() for h in lines[0].split(",")]
    if header != ["g", "q", "entry"]:
        raise ValidationError("table file must have the header g,q,entry")
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != 3:
            raise ValidationError(f"malformed row {line!r}")
        g, q, cell = int(parts[0]), int(parts[1]), parts[2]
        entries.append(TableEntry.parse(g, q, cell))
    return entries


def shipped_table(p: int) -> list[TableEntry]:
    if p not in (2, 3):
        raise ValidationError("shipped tables exist for p = 2 and p = 3")
    text = resources.files("weilstats").joinpath(f"data/nq_table_p{p}.csv").read_text()
    return parse_tables(text)


@dataclass
class DiffRow:
    entry: TableEntry
    our_bound: int
    methods: dict
    violation: bool
    slack: int  # our_bound - table upper bound


@dataclass
class DiffReport:
    rows: list

    @property
    def violations(self):
        return [r for r in self.rows if r.violation]

    @property
    def total_slack(self):
        return sum(r.slack for r in self.rows)


def table_diff(entries, methods=("hw", "ihara"), search_budget: int = 300,
               seed: int = 0) -> DiffReport:
    """Compare table rows against this package's bounds.

    VIOLATION means a table lower value exceeds our bound, which must
    never happen for correct bound formulas; SLACK is our bound minus
    the table's upper value (>= 0 means the table knows at least as
    much as the closed formulas)."""
    rows = []
    for e in entries:
        rep = zb.bound_report(e.q, e.g, methods=methods,
                              search_budget=search_budget, seed=seed)
        ours = rep.best
        violation = e.lo is not None and e.lo > ours
        rows.append(DiffRow(entry=e, our_bound=ours, methods=dict(rep.methods),
                            violation=violation, slack=ours - e.hi))
    return DiffReport(rows=rows)
