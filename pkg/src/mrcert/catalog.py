"""Worked examples with hand-made certificates, stored as short drop plans.

A plan lists, in order, which rules to use in which columns (and, where the
walkthrough names them, which rows go). ``expand_plan`` turns a plan into
explicit rule steps against the erased table; the steps are then checked by
the verifier like any other certificate.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import StepRejected, UnsupportedRank
from .rules import Certificate, RuleContext, RuleStep, _bits, verify_certificate
from .tables import CaseParams, Row, build_tensor_table, build_vanishing_table, erase, validate_sequence


@dataclass(frozen=True)
class PlanItem:
    rules: tuple[str, ...]
    columns: tuple[int, ...] | None = None  # None: any column
    rows: tuple[Row, ...] | None = None  # rows this item must drop
    count: int | None = None  # number of steps, when rows are not named
    j: int | None = None  # Rule V digit


def item(rules, columns=None, rows=None, count=None, j=None) -> PlanItem:
    rules = (rules,) if isinstance(rules, str) else tuple(rules)
    columns = (columns,) if isinstance(columns, int) else (None if columns is None else tuple(columns))
    rows = None if rows is None else tuple(tuple(r) for r in rows)
    return PlanItem(rules, columns, rows, count, j)


@dataclass(frozen=True)
class Example:
    name: str
    g: int
    r: int
    d: int
    m: int
    delta: tuple[int, ...]
    w: tuple[int, ...]
    plan: tuple[PlanItem, ...]
    excluded: tuple[Row, ...] = ()
    note: str = ""

    @property
    def case(self) -> CaseParams:
        return CaseParams(self.g, self.r, self.d, self.m)


def _find(ctx: RuleContext, rule: str, remaining: int, i: int, j: int | None) -> RuleStep | None:
    if rule != "V" or j is None:
        return ctx.find(rule, remaining, i)
    present = remaining & ctx.present[i]
    ks = list(_bits(present))
    if not ks or j == ctx.delta[i]:
        return None
    cs = [ctx.counts[k][j] for k in ks]
    n = min(cs)
    if cs.count(n) != 1:
        return None
    return RuleStep("V", i + 1, (ctx.rows[ks[cs.index(n)]],), j=j, n=n)


def expand_plan(ctx: RuleContext, selected: int, plan: Sequence[PlanItem]) -> list[RuleStep]:
    """Turn plan items into concrete steps; raises StepRejected when an item cannot be carried out."""
    remaining = selected
    steps: list[RuleStep] = []
    for it in plan:
        cols = range(ctx.g) if it.columns is None else [c - 1 for c in it.columns]
        target = None if it.rows is None else ctx.mask_of(it.rows)
        if target is not None and target & ~remaining:
            raise StepRejected(f"plan item {it} names rows that are already gone")
        done = 0
        while True:
            if target is not None and not target & remaining:
                break
            if it.count is not None and done == it.count:
                break
            step = None
            for rule in it.rules:
                for i in cols:
                    cand = _find(ctx, rule, remaining, i, it.j)
                    if cand is None:
                        continue
                    if target is not None and ctx.mask_of(cand.rows) & ~target:
                        # keep only the named rows when a rule would take more
                        if rule == "IV":
                            cand = RuleStep("IV", cand.column, ctx.rows_of(ctx.mask_of(cand.rows) & target))
                        else:
                            continue
                    step = cand
                    break
                if step is not None:
                    break
            if step is None:
                break
            diag = ctx.check(remaining, step)
            if diag is not None:
                raise StepRejected(diag)
            steps.append(step)
            remaining &= ~ctx.mask_of(step.rows)
            done += 1
        if target is not None and target & remaining:
            left = ctx.rows_of(target & remaining)
            raise StepRejected(f"plan item {it} could not drop {left}")
        if it.count is not None and done != it.count:
            raise StepRejected(f"plan item {it} made {done} of {it.count} steps")
        if it.rows is None and it.count is None and it.columns is not None:
            for i in cols:
                if remaining & ctx.present[i]:
                    raise StepRejected(f"plan item {it} left rows in column {i + 1}")
    return steps


def example_certificate(ex: Example, strict_vi: bool = True) -> Certificate:
    seq = validate_sequence(ex.delta, ex.g, ex.r, ex.d)
    ttable = build_tensor_table(build_vanishing_table(seq), ex.m)
    mask = erase(ttable, ex.w)
    ctx = RuleContext(ttable, mask, strict_vi)
    selected = ctx.all_rows & ~ctx.mask_of(ex.excluded)
    steps = expand_plan(ctx, selected, ex.plan)
    cert = Certificate(ex.case, seq, ex.w, ctx.rows_of(selected), tuple(steps))
    report = verify_certificate(ttable, mask, cert, strict_vi)
    if not report.valid:
        raise StepRejected(f"{ex.name}: {report.message}")
    return cert


def _blocks(*sizes: tuple[int, int]) -> tuple[int, ...]:
    out: list[int] = []
    for value, count in sizes:
        out += [value] * count
    return tuple(out)


EXAMPLES: dict[str, Example] = {}


def _add(ex: Example) -> None:
    EXAMPLES[ex.name] = ex


_add(Example(
    "m2-r3-g4", 4, 3, 6, 2, (0, 1, 2, 3), (2, 6, 8),
    (item("II"),),
    excluded=((0, 3),),
    note="drop (0,3) at selection, then Rule II throughout",
))

_add(Example(
    "m2-r3-g5", 5, 3, 7, 2, (0, 1, 2, 3, 0), (2, 6, 8, 10),
    (
        item("III", 5, count=2),
        item("IV", 5),
        item("IV", 3, rows=[(0, 3), (1, 2)]),
        item(("II", "III")),
    ),
    note="III twice and IV in the last column, IV in column 3, then II/III",
))

_M2_CRITICAL_HEAD = (
    item("II", 1, rows=[(0, 0), (0, 1)]),
    item("II", 2, rows=[(0, 2)]),
    item("II", 3, rows=[(0, 3), (1, 1)]),
    item("II", 4, rows=[(1, 2)]),
    item("III", 10, rows=[(4, 4), (3, 4)]),
    item("III", 9, rows=[(2, 4)]),
    item("III", 8, rows=[(1, 4), (3, 3)]),
    item("III", 7, rows=[(2, 3)]),
)

_add(Example(
    "m2-critical", 10, 4, 12, 2, _blocks((0, 2), (1, 2), (2, 2), (3, 2), (4, 2)),
    (2, 4, 7, 9, 12, 15, 17, 20, 22),
    _M2_CRITICAL_HEAD + (item("VII", 5, rows=[(0, 4), (1, 3), (2, 2)]),),
    note="II from the left, III from the right, Rule VII in the middle block",
))

_add(Example(
    "m2-critical-vi", 10, 4, 12, 2, _blocks((0, 2), (1, 2), (2, 2), (3, 2), (4, 2)),
    (2, 4, 7, 9, 12, 15, 17, 20, 22),
    _M2_CRITICAL_HEAD + (item("VI", 5, rows=[(0, 4), (1, 3)]), item("IV", 5, rows=[(2, 2)])),
    note="same as m2-critical but finishing with Rule VI and Rule IV",
))

_add(Example(
    "m3-r3", 7, 3, 9, 3, (0, 0, 1, 1, 2, 2, 3), (4, 7, 10, 13, 17, 21),
    (
        item("II", (1, 3, 4, 7), rows=[
            (0, 0, 0), (0, 0, 1), (0, 1, 2), (0, 1, 3), (1, 1, 1), (1, 1, 2),
            (1, 1, 3), (2, 2, 3), (0, 3, 3), (1, 3, 3), (2, 3, 3), (3, 3, 3),
        ]),
        item("III", 6, rows=[(1, 2, 3), (0, 2, 3), (2, 2, 2)]),
        item("IV", (2, 1, 5)),
    ),
))

# The printed sequence for this example has 13 entries while its table has
# 16 columns; these 16 entries are read back from the printed columns.
_add(Example(
    "m3-r4", 16, 4, 17, 3, _blocks((0, 4), (1, 3), (2, 3), (3, 3), (4, 3)),
    (3, 5, 7, 12, 16, 19, 22, 24, 28, 31, 35, 37, 41, 44, 47),
    (
        item(("II", "III"), (1, 2, 3, 6, 7, 8, 10)),
        item(("II", "IV"), 4),
        item("IV", (5, 9)),
        item("II", 11),
        # (3,3,4) also appears in column 16, which ties columns 15 and 16;
        # clearing columns 12 to 16 left to right with Rule II resolves it
        item("IV", 12),
        item(("II", "IV"), (13, 14, 15, 16)),
    ),
))

_add(Example(
    "m3-r5", 26, 5, 27, 3, _blocks((0, 5), (1, 5), (2, 4), (3, 4), (4, 4), (5, 4)),
    (3, 6, 8, 11, 15, 18, 21, 24, 28, 31, 34, 37, 41, 44, 47, 50, 53, 56, 60, 63, 66, 70, 73, 76, 78),
    (
        item("III", (1, 4, 17, 24, 25, 26)),
        item("II", 18),
        item("IV", 3),
        item("IV", 2),
        item("IV", 23),
        item("V", 22, rows=[(4, 4, 4)], j=5),
        item("IV", 22),
        item("IV", 21),
        item("IV", 20),
        item("IV", 19),
        item("V", 6, rows=[(1, 1, 1)], j=0),
        item("V", 7, rows=[(0, 1, 5)], j=2),
        item("IV", 7),
        item("IV", 6),
        item("IV", 5),
        item("IV", 8),
        item("V", 10, rows=[(0, 3, 3)], j=2),
        item("V", 9, rows=[(1, 1, 5)], j=2),
        item("IV", 9),
        item("IV", 10),
        item("IV", 11),
        item("IV", 12),
        item("V", 13, rows=[(2, 2, 4)], j=3),
        item("V", 14, rows=[(2, 2, 5)], j=3),
        item("IV", 14),
        item("IV", 13),
        item("VI", (15, 16), count=1),
        item("IV", (15, 16)),
    ),
))

M3_BY_RANK = {3: "m3-r3", 4: "m3-r4", 5: "m3-r5"}


def m3_example(r: int) -> Example:
    if r not in M3_BY_RANK:
        raise UnsupportedRank(f"no stored cubic example for r={r}; available: 3, 4, 5")
    return EXAMPLES[M3_BY_RANK[r]]
