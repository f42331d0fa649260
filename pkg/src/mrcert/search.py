"""Certificate search.

Every rule stays applicable when rows other than the ones it drops are
removed, so greedy saturation reaches the same stuck set in any order, and
that stuck set is the largest subset of the start on which no rule fires.
Two consequences drive the search below:

* excluding (at Rule (i)) a row that saturation can drop anyway never helps,
  so the selection search only branches on rows of the stuck set;
* any subset of an eliminable selection is itself eliminable, so a selection
  that is too large can be trimmed to exactly N rows afterwards.

Rule VI steps are only searched in the strict form (both rows present in
both columns), which is valid in either reading of the rule.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from math import comb
from typing import Iterable, Sequence

from .errors import BudgetExhausted, CoverageGap, PreconditionViolated
from .rules import RULES, Certificate, RuleContext, RuleStep, _bits, verify_certificate
from .tables import CaseParams, ErasureMask, Row, TensorTable, multidegree

STRATEGIES = ("auto", "explicit", "sweep", "exhaustive")


@dataclass(frozen=True)
class SearchConfig:
    rule_order: tuple[str, ...] = RULES
    depth_limit: int | None = None
    selection: str = "auto"
    explicit_rows: tuple[Row, ...] | None = None
    time_budget: float = 10.0
    exhaustive_cap: int = 10**6
    strict_vi: bool = True

    def __post_init__(self):
        if self.depth_limit is not None and self.depth_limit < 0:
            raise ValueError("depth limit must be nonnegative")
        if self.selection not in STRATEGIES:
            raise ValueError(f"unknown selection strategy {self.selection!r}")
        if sorted(self.rule_order) != sorted(set(self.rule_order)) or not set(self.rule_order) <= set(RULES):
            raise ValueError("rule order must list distinct rules among II..VII")


@dataclass(frozen=True)
class SearchResult:
    certificate: Certificate | None
    status: str
    deepest: tuple[Row, ...] = ()
    rules_attempted: tuple[str, ...] = ()
    explored: int = 0
    message: str = ""

    @property
    def found(self) -> bool:
        return self.certificate is not None


class _Clock:
    def __init__(self, budget: float | None):
        self.deadline = None if budget is None else time.monotonic() + budget

    def check(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise BudgetExhausted("time budget exhausted")


def saturate(ctx: RuleContext, remaining: int, order: Sequence[str] = RULES,
             columns: Iterable[int] | None = None, clock: _Clock | None = None) -> tuple[list[RuleStep], int]:
    """Apply rules greedily until none fires; returns the steps and the stuck set.

    ``columns`` (0-based) restricts where rules are looked for. Every rule stays
    legal when other rows leave, so with strict Rule VI the order of drops does not
    matter and a stuck set means the selection is not expungeable. Without strict VI
    this is only a heuristic.
    """
    cols = list(range(ctx.g)) if columns is None else list(columns)
    order = [r for r in order if r != "VII" or ctx.m == 2]
    steps = []
    while remaining:
        step = None
        for rule in order:
            for i in cols:
                step = ctx.find(rule, remaining, i)
                if step is not None:
                    break
            if step is not None:
                break
        if step is None:
            break
        steps.append(step)
        remaining &= ~ctx.mask_of(step.rows)
        if clock is not None:
            clock.check()
    return steps, remaining


def _case_of(ttable: TensorTable) -> CaseParams:
    return CaseParams(ttable.g, ttable.r, ttable.d, ttable.m)


def _certificate(ctx: RuleContext, selected: int, steps: list[RuleStep]) -> Certificate:
    t = ctx.ttable
    return Certificate(_case_of(t), t.seq, ctx.mask.w, ctx.rows_of(selected), tuple(steps))


def certify_selection(ctx: RuleContext, selected: int, order: Sequence[str] = RULES,
                      clock: _Clock | None = None) -> Certificate | None:
    steps, left = saturate(ctx, selected, order, clock=clock)
    return None if left else _certificate(ctx, selected, steps)


def _trim(ctx: RuleContext, selected: int, n: int) -> int:
    """Drop the highest-numbered rows until exactly n remain."""
    ks = sorted(_bits(selected))
    for k in ks[n:]:
        selected &= ~(1 << k)
    return selected


def _exclusion_search(ctx: RuleContext, start: int, k: int, order, clock: _Clock, depth_limit):
    """Find excluded rows E with |E| <= k such that start minus E saturates to nothing."""
    seen = set()
    best = [None]
    explored = [0]
    limit = k if depth_limit is None else min(k, depth_limit)

    def rec(stuck: int, excluded: int, left: int):
        explored[0] += 1
        clock.check()
        if best[0] is None or stuck.bit_count() < best[0].bit_count():
            best[0] = stuck
        if not stuck:
            return excluded
        if left == 0:
            return None
        for y in _bits(stuck):
            _, nxt = saturate(ctx, stuck & ~(1 << y), order, clock=clock)
            if nxt in seen:
                continue
            seen.add(nxt)
            found = rec(nxt, excluded | (1 << y), left - 1)
            if found is not None:
                return found
        return None

    _, first = saturate(ctx, start, order, clock=clock)
    seen.add(first)
    try:
        excluded = rec(first, 0, limit)
    except BudgetExhausted as exc:
        exc.partial = SearchResult(None, "budget", ctx.rows_of(best[0] or 0), tuple(order), explored[0],
                                   "time budget exhausted")
        raise
    return excluded, best[0], explored[0]


def search_certificate(ttable: TensorTable, mask: ErasureMask, N: int,
                       config: SearchConfig | None = None) -> SearchResult:
    """Look for an N-row certificate. A failed search does not prove that none exists."""
    config = config or SearchConfig()
    n_rows = len(ttable.rows)
    if not 0 <= N <= n_rows:
        raise ValueError(f"N must lie in [0, {n_rows}]")
    ctx = RuleContext(ttable, mask, config.strict_vi)
    clock = _Clock(config.time_budget)
    order = tuple(config.rule_order)
    if N == 0:
        return SearchResult(_certificate(ctx, 0, []), "found", rules_attempted=order)

    strategy = config.selection
    if strategy == "auto":
        if config.explicit_rows is not None:
            strategy = "explicit"
        elif N == n_rows or comb(n_rows, n_rows - N) <= config.exhaustive_cap:
            strategy = "exhaustive"
        else:
            strategy = "sweep"

    if strategy == "explicit":
        if config.explicit_rows is None or len(set(config.explicit_rows)) != N:
            raise ValueError("explicit selection must list exactly N distinct rows")
        selected = ctx.mask_of(config.explicit_rows)
        try:
            steps, left = saturate(ctx, selected, order, clock=clock)
        except BudgetExhausted as exc:
            exc.partial = SearchResult(None, "budget", rules_attempted=order, message="time budget exhausted")
            raise
        if left:
            return SearchResult(None, "not_found", ctx.rows_of(left), order, 1, "selected rows get stuck")
        return SearchResult(_certificate(ctx, selected, steps), "found", (), order, 1)

    if strategy == "sweep":
        md = ttable.m * ttable.d
        degs = multidegree(mask.w, md)
        for i0 in range(1, ttable.g + 1):
            if sum(x - 1 for x in degs[:i0]) < 0:
                continue
            clock.check()
            try:
                got = surjective_sweep(ttable, mask, mask.w, i0, strict_vi=config.strict_vi)
            except (PreconditionViolated, CoverageGap):
                return SearchResult(None, "not_found", rules_attempted=order,
                                    message="sweep preconditions do not hold")
            if got is not None and got[1].N == N:
                return SearchResult(got[1], "found", (), order, i0)
        return SearchResult(None, "not_found", rules_attempted=order, message="no column sweep succeeded")

    if comb(n_rows, n_rows - N) > config.exhaustive_cap:
        raise ValueError("exhaustive selection exceeds the configured cap")
    excluded, deepest, explored = _exclusion_search(ctx, ctx.all_rows, n_rows - N, order, clock,
                                                    config.depth_limit)
    if excluded is None:
        return SearchResult(None, "not_found", ctx.rows_of(deepest), order, explored,
                            "every admissible selection gets stuck")
    selected = _trim(ctx, ctx.all_rows & ~excluded, N)
    cert = certify_selection(ctx, selected, order, clock)
    assert cert is not None, "trimmed selection must still be eliminable"
    return SearchResult(cert, "found", (), order, explored)


def _column_targets(c: list[int], i: int, i0: int, g: int, md: int) -> list[int]:
    """Values a covering selection uses in column i (c is 1-based with c[1]=0, c[g+1]=md)."""
    if i == i0:
        return [0] + list(range(i0, c[i0 + 1]))
    if i == g:
        return list(range(c[g] + 1, md - 1)) + [md]
    return list(range(c[i] + 1, c[i + 1]))


def surjective_sweep(ttable: TensorTable, mask: ErasureMask, w: Sequence[int], i0: int,
                     variant: str = "generic", strict_vi: bool = True):
    """Choose md+1-g rows column by column from i0 on and drop each column's rows in turn.

    Variants: ``generic`` takes any rows that rules II-V can clear inside the
    column; ``coverage`` needs one row for every prescribed a-value;
    ``relaxed`` also accepts the top value missing with the one below it twice.
    Returns ``(selected rows, certificate)`` or None for a failed generic sweep.
    """
    if variant not in ("generic", "coverage", "relaxed"):
        raise ValueError(f"unknown variant {variant!r}")
    g, m, d = ttable.g, ttable.m, ttable.d
    md = m * d
    N = md + 1 - g
    if len(ttable.rows) < N:
        raise PreconditionViolated("not in the surjective range")
    if tuple(w) != tuple(mask.w):
        raise ValueError("w does not match the erasure mask")
    degs = multidegree(w, md)
    if any(x <= 0 for x in degs[1:]):
        raise PreconditionViolated("multidegree must be positive beyond the first column")
    if not 1 <= i0 <= g or sum(x - 1 for x in degs[:i0]) < 0:
        raise PreconditionViolated(f"column {i0} cannot start the sweep")
    ctx = RuleContext(ttable, mask, strict_vi)
    c = [0, 0] + list(w) + [md]
    seen_before = 0
    for i in range(i0 - 1):
        seen_before |= ctx.present[i]
    selected = 0
    steps: list[RuleStep] = []
    for i in range(i0, g + 1):
        col = ctx.present[i - 1]
        eligible = col & ~selected if i == i0 else col & ~seen_before
        need = (c[i0 + 1] - i0 + 1) if i == i0 else degs[i - 1] - 1
        targets = _column_targets(c, i, i0, g, md)
        if variant == "generic":
            chosen = _generic_choice(ctx, eligible, i - 1, need)
            if chosen is None:
                return None
        else:
            chosen = _covering_choice(ctx, eligible, i, need, targets, variant == "relaxed")
        col_steps, left = saturate(ctx, chosen, ("II", "III", "IV", "V"), columns=[i - 1])
        if left:
            if variant == "generic":
                return None
            raise CoverageGap(i, ctx.a[next(_bits(left))][i - 1])
        steps.extend(col_steps)
        selected |= chosen
        seen_before |= col
    cert = _certificate(ctx, selected, steps)
    report = verify_certificate(ttable, mask, cert, strict_vi)
    assert report.valid, report.message
    assert cert.N == N
    return cert.selected, cert


def _by_value(ctx: RuleContext, eligible: int, i: int) -> dict[int, list[int]]:
    groups: dict[int, list[int]] = {}
    for k in _bits(eligible):
        groups.setdefault(ctx.a[k][i], []).append(k)
    return groups


def _pack(ks: Iterable[int]) -> int:
    bits = 0
    for k in ks:
        bits |= 1 << k
    return bits


def _generic_choice(ctx: RuleContext, eligible: int, i: int, need: int) -> int | None:
    if need == 0:
        return 0
    groups = _by_value(ctx, eligible, i)
    values = sorted(groups)
    if len(values) >= need:
        return _pack(groups[v][0] for v in values[:need])
    if need >= 2 and len(values) >= need - 1 and len(groups[values[need - 2]]) >= 2:
        top = values[need - 2]
        return _pack([groups[v][0] for v in values[: need - 1]] + [groups[top][1]])
    _, stuck = saturate(ctx, eligible, ("II", "III", "IV", "V"), columns=[i])
    droppable = [k for k in _bits(eligible & ~stuck)]
    if len(droppable) >= need:
        steps, _ = saturate(ctx, eligible, ("II", "III", "IV", "V"), columns=[i])
        order = [ctx.ttable.index[row] for s in steps for row in s.rows]
        return _pack(order[:need])
    return None


def _covering_choice(ctx: RuleContext, eligible: int, col: int, need: int, targets: list[int],
                     relaxed: bool) -> int:
    i = col - 1
    groups = _by_value(ctx, eligible, i)
    missing = [v for v in targets if v not in groups]
    if not missing:
        chosen = [groups[v][0] for v in targets]
    elif relaxed and missing == [targets[-1]] and len(targets) >= 2 and len(groups.get(targets[-2], [])) >= 2:
        chosen = [groups[v][0] for v in targets[:-1]] + [groups[targets[-2]][1]]
    else:
        raise CoverageGap(col, missing[0])
    if len(chosen) != need:
        raise CoverageGap(col, targets[-1] if targets else 0)
    return _pack(chosen)
