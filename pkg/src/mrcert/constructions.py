"""Explicit (sequence, twist vector, certificate) constructions and the reductions that combine them.

Certificates are assembled from pieces (hand plans, reindexed
sub-certificates, column sweeps) rather than searched for, and every result
is replayed through the verifier before it is returned.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

from . import catalog
from .errors import (
    DistinctnessFailure,
    HypothesisViolation,
    NotExtendable,
    NotInjective,
    OutOfScope,
    ReductionMismatch,
)
from .rules import Certificate, RuleStep, VerificationReport, replay
from .search import surjective_sweep
from .tables import (
    CaseParams,
    GrdSequence,
    build_tensor_table,
    build_vanishing_table,
    checked,
    erase,
    is_extendable,
    is_unimaginative,
    validate_sequence,
)


@dataclass(frozen=True)
class ConstructionResult:
    case: CaseParams
    seq: GrdSequence
    w: tuple[int, ...]
    N: int
    certificate: Certificate | None
    provenance: str
    reductions: tuple[str, ...] = field(default=())

    def verify(self) -> VerificationReport:
        if self.certificate is None:
            raise ValueError("no certificate attached")
        return replay(self.certificate)


def _finish(case: CaseParams, seq: GrdSequence, w, cert: Certificate, provenance: str,
            reductions=()) -> ConstructionResult:
    w = tuple(w)
    report = replay(cert)
    assert report.valid, f"{provenance}: {report.message}"
    return ConstructionResult(case, seq, w, cert.N, cert, provenance, tuple(reductions))


def _check_m2_invariants(res: ConstructionResult) -> None:
    """Induction invariants of the quadric driver, checked rather than assumed."""
    assert is_unimaginative(res.w, 2), f"{res.provenance}: w is not unimaginative"
    assert not res.w or res.w[0] >= 2, f"{res.provenance}: c_2 < 2"


# -- quadrics: the critical family ----------------------------------------------------------------


def critical_parameters(r: int) -> tuple[int, int, int]:
    """(g, d, copies) of the critical quadric case of rank r."""
    if r % 2 == 0:
        return (r + 1) * r // 2, (r + 2) * r // 2, r // 2
    return (r + 1) ** 2 // 2, r * (r + 3) // 2, (r + 1) // 2


def critical_twist(g: int, ell: int) -> tuple[int, ...]:
    w = [2]
    for i in range(3, g + 1):
        if 2 * i <= g + 2:
            step = 3 if i % ell == 2 % ell else 2
        else:
            step = 3 if i % ell == 1 % ell else 2
        w.append(w[-1] + step)
    return tuple(w)


def _critical_plan(r: int, ell: int) -> tuple[catalog.PlanItem, ...]:
    def cols(block: int, backwards: bool):
        cs = range(block * ell + 1, (block + 1) * ell + 1)
        return reversed(cs) if backwards else cs

    if r % 2 == 0:
        left, right, center = range(r // 2), range(r, r // 2, -1), r // 2
    else:
        left, right, center = range((r + 1) // 2), range(r, (r + 1) // 2 - 1, -1), None
    plan = []
    # Rule VII spans columns to its right, so each block is one plan item
    for block in left:
        plan.append(catalog.item(("IV", "VII"), tuple(cols(block, False))))
    for block in right:
        plan.append(catalog.item(("IV", "VII"), tuple(cols(block, True))))
    if center is not None:
        plan.append(catalog.item(("VII", "IV"), tuple(cols(center, False))))
    return tuple(plan)


@lru_cache(maxsize=None)
def critical_m2(r: int) -> ConstructionResult:
    if r < 4:
        raise OutOfScope("the critical quadric family starts at r = 4")
    g, d, ell = critical_parameters(r)
    case = CaseParams(g, r, d, 2)
    entries = tuple(v for v in range(r + 1) for _ in range(ell))
    seq = validate_sequence(entries, g, r, d)
    w = critical_twist(g, ell)
    ex = catalog.Example(f"critical-r{r}", g, r, d, 2, entries, w, _critical_plan(r, ell))
    cert = catalog.example_certificate(ex)
    res = _finish(case, seq, w, cert, f"critical_m2(r={r})")
    _check_m2_invariants(res)
    return res


# -- quadrics: reductions -------------------------------------------------------------------------


def reduction_step(g: int, r: int, d: int) -> tuple[int, tuple[int, int, int]]:
    """t and the reduced case (g', r', d') of the rank-lowering reduction."""
    case = CaseParams(g, r, d, 2)
    t = min(case.rho + case.ell, r - 1)
    return t, (g - t, r - 1, d - t - 1)


def basic_reduction_lift(sub: ConstructionResult, r: int, g: int, d: int) -> ConstructionResult:
    t, target = reduction_step(g, r, d)
    sc = sub.case
    if (sc.g, sc.r, sc.d) != target or sc.m != 2:
        raise ReductionMismatch(f"({g},{r},{d}) reduces to {target}, not ({sc.g},{sc.r},{sc.d})")
    if sub.certificate is None:
        raise ReductionMismatch("the reduced case carries no certificate")
    if sub.seq.shift != 0:
        raise ReductionMismatch("the reduced sequence must be unshifted")
    if max(Counter(sub.seq.entries).values()) > sc.r:
        raise ReductionMismatch("the reduced sequence repeats a value more than r' times")
    if not is_unimaginative(sub.w, 2) or (sub.w and sub.w[0] < 2):
        raise ReductionMismatch("the reduced twist vector must be unimaginative with c_2 >= 2")

    case = CaseParams(g, r, d, 2)
    seq = validate_sequence((0,) * t + tuple(x + 1 for x in sub.seq.entries), g, r, d)
    w = [3]
    for _ in range(3, t + 2):
        w.append(w[-1] + 2)
    w += [checked(c + 2 * t + 2) for c in sub.w]

    steps = [RuleStep("II", 1, ((0, j),)) for j in range(3)]
    steps += [RuleStep("IV", col, ((0, col + 1),)) for col in range(2, t + 1)]
    for s in sub.certificate.steps:
        steps.append(RuleStep(
            s.rule,
            s.column + t,
            tuple(tuple(x + 1 for x in row) for row in s.rows),
            j=None if s.j is None else s.j + 1,
            n=s.n,
            witness=None if s.witness is None else s.witness + t,
        ))
    selected = [(0, j) for j in range(t + 2)] + [tuple(x + 1 for x in row) for row in sub.certificate.selected]
    cert = Certificate(case, seq, tuple(w), tuple(sorted(selected)), tuple(steps))
    res = _finish(case, seq, w, cert, f"basic_reduction_lift(t={t}) <- {sub.provenance}",
                  (f"({g},{r},{d}) -> ({sc.g},{sc.r},{sc.d}) lift t={t}",) + sub.reductions)
    assert res.N == sub.N + t + 2
    return res


def _extend_sequence(seq: GrdSequence, g_new: int, d_new: int) -> GrdSequence:
    r, g, d = seq.r, seq.g, seq.d
    extra = g_new - g
    if g_new - d_new <= g - d:
        entries = seq.entries + (0,) * extra
    elif is_extendable(seq):
        # cycle through 0..r, always appending the smallest least-used value
        counts = Counter(seq.entries)
        entries = list(seq.entries)
        for _ in range(extra):
            low = min(counts[v] for v in range(r + 1))
            v = min(v for v in range(r + 1) if counts[v] == low)
            entries.append(v)
            counts[v] += 1
        entries = tuple(entries)
    else:
        raise NotExtendable(f"sequence cannot be extended to ({g_new},{r},{d_new})")
    try:
        return validate_sequence(entries, g_new, r, d_new)
    except ValueError as exc:
        raise NotExtendable(str(exc)) from None


def injective_extend(sub: ConstructionResult, g_new: int, d_new: int) -> ConstructionResult:
    sc = sub.case
    n_rows = comb(sc.r + sc.m, sc.m)
    if sub.N != n_rows or sub.certificate is None:
        raise NotInjective(f"certificate drops {sub.N} of {n_rows} rows")
    if g_new < sc.g or d_new < sc.d:
        raise NotExtendable("genus and degree may only grow")
    case = CaseParams(g_new, sc.r, d_new, sc.m)
    if case.rho < 0:
        raise NotExtendable(f"({g_new},{sc.r},{d_new}) has negative Brill-Noether number")
    if (g_new, d_new) == (sc.g, sc.d):
        return sub
    seq = _extend_sequence(sub.seq, g_new, d_new)
    m = sc.m
    w = list(sub.w)
    for _ in range(g_new - sc.g):
        w.append(checked(max(w[-1] + m if w else 0, m * d_new + 1)))
    cert = Certificate(case, seq, tuple(w), sub.certificate.selected, sub.certificate.steps)
    return _finish(case, seq, w, cert, f"injective_extend <- {sub.provenance}",
                   (f"({g_new},{sc.r},{d_new}) -> ({sc.g},{sc.r},{sc.d}) extend",) + sub.reductions)


# -- quadrics: the full driver --------------------------------------------------------------------


def _from_example(name: str) -> ConstructionResult:
    ex = catalog.EXAMPLES[name]
    seq = validate_sequence(ex.delta, ex.g, ex.r, ex.d)
    cert = catalog.example_certificate(ex)
    return _finish(ex.case, seq, ex.w, cert, f"example {name}")


@lru_cache(maxsize=None)
def m2_certify(g: int, r: int, d: int) -> ConstructionResult:
    """Certificate of rank min(C(r+2,2), 2d+1-g) for quadrics on a (g,r,d) chain."""
    try:
        case = CaseParams(g, r, d, 2)
    except ValueError as exc:
        raise OutOfScope(str(exc)) from None
    if case.rho < 0 or case.ell <= 0:
        raise OutOfScope(f"({g},{r},{d}) needs rho >= 0 and r+g-d > 0")
    full = comb(r + 2, 2)
    target = 2 * d + 1 - g
    if (g, r, d) == (4, 3, 6):
        res = _from_example("m2-r3-g4")
    elif (g, r, d) == (5, 3, 7):
        res = _from_example("m2-r3-g5")
    elif r == 3:
        if target < full:
            raise OutOfScope(f"({g},{r},{d}) is an unexpected surjective rank-3 case")
        res = injective_extend(m2_certify(5, 3, 7), g, d)
    elif target >= full:
        s = min(target - full, case.rho)
        if s > 0:
            res = injective_extend(m2_certify(g - s, r, d - s), g, d)
        elif case.rho == 0:
            gc, dc, _ = critical_parameters(r)
            if g < gc:
                raise OutOfScope(f"({g},{r},{d}) lies below the critical case ({gc},{r},{dc})")
            res = injective_extend(critical_m2(r), g, d)
        else:
            res = _lift(g, r, d)
    else:
        res = _lift(g, r, d)
    assert res.N == min(full, target), f"({g},{r},{d}): got N={res.N}"
    _check_m2_invariants(res)
    return res


def _lift(g: int, r: int, d: int) -> ConstructionResult:
    _, (g2, r2, d2) = reduction_step(g, r, d)
    return basic_reduction_lift(m2_certify(g2, r2, d2), r, g, d)


# -- large genus ----------------------------------------------------------------------------------


def big_g_sequence(r: int, m: int, g: int) -> tuple[tuple[int, ...], int]:
    """Sequence whose column i0 of vanishing orders is a, a+1, a+m+1, ..., a+(m+1)^(r-1); returns (entries, i0)."""
    top = (m + 1) ** (r - 1)
    each = top - r
    first = [0] * each
    for i in range(1, r):
        first += [i] * (top - (m + 1) ** (i - 1) - (r - i))
    i0 = len(first) + 1
    second = []
    for i in range(2, r + 1):
        second += [i] * ((m + 1) ** (i - 1) - i)
    entries = first + second
    while len(entries) < g:
        entries.append(len(entries) % (r + 1))
    return tuple(entries[:g]), i0


def big_g_inject(r: int, m: int, g: int, d: int) -> ConstructionResult:
    case = CaseParams(g, r, d, m)
    bound = (r + 1) * ((m + 1) ** (r - 1) - r)
    if g < bound or case.rho < 0:
        raise OutOfScope(f"need g >= {bound} and rho >= 0")
    entries, i0 = big_g_sequence(r, m, g)
    seq = validate_sequence(entries, g, r, d)
    vt = build_vanishing_table(seq)
    col = [vt.a[j][i0 - 1] for j in range(r + 1)]
    base = col[0]
    digits = [0] + [(m + 1) ** k for k in range(r)]
    if [x - base for x in col] != digits:
        raise DistinctnessFailure(f"column {i0} is {col}, not {base} plus {digits}")
    tt = build_tensor_table(vt, m)
    sums = [tt.a[k][i0 - 1] for k in range(len(tt.rows))]
    if len(set(sums)) != len(sums):
        raise DistinctnessFailure(f"column {i0} of the tensor table has repeated values")
    md = m * d
    w = tuple(0 if i <= i0 else md for i in range(2, g + 1))
    mask = erase(tt, w)
    if not all(mask.present[k][i0 - 1] for k in range(len(tt.rows))):
        raise DistinctnessFailure(f"some row is erased in column {i0}")
    order = sorted(range(len(tt.rows)), key=lambda k: sums[k])
    steps = tuple(RuleStep("II", i0, (tt.rows[k],)) for k in order)
    cert = Certificate(case, seq, w, tuple(tt.rows), steps)
    return _finish(case, seq, w, cert, f"big_g_inject(i0={i0})")


# -- cubics ---------------------------------------------------------------------------------------


def surj_parameters(g: int, r: int, d: int, case_id: str):
    """(entries, w, i0) of the two surjective cubic families, built from their anchor rows."""
    case = CaseParams(g, r, d, 3)
    rho, ell = case.rho, case.ell
    if rho < 0:
        raise HypothesisViolation("rho must be nonnegative")
    if case_id == "i":
        if ell != 1 or 2 * r - 3 < rho + 1:
            raise HypothesisViolation("case (i) needs r+g-d = 1 and 2r-3 >= rho+1")
        entries = (0,) * rho + tuple(range(r + 1))
        n = min(r - 1, rho + 2)
        last_formula = rho + 3 - n
        anchors = {rho + 2 - i: (0, n - i, n - i) for i in range(n - 1)}
        anchors.update({rho + i: (i - 2, i - 2, r) for i in range(3, r + 2)})
    elif case_id == "ii":
        if ell != 2 or r < 4 or 2 * r - 3 < rho + 2:
            raise HypothesisViolation("case (ii) needs r+g-d = 2, r >= 4 and 2r-3 >= rho+2")
        entries = (0,) * rho + tuple(v for v in range(r + 1) for _ in range(2))
        n = 2 if rho == 0 else min(r - 1, rho + 1)
        last_formula = rho + 4 - n
        anchors = {rho + 3 - i: (0, n - i, n - i) for i in range(n - 1)}
        anchors.update({rho + 2 * i: (i - 1, i - 1, r - 2) for i in range(2, r - 1)})
        anchors.update({rho + 2 * i + 1: (i - 1, i - 1, r) for i in range(2, r)})
        anchors[rho + 2 * r - 2] = (r - 3, r - 2, r)
        anchors[rho + 2 * r] = (r - 2, r - 1, r - 1)
        anchors[rho + 2 * r + 1] = (r - 3, r - 1, r)
        anchors[rho + 2 * r + 2] = (r - 2, r, r)
    else:
        raise ValueError(f"unknown case {case_id!r}; use 'i' or 'ii'")
    seq = validate_sequence(entries, g, r, d)
    tt = build_tensor_table(build_vanishing_table(seq), 3)
    w = []
    for i in range(2, g + 1):
        if i <= last_formula:
            w.append(-3 * (last_formula - i) - 1)
        elif i in anchors:
            w.append(tt.a[tt.row_number(anchors[i])][i - 1])
        else:
            raise HypothesisViolation(f"no anchor row for column {i}")
    extra = set(anchors) - set(range(last_formula + 1, g + 1))
    if extra:
        raise HypothesisViolation(f"anchor rows fall outside the table: columns {sorted(extra)}")
    return seq, tt, tuple(w), last_formula


def surj_m3(g: int, r: int, d: int, case_id: str) -> ConstructionResult:
    seq, tt, w, i0 = surj_parameters(g, r, d, case_id)
    if not is_unimaginative(w, 3):
        raise HypothesisViolation(f"twist vector {w} is not unimaginative")
    case = CaseParams(g, r, d, 3)
    if case.n_rows < case.target_dim:
        raise HypothesisViolation("not in the surjective range")
    mask = erase(tt, w)
    got = surjective_sweep(tt, mask, w, i0, variant="generic")
    if got is None:
        got = surjective_sweep(tt, mask, w, i0, variant="relaxed")
    _, cert = got
    return _finish(case, seq, w, cert, f"surj_m3(case {case_id}, i0={i0})")


def m3_catalog(r: int) -> ConstructionResult:
    ex = catalog.m3_example(r)
    res = _from_example(ex.name)
    return ConstructionResult(res.case, res.seq, res.w, res.N, res.certificate, f"m3_catalog(r={r})")
