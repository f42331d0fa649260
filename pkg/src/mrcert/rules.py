"""Row-dropping rules, replayable steps and the certificate verifier.

A row "appears in column i" when it is still remaining and its entry in
column i is not erased. Remaining sets are stored as integer bitmasks over
the row numbers of the tensor table.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import MNotTwo, RowAlreadyDropped, RuleArityMismatch, StepRejected
from .tables import CaseParams, ErasureMask, GrdSequence, Row, TensorTable, is_steady_table

RULES = ("II", "III", "IV", "V", "VI", "VII")


@dataclass(frozen=True)
class RuleStep:
    rule: str
    column: int
    rows: tuple[Row, ...]
    j: int | None = None
    n: int | None = None
    witness: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(tuple(int(x) for x in sorted(row)) for row in self.rows))

    def params(self) -> dict:
        if self.rule == "V":
            return {"j": self.j, "n": self.n}
        if self.rule == "VI":
            return {"witness": self.witness}
        if self.rule == "VII":
            return {"n": self.n}
        return {}

    def describe(self) -> str:
        rows = ", ".join("(" + ",".join(map(str, r)) + ")" for r in self.rows)
        extra = "".join(f" {k}={v}" for k, v in self.params().items())
        return f"Rule {self.rule} in column {self.column}{extra}: {rows}"


@dataclass(frozen=True)
class Certificate:
    case: CaseParams
    seq: GrdSequence
    w: tuple[int, ...]
    selected: tuple[Row, ...]
    steps: tuple[RuleStep, ...]

    def __post_init__(self):
        object.__setattr__(self, "w", tuple(int(x) for x in self.w))
        object.__setattr__(self, "selected", tuple(sorted(tuple(sorted(r)) for r in self.selected)))
        object.__setattr__(self, "steps", tuple(self.steps))

    @property
    def N(self) -> int:
        return len(self.selected)


def _bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


class RuleContext:
    """Precomputed per-column data for one erased table."""

    def __init__(self, ttable: TensorTable, mask: ErasureMask, strict_vi: bool = True):
        if len(mask.present) != len(ttable.rows) or len(mask.w) != ttable.g - 1:
            raise ValueError("mask does not match table dimensions")
        self.ttable = ttable
        self.mask = mask
        self.strict_vi = strict_vi
        self.g = ttable.g
        self.r = ttable.r
        self.m = ttable.m
        self.rows = ttable.rows
        self.delta = ttable.seq.entries
        self.a = ttable.a
        self.b = ttable.b
        self.all_rows = (1 << len(self.rows)) - 1
        self.present = []
        for i in range(self.g):
            bits = 0
            for k in range(len(self.rows)):
                if mask.present[k][i]:
                    bits |= 1 << k
            self.present.append(bits)
        self.counts = [Counter(row) for row in self.rows]
        self.diag = [ttable.index[(v,) * self.m] for v in range(self.r + 1)]

    def mask_of(self, rows: Iterable[Row]) -> int:
        bits = 0
        for row in rows:
            bits |= 1 << self.ttable.index[tuple(sorted(row))]
        return bits

    def rows_of(self, bits: int) -> tuple[Row, ...]:
        return tuple(self.rows[k] for k in _bits(bits))

    # -- condition checks; each returns None when satisfied, else a diagnostic

    def _extremum(self, vals, k: int, present: int, i: int, label: str) -> str | None:
        if not present >> k & 1:
            return f"row {self.rows[k]} does not appear in column {i + 1}"
        for o in _bits(present & ~(1 << k)):
            if vals[o][i] <= vals[k][i]:
                return f"{label} of {self.rows[k]} is not strictly minimal in column {i + 1} (tie or smaller at {self.rows[o]})"
        return None

    def check_ii(self, remaining: int, i: int, ks: list[int]) -> str | None:
        return self._extremum(self.a, ks[0], remaining & self.present[i], i, "a")

    def check_iii(self, remaining: int, i: int, ks: list[int]) -> str | None:
        return self._extremum(self.b, ks[0], remaining & self.present[i], i, "b")

    def check_iv(self, remaining: int, i: int, ks: list[int]) -> str | None:
        present = remaining & self.present[i]
        for k in ks:
            if not present >> k & 1:
                return f"row {self.rows[k]} does not appear in column {i + 1}"
        if present.bit_count() > 2:
            return f"{present.bit_count()} rows appear in column {i + 1}, more than two"
        return None

    def check_v(self, remaining: int, i: int, ks: list[int], j: int, n: int) -> str | None:
        if not 0 <= j <= self.r:
            return f"j={j} outside [0, {self.r}]"
        if j == self.delta[i]:
            return f"j={j} equals the sequence entry of column {i + 1}"
        if n < 0:
            return "n must be nonnegative"
        k = ks[0]
        present = remaining & self.present[i]
        if not present >> k & 1:
            return f"row {self.rows[k]} does not appear in column {i + 1}"
        exact = []
        for o in _bits(present):
            c = self.counts[o][j]
            if c < n:
                return f"row {self.rows[o]} has fewer than {n} copies of {j}"
            if c == n:
                exact.append(o)
        if exact != [k]:
            return f"row with exactly {n} copies of {j} is not unique or is not {self.rows[k]}"
        return None

    def check_vi(self, remaining: int, i: int, ks: list[int], witness: int | None) -> str | None:
        if i + 1 >= self.g:
            return "Rule VI needs a following column"
        k1, k2 = ks
        p0 = remaining & self.present[i]
        p1 = remaining & self.present[i + 1]
        pair = (1 << k1) | (1 << k2)
        if self.strict_vi:
            for k in ks:
                if not (p0 >> k & 1 and p1 >> k & 1):
                    return f"row {self.rows[k]} does not appear in both columns {i + 1} and {i + 2}"
        a, b = self.a, self.b
        if a[k1][i] != a[k2][i]:
            return f"a-values differ in column {i + 1}"
        for o in _bits(p0 & ~pair):
            if a[o][i] <= a[k1][i]:
                return f"a-value of the pair is not strictly below row {self.rows[o]} in column {i + 1}"
        if b[k1][i + 1] != b[k2][i + 1]:
            return f"b-values differ in column {i + 2}"
        for o in _bits(p1 & ~pair):
            if b[o][i + 1] <= b[k1][i + 1]:
                return f"b-value of the pair is not strictly below row {self.rows[o]} in column {i + 2}"
        candidates = (i + 1, i + 2) if witness is None else (witness,)
        last = "no witness column"
        for wc in candidates:
            if wc not in (i + 1, i + 2):
                return f"witness {wc} must be column {i + 1} or {i + 2}"
            last = self._vi_witness(wc - 1, k1, k2)
            if last is None:
                return None
        return last

    def _vi_witness(self, ip: int, k1: int, k2: int) -> str | None:
        v = self.delta[ip]
        for k in (k1, k2):
            if self.counts[k][v] != self.m - 2:
                return f"row {self.rows[k]} does not have exactly {self.m - 2} entries equal to {v}"
        if self.a[k1][ip] == self.a[self.diag[v]][ip] - 1:
            return f"a-value in column {ip + 1} is one less than that of the diagonal row"
        return None

    def witness_for_vi(self, i: int, k1: int, k2: int) -> int | None:
        for wc in (i + 1, i + 2):
            if self._vi_witness(wc - 1, k1, k2) is None:
                return wc
        return None

    def check_vii(self, remaining: int, i: int, ks: list[int], n: int | None) -> str | None:
        if self.m != 2:
            raise MNotTwo("Rule VII requires m = 2")
        v = self.delta[i]
        dk = self.diag[v]
        js = [k for k in ks if k != dk]
        if n is None or n != len(js):
            raise RuleArityMismatch(f"Rule VII parameter n={n} does not match {len(js)} listed rows")
        if n < 2:
            return "Rule VII needs n >= 2"
        if i + n > self.g:
            return f"columns {i + 1}..{i + n} run past the table"
        for ip in range(i, i + n):
            if self.delta[ip] != v:
                return f"sequence entry of column {ip + 1} differs from that of column {i + 1}"
        for k in js:
            j1, j2 = self.rows[k]
            if not j1 < v < j2:
                return f"row {self.rows[k]} does not straddle {v}"
            if self.a[k][i] != self.a[js[0]][i]:
                return f"a-values in column {i + 1} are not all equal"
        allowed = self.mask_of(self.rows[k] for k in js) | (1 << dk)
        for ip in range(i, i + n):
            present = remaining & self.present[ip]
            for k in js:
                if not present >> k & 1:
                    return f"row {self.rows[k]} does not appear in column {ip + 1}"
            extra = present & ~allowed
            if extra:
                return f"row {self.rows[next(_bits(extra))]} also appears in column {ip + 1}"
        return None

    def check(self, remaining: int, step: RuleStep) -> str | None:
        """Diagnostic for the first failed condition, or None when the step is valid."""
        if step.rule not in RULES:
            raise RuleArityMismatch(f"unknown rule {step.rule!r}")
        ks = []
        for row in step.rows:
            k = self.ttable.index.get(row)
            if k is None or not remaining >> k & 1:
                raise RowAlreadyDropped(row)
            ks.append(k)
        if len(set(ks)) != len(ks):
            raise RuleArityMismatch("dropped rows are not distinct")
        arity = {"II": (1, 1), "III": (1, 1), "IV": (1, 2), "V": (1, 1), "VI": (2, 2), "VII": (2, None)}
        lo, hi = arity[step.rule]
        if len(ks) < lo or (hi is not None and len(ks) > hi):
            raise RuleArityMismatch(f"Rule {step.rule} cannot drop {len(ks)} rows")
        if step.rule == "V" and (step.j is None or step.n is None):
            raise RuleArityMismatch("Rule V needs parameters j and n")
        if step.rule == "VII" and self.m != 2:
            raise MNotTwo("Rule VII requires m = 2")
        if not 1 <= step.column <= self.g:
            return f"column {step.column} outside 1..{self.g}"
        i = step.column - 1
        if step.rule == "II":
            return self.check_ii(remaining, i, ks)
        if step.rule == "III":
            return self.check_iii(remaining, i, ks)
        if step.rule == "IV":
            return self.check_iv(remaining, i, ks)
        if step.rule == "V":
            return self.check_v(remaining, i, ks, step.j, step.n)
        if step.rule == "VI":
            return self.check_vi(remaining, i, ks, step.witness)
        return self.check_vii(remaining, i, ks, step.n)

    # -- finders used by the search: the applicable step of a rule in a column, if any

    def _unique_min(self, vals, present: int, i: int) -> int | None:
        best, best_k, tie = None, None, False
        for k in _bits(present):
            x = vals[k][i]
            if best is None or x < best:
                best, best_k, tie = x, k, False
            elif x == best:
                tie = True
        return None if tie else best_k

    def find(self, rule: str, remaining: int, i: int) -> RuleStep | None:
        present = remaining & self.present[i]
        if not present:
            return None
        col = i + 1
        if rule == "II" or rule == "III":
            k = self._unique_min(self.a if rule == "II" else self.b, present, i)
            return None if k is None else RuleStep(rule, col, (self.rows[k],))
        if rule == "IV":
            if present.bit_count() <= 2:
                return RuleStep("IV", col, self.rows_of(present))
            return None
        if rule == "V":
            ks = list(_bits(present))
            for j in range(self.r + 1):
                if j == self.delta[i]:
                    continue
                cs = [self.counts[k][j] for k in ks]
                n = min(cs)
                if cs.count(n) == 1:
                    return RuleStep("V", col, (self.rows[ks[cs.index(n)]],), j=j, n=n)
            return None
        if rule == "VI":
            if i + 1 >= self.g:
                return None
            low = min(self.a[k][i] for k in _bits(present))
            ks = [k for k in _bits(present) if self.a[k][i] == low]
            if len(ks) != 2:
                return None
            if self.check_vi(remaining, i, ks, None) is not None:
                return None
            wc = self.witness_for_vi(i, *ks)
            return RuleStep("VI", col, self.rows_of((1 << ks[0]) | (1 << ks[1])), witness=wc)
        if rule == "VII":
            if self.m != 2:
                return None
            dk = self.diag[self.delta[i]]
            js = [k for k in _bits(present) if k != dk]
            if len(js) < 2:
                return None
            ks = js + ([dk] if remaining >> dk & 1 else [])
            if self.check_vii(remaining, i, ks, len(js)) is not None:
                return None
            bits = 0
            for k in ks:
                bits |= 1 << k
            return RuleStep("VII", col, self.rows_of(bits), n=len(js))
        raise ValueError(f"unknown rule {rule!r}")


@dataclass(frozen=True)
class VerifierState:
    context: RuleContext = field(repr=False)
    remaining: int

    @classmethod
    def start(cls, ttable: TensorTable, mask: ErasureMask, selected: Iterable[Row] | None = None,
              strict_vi: bool = True) -> "VerifierState":
        ctx = RuleContext(ttable, mask, strict_vi)
        bits = ctx.all_rows if selected is None else ctx.mask_of(selected)
        return cls(ctx, bits)

    @property
    def remaining_rows(self) -> frozenset:
        return frozenset(self.context.rows_of(self.remaining))

    def __len__(self) -> int:
        return self.remaining.bit_count()


def check_step(state: VerifierState, step: RuleStep) -> tuple[bool, str]:
    diag = state.context.check(state.remaining, step)
    return (diag is None, "ok" if diag is None else diag)


def apply_step(state: VerifierState, step: RuleStep) -> VerifierState:
    ok, diag = check_step(state, step)
    if not ok:
        raise StepRejected(diag)
    return VerifierState(state.context, state.remaining & ~state.context.mask_of(step.rows))


@dataclass(frozen=True)
class StepOutcome:
    index: int
    step: RuleStep
    ok: bool
    message: str


@dataclass(frozen=True)
class VerificationReport:
    valid: bool
    N: int
    steady: bool
    trace: tuple[StepOutcome, ...]
    remaining: tuple[Row, ...]
    message: str


def verify_certificate(ttable: TensorTable, mask: ErasureMask, cert: Certificate,
                       strict_vi: bool = True) -> VerificationReport:
    """Replay every step; failures are reported in the result, never raised."""
    steady = is_steady_table(ttable, cert.w) if len(cert.w) == ttable.g - 1 else False

    def fail(message, trace=(), remaining=()):
        return VerificationReport(False, cert.N, steady, tuple(trace), tuple(remaining), message)

    if (cert.case.g, cert.case.r, cert.case.d, cert.case.m) != (ttable.g, ttable.r, ttable.d, ttable.m):
        return fail("certificate case does not match the table")
    if cert.seq.entries != ttable.seq.entries or cert.seq.shift != ttable.seq.shift:
        return fail("certificate sequence does not match the table")
    if tuple(cert.w) != tuple(mask.w):
        return fail("certificate twist vector does not match the erasure mask")
    if len(set(cert.selected)) != len(cert.selected):
        return fail("selected rows are not distinct")
    unknown = [row for row in cert.selected if row not in ttable.index]
    if unknown:
        return fail(f"selected row {unknown[0]} is not a row of the table")
    state = VerifierState.start(ttable, mask, cert.selected, strict_vi)
    trace = []
    for idx, step in enumerate(cert.steps):
        try:
            ok, diag = check_step(state, step)
        except (RowAlreadyDropped, RuleArityMismatch, MNotTwo) as exc:
            ok, diag = False, str(exc)
        trace.append(StepOutcome(idx, step, ok, diag))
        if not ok:
            return fail(f"step {idx + 1} ({step.describe()}) rejected: {diag}", trace,
                        sorted(state.remaining_rows))
        state = VerifierState(state.context, state.remaining & ~state.context.mask_of(step.rows))
    if state.remaining:
        left = sorted(state.remaining_rows)
        return fail(f"rows remain: {', '.join(map(str, left))}", trace, left)
    return VerificationReport(True, cert.N, steady, tuple(trace), (), "valid")


def tables_for(cert: Certificate):
    """Rebuild the tensor table and erasure mask a certificate refers to."""
    from .tables import build_tensor_table, build_vanishing_table, erase

    ttable = build_tensor_table(build_vanishing_table(cert.seq, cert.case.d), cert.case.m)
    return ttable, erase(ttable, cert.w)


def replay(cert: Certificate, strict_vi: bool = True) -> VerificationReport:
    ttable, mask = tables_for(cert)
    return verify_certificate(ttable, mask, cert, strict_vi)
