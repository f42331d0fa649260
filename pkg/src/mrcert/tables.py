"""Sequences, vanishing tables, tensor tables and erasure masks.

Columns are numbered from 1 in every public signature (a certificate step
"in column 3" means ``i == 3``); the underlying tuples are 0-based.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from math import comb
from typing import Iterable, Sequence

from .errors import OccurrenceDeficit, PrefixViolation, PreconditionViolated, ShiftOutOfRange

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

Row = tuple[int, ...]


def checked(x: int) -> int:
    """Return ``x`` unchanged, refusing values outside the signed 64-bit range."""
    if x < INT64_MIN or x > INT64_MAX:
        raise OverflowError(f"integer {x} does not fit in 64 bits")
    return x


@dataclass(frozen=True)
class CaseParams:
    g: int
    r: int
    d: int
    m: int

    def __post_init__(self):
        if self.g < 1 or self.d < 1:
            raise ValueError("g and d must be positive")
        if self.r < 3:
            raise ValueError("r must be at least 3")
        if self.m < 2:
            raise ValueError("m must be at least 2")
        for x in (self.g, self.r, self.d, self.m):
            checked(x)

    @property
    def ell(self) -> int:
        """Number of forced repetitions, r + g - d."""
        return self.r + self.g - self.d

    @property
    def rho(self) -> int:
        return checked(self.g - (self.r + 1) * self.ell)

    @property
    def n_rows(self) -> int:
        return checked(comb(self.r + self.m, self.m))

    @property
    def target_dim(self) -> int:
        """md + 1 - g, the dimension of the space of degree-md sections."""
        return checked(self.m * self.d + 1 - self.g)

    @property
    def n_target(self) -> int:
        return min(self.n_rows, self.target_dim)

    @property
    def injective(self) -> bool:
        return self.n_rows <= self.target_dim

    @property
    def surjective(self) -> bool:
        return self.n_rows >= self.target_dim


@dataclass(frozen=True)
class GrdSequence:
    entries: tuple[int, ...]
    r: int
    d: int
    shift: int = 0

    @property
    def g(self) -> int:
        return len(self.entries)

    def count(self, value: int) -> int:
        return self.entries.count(value)

    def __getitem__(self, i: int) -> int:
        """Entry at 1-based position ``i``."""
        return self.entries[i - 1]

    def __len__(self) -> int:
        return len(self.entries)


def _check_sequence(entries: Sequence[int], g: int, r: int, d: int, shift: int) -> None:
    if len(entries) != g:
        raise ValueError(f"expected {g} entries, got {len(entries)}")
    if shift < 0:
        raise ValueError("shift must be nonnegative")
    for x in entries:
        if not 0 <= x <= r:
            raise ValueError(f"entry {x} outside [0, {r}]")
    required = shift + r + g - d
    counts = Counter(entries)
    for v in range(r + 1):
        if counts[v] < required:
            raise OccurrenceDeficit(v, counts[v], required)
    seen = [0] * (r + 1)
    for pos, x in enumerate(entries, start=1):
        seen[x] += 1
        for v in range(x):
            if seen[v] < seen[x]:
                raise PrefixViolation(pos, v)


def validate_sequence(entries: Iterable[int], g: int, r: int, d: int, shift: int = 0) -> GrdSequence:
    entries = tuple(int(x) for x in entries)
    _check_sequence(entries, g, r, d, shift)
    return GrdSequence(entries, r, d, shift)


def is_extendable(seq: GrdSequence) -> bool:
    return seq.count(0) <= seq.count(seq.r) + 1


@dataclass(frozen=True)
class VanishingTable:
    """The (r+1) x g table of vanishing orders; ``a[j][i-1]`` is a^i_j."""

    seq: GrdSequence
    d: int
    a: tuple[tuple[int, ...], ...]
    b: tuple[tuple[int, ...], ...]

    @property
    def g(self) -> int:
        return self.seq.g

    @property
    def r(self) -> int:
        return self.seq.r

    def column(self, i: int) -> list[tuple[int, int]]:
        return [(self.a[j][i - 1], self.b[j][i - 1]) for j in range(self.r + 1)]


def build_vanishing_table(seq: GrdSequence, d: int | None = None) -> VanishingTable:
    d = seq.d if d is None else d
    r, g = seq.r, seq.g
    a_rows, b_rows = [], []
    for j in range(r + 1):
        a_row, b_row = [], []
        a = checked(seq.shift + j)
        for i in range(g):
            b = d - a if seq.entries[i] == j else d - 1 - a
            a_row.append(a)
            b_row.append(checked(b))
            a = d - b
        a_rows.append(tuple(a_row))
        b_rows.append(tuple(b_row))
    table = VanishingTable(seq, d, tuple(a_rows), tuple(b_rows))
    for i in range(g):
        col = [table.a[j][i] for j in range(r + 1)]
        assert all(x < y for x, y in zip(col, col[1:])), "column not strictly increasing"
    return table


def row_indices(r: int, m: int) -> list[Row]:
    """All size-m multisets of [0, r] as sorted tuples, in lexicographic order."""
    return list(combinations_with_replacement(range(r + 1), m))


def graded_order(rows: Sequence[Row]) -> list[Row]:
    """Rows sorted by total then lexicographically, the order tables are usually printed in."""
    return sorted(rows, key=lambda t: (sum(t), t))


@dataclass(frozen=True)
class TensorTable:
    """Rows indexed by multisets J; ``a[k][i-1]`` is a^i_J for ``J = rows[k]``."""

    vtable: VanishingTable
    m: int
    rows: tuple[Row, ...]
    a: tuple[tuple[int, ...], ...]
    b: tuple[tuple[int, ...], ...]
    index: dict = field(compare=False, repr=False, hash=False)

    @property
    def g(self) -> int:
        return self.vtable.g

    @property
    def r(self) -> int:
        return self.vtable.r

    @property
    def d(self) -> int:
        return self.vtable.d

    @property
    def seq(self) -> GrdSequence:
        return self.vtable.seq

    def row_number(self, row: Sequence[int]) -> int:
        return self.index[tuple(sorted(row))]

    def entry(self, row: Sequence[int], i: int) -> tuple[int, int]:
        k = self.row_number(row)
        return self.a[k][i - 1], self.b[k][i - 1]


def build_tensor_table(vtable: VanishingTable, m: int) -> TensorTable:
    if m < 2:
        raise ValueError("m must be at least 2")
    rows = row_indices(vtable.r, m)
    g = vtable.g
    a_rows, b_rows = [], []
    for row in rows:
        a_rows.append(tuple(checked(sum(vtable.a[j][i] for j in row)) for i in range(g)))
        b_rows.append(tuple(checked(sum(vtable.b[j][i] for j in row)) for i in range(g)))
    index = {row: k for k, row in enumerate(rows)}
    return TensorTable(vtable, m, tuple(rows), tuple(a_rows), tuple(b_rows), index)


def build_tables(entries: Iterable[int], g: int, r: int, d: int, m: int, shift: int = 0) -> TensorTable:
    seq = validate_sequence(entries, g, r, d, shift)
    return build_tensor_table(build_vanishing_table(seq), m)


def _diffs(w_prime: Sequence[int], w: Sequence[int]) -> list[int]:
    if len(w_prime) != len(w):
        raise ValueError("twist vectors have different lengths")
    return [checked(x - y) for x, y in zip(w_prime, w)]


def epsilon(w_prime: Sequence[int], w: Sequence[int]) -> tuple[int, ...]:
    diffs = _diffs(w_prime, w)
    g = len(diffs) + 1
    # suffix[i-1] = sum over j = i+1..g of (c'_j - c_j); diffs[k] is position k+2
    suffix = [0] * g
    for i in range(g - 1, 0, -1):
        suffix[i - 1] = suffix[i] + diffs[i - 1]
    low = min(suffix)
    return tuple(int(s == low) for s in suffix)


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


def epsilon_fast(w_prime: Sequence[int], w: Sequence[int]) -> tuple[int, ...]:
    """Erasure pattern read off from local comparisons; needs weakly decreasing signs."""
    diffs = _diffs(w_prime, w)
    signs = [_sign(x) for x in diffs]
    if any(s < t for s, t in zip(signs, signs[1:])):
        raise PreconditionViolated("signs of c'_i - c_i are not weakly decreasing")
    g = len(diffs) + 1
    bits = []
    for i in range(1, g + 1):
        left = i == 1 or diffs[i - 2] >= 0
        right = i == g or diffs[i - 1] <= 0
        bits.append(int(left and right))
    return tuple(bits)


def is_steady_pair(w_prime: Sequence[int], w: Sequence[int]) -> bool:
    seen_negative = False
    for x in _diffs(w_prime, w):
        if x < 0:
            seen_negative = True
        elif x > 0 and seen_negative:
            return False
    return True


def _row_twist(ttable: TensorTable, k: int) -> tuple[int, ...]:
    return ttable.a[k][1:]


def _check_twist_length(ttable: TensorTable, w: Sequence[int]) -> None:
    if len(w) != ttable.g - 1:
        raise ValueError(f"twist vector must have {ttable.g - 1} entries, got {len(w)}")


def is_steady_table(ttable: TensorTable, w: Sequence[int]) -> bool:
    _check_twist_length(ttable, w)
    return all(is_steady_pair(_row_twist(ttable, k), w) for k in range(len(ttable.rows)))


def is_unimaginative(w: Sequence[int], m: int) -> bool:
    return all(y - x >= m for x, y in zip(w, w[1:]))


@dataclass(frozen=True)
class ErasureMask:
    """``present[k][i-1]`` is True when row k is not erased in column i."""

    w: tuple[int, ...]
    present: tuple[tuple[bool, ...], ...]

    def is_present(self, k: int, i: int) -> bool:
        return self.present[k][i - 1]

    def column(self, i: int) -> list[int]:
        """Row numbers present in column i."""
        return [k for k, row in enumerate(self.present) if row[i - 1]]

    def span(self, k: int) -> list[int]:
        """Columns (1-based) in which row k is present."""
        return [i + 1 for i, p in enumerate(self.present[k]) if p]


def erase(ttable: TensorTable, w: Sequence[int]) -> ErasureMask:
    _check_twist_length(ttable, w)
    w = tuple(int(x) for x in w)
    present = tuple(
        tuple(bool(x) for x in epsilon(_row_twist(ttable, k), w)) for k in range(len(ttable.rows))
    )
    return ErasureMask(w, present)


def multidegree(w: Sequence[int], d_prime: int) -> list[int]:
    if not w:
        return [d_prime]
    out = [w[0]]
    out.extend(y - x for x, y in zip(w, w[1:]))
    out.append(d_prime - w[-1])
    return [checked(x) for x in out]


def shift_pair(
    seq: GrdSequence, w: Sequence[int], a: int, d_prime_new: int, m: int
) -> tuple[GrdSequence, tuple[int, ...]]:
    """View ``seq`` as an a-shifted sequence of degree ``d_prime_new`` and move ``w`` along."""
    if not 0 <= a <= d_prime_new - seq.d:
        raise ShiftOutOfRange(f"shift {a} outside [0, {d_prime_new - seq.d}]")
    new_seq = validate_sequence(seq.entries, seq.g, seq.r, d_prime_new, seq.shift + a)
    return new_seq, tuple(checked(c + m * a) for c in w)


def m2_rank_gap(g: int, r: int, d: int) -> int:
    """C(r+2, 2) - (2d + 1 - g), cross-checked against the expression through rho."""
    gap = comb(r + 2, 2) - (2 * d + 1 - g)
    ell = g + r - d
    rho = g - (r + 1) * ell
    assert gap == comb(r, 2) - rho - ell * (r - 1)
    return checked(gap)
