"""Torsion-divisor bookkeeping behind the two nondegeneracy rules.

A divisor supported on torsion translates of a base point is stored as a
formal sum over torsion orders n, the term [n] standing for the translate of
the n-torsion subgroup. Only characteristic 0 is modelled, so every torsion
subgroup is reduced and coefficients are plain integers. Distinct orders give
linearly independent terms, hence a formal sum vanishes exactly when the
divisor does.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import InvalidSectionData, PreconditionViolated
from .tables import Row, VanishingTable


@dataclass(frozen=True)
class TorsionDivisor:
    terms: tuple[tuple[int, int], ...]

    @classmethod
    def from_counts(cls, counts: Mapping[int, int]) -> "TorsionDivisor":
        for n in counts:
            if n <= 0:
                raise InvalidSectionData(f"torsion order {n} is not positive")
        return cls(tuple(sorted((n, c) for n, c in counts.items() if c)))

    def as_dict(self) -> dict[int, int]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Sum of the coefficients."""
        return sum(c for _, c in self.terms)

    def __neg__(self) -> "TorsionDivisor":
        return TorsionDivisor(tuple((n, -c) for n, c in self.terms))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " ".join(f"{c:+d}[{n}]" for n, c in self.terms)


@dataclass(frozen=True)
class SectionData:
    a: tuple[int, ...]
    a_prime: tuple[int, ...]
    c: int
    d: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(self.a))
        object.__setattr__(self, "a_prime", tuple(self.a_prime))
        if len(self.a) != len(self.a_prime) or not self.a:
            raise InvalidSectionData("the two lists of vanishing orders must be nonempty and of equal length")
        for x in self.a + self.a_prime:
            if x - self.c in (0, -1):
                raise InvalidSectionData(f"vanishing order {x} is c or c-1 for c={self.c}")
            if self.d is not None and not 0 <= x <= self.d - 1:
                raise InvalidSectionData(f"vanishing order {x} leaves no room at the other point")
        if sum(self.a) != sum(self.a_prime):
            raise InvalidSectionData("the two lists have different sums")


def r_offset(a: int, c: int) -> tuple[int, int]:
    """Multiples of Q-P locating the residual point relative to P and to Q."""
    if a - c in (0, -1):
        raise PreconditionViolated(f"a={a} must differ from c={c} and from c-1")
    return a + 1 - c, a - c


def div_f(data: SectionData) -> TorsionDivisor:
    counts: Counter[int] = Counter()
    c = data.c
    for x, y in zip(data.a, data.a_prime):
        counts[abs(x - c)] += 1
        counts[abs(y - c)] -= 1
        counts[abs(x + 1 - c)] -= 1
        counts[abs(y + 1 - c)] += 1
    return TorsionDivisor.from_counts(counts)


def is_nonconstant_m2(a1: int, a2: int, a1p: int, a2p: int, c: int) -> bool:
    SectionData((a1, a2), (a1p, a2p), c)
    return sorted((a1, a2)) != sorted((a1p, a2p)) and a1 + a2 != 2 * c - 1


def nondegen_hypotheses(columns: Sequence[tuple[int, int]], c: int) -> bool:
    values = [x for pair in columns for x in pair]
    if len(set(values)) != len(values):
        return False
    for x, y in columns:
        if x + y == 2 * c - 1:
            return False
        if (x < c) + (y < c) != 1:
            return False
    return True


def core_entries(row: Row, value: int, keep: int = 2) -> tuple[int, ...]:
    """The entries of ``row`` left after removing all but ``keep`` of them equal to ``value``."""
    rest = [j for j in row if j != value]
    if len(rest) != keep:
        raise PreconditionViolated(f"row {row} does not have exactly {keep} entries other than {value}")
    return tuple(rest)


def section_data_for_pair(vtable: VanishingTable, rows: Iterable[Row], column: int) -> SectionData:
    """Degree-two core of two tensor rows at a column of the vanishing table.

    The pivot is the vanishing order of the row named by the sequence entry at
    that column; the copies of that entry shared by both rows are discarded.
    """
    rows = list(rows)
    if len(rows) != 2:
        raise PreconditionViolated("need exactly two rows")
    i = column - 1
    v = vtable.seq.entries[i]
    c = vtable.a[v][i]
    a1 = tuple(vtable.a[j][i] for j in core_entries(rows[0], v))
    a2 = tuple(vtable.a[j][i] for j in core_entries(rows[1], v))
    return SectionData(a1, a2, c)


def columns_for_rows(vtable: VanishingTable, rows: Iterable[Row], column: int) -> tuple[list[tuple[int, int]], int]:
    """(vanishing-order pairs of each degree-two row, pivot) at a column."""
    i = column - 1
    v = vtable.seq.entries[i]
    pairs = []
    for row in rows:
        j1, j2 = core_entries(row, v)
        pairs.append((vtable.a[j1][i], vtable.a[j2][i]))
    return pairs, vtable.a[v][i]
