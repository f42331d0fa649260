"""Plain-text, CSV and LaTeX renderings of the tables, plus a CSV reader."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

from .tables import ErasureMask, Row, TensorTable, VanishingTable, graded_order

ERASED = "·"
SHADE = r"\cellcolor[gray]{.8}"


def row_label(row: Sequence[int]) -> str:
    return "(" + ",".join(str(j) for j in row) + ")"


def parse_row_label(text: str) -> Row:
    text = text.strip()
    if not (text.startswith("(") and text.endswith(")")):
        raise ValueError(f"bad row label {text!r}")
    return tuple(int(x) for x in text[1:-1].split(","))


def _ordered(ttable: TensorTable, order) -> list[int]:
    if order is None or order == "lex":
        return list(range(len(ttable.rows)))
    if order == "graded":
        order = graded_order(ttable.rows)
    rows = [tuple(r) for r in order]
    if sorted(rows) != sorted(ttable.rows):
        raise ValueError("row order is not a permutation of the table rows")
    return [ttable.row_number(r) for r in rows]


def _cell(ttable: TensorTable, mask: ErasureMask | None, k: int, i: int, erased_marker: bool) -> str:
    if erased_marker and mask is not None and not mask.present[k][i]:
        return ERASED
    return f"{ttable.a[k][i]}:{ttable.b[k][i]}"


def render_text(ttable: TensorTable, mask: ErasureMask | None = None, order=None) -> str:
    """Aligned grid; erased cells are shown as a dot when a mask is given."""
    header = ["row"] + [str(i + 1) for i in range(ttable.g)]
    body = []
    for k in _ordered(ttable, order):
        body.append([row_label(ttable.rows[k])] + [_cell(ttable, mask, k, i, True) for i in range(ttable.g)])
    widths = [max(len(line[c]) for line in [header] + body) for c in range(len(header))]
    out = []
    for line in [header] + body:
        out.append("  ".join(cell.rjust(w) for cell, w in zip(line, widths)).rstrip())
    return "\n".join(out) + "\n"


def render_vanishing_text(vtable: VanishingTable) -> str:
    header = ["j"] + [str(i + 1) for i in range(vtable.g)]
    body = [[str(j)] + [f"{vtable.a[j][i]}:{vtable.b[j][i]}" for i in range(vtable.g)] for j in range(vtable.r + 1)]
    widths = [max(len(line[c]) for line in [header] + body) for c in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(line, widths)) for line in [header] + body) + "\n"


def render_csv(ttable: TensorTable, mask: ErasureMask | None = None, order=None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["row"] + [str(i + 1) for i in range(ttable.g)])
    for k in _ordered(ttable, order):
        writer.writerow([row_label(ttable.rows[k])] + [_cell(ttable, mask, k, i, True) for i in range(ttable.g)])
    return buf.getvalue()


@dataclass(frozen=True)
class ParsedGrid:
    """Result of reading a CSV table back: ``cells[k][i]`` is (a, b) or None when erased."""

    rows: tuple[Row, ...]
    cells: tuple[tuple[tuple[int, int] | None, ...], ...]

    @property
    def g(self) -> int:
        return len(self.cells[0]) if self.cells else 0

    def present(self) -> tuple[tuple[bool, ...], ...]:
        return tuple(tuple(c is not None for c in line) for line in self.cells)


def parse_csv(text: str) -> ParsedGrid:
    reader = csv.reader(io.StringIO(text))
    lines = [line for line in reader if line]
    if not lines or lines[0][0] != "row":
        raise ValueError("missing header line")
    g = len(lines[0]) - 1
    if lines[0][1:] != [str(i + 1) for i in range(g)]:
        raise ValueError("header must number the columns 1..g")
    rows, cells = [], []
    for line in lines[1:]:
        if len(line) != g + 1:
            raise ValueError(f"expected {g + 1} fields, got {len(line)}")
        rows.append(parse_row_label(line[0]))
        parsed = []
        for field in line[1:]:
            field = field.strip()
            if field == ERASED:
                parsed.append(None)
            else:
                a, b = field.split(":")
                parsed.append((int(a), int(b)))
        cells.append(tuple(parsed))
    return ParsedGrid(tuple(rows), tuple(cells))


def render_csv_parsed(grid: ParsedGrid) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["row"] + [str(i + 1) for i in range(grid.g)])
    for row, line in zip(grid.rows, grid.cells):
        writer.writerow([row_label(row)] + [ERASED if c is None else f"{c[0]}:{c[1]}" for c in line])
    return buf.getvalue()


def _dollar(x: int) -> str:
    return f"${x}$"


def render_vanishing_latex(vtable: VanishingTable) -> str:
    spec = "|".join(["lr"] * vtable.g)
    lines = [r"\begin{tabular}{" + spec + "}"]
    for j in range(vtable.r + 1):
        cells = []
        for i in range(vtable.g):
            cells += [_dollar(vtable.a[j][i]), _dollar(vtable.b[j][i])]
        lines.append(" & ".join(cells) + r" \\")
    lines.append(r"\end{tabular}")
    return "\n".join(lines) + "\n"


def twist_row(w: Sequence[int], md: int) -> list[str]:
    """Header cells: c_i above each a-column and md - c_{i+1} above each b-column."""
    g = len(w) + 1
    cells = [""]
    for i in range(1, g + 1):
        cells.append("" if i == 1 else _dollar(w[i - 2]))
        cells.append("" if i == g else _dollar(md - w[i - 1]))
    return cells


def render_latex(ttable: TensorTable, mask: ErasureMask | None = None, order=None) -> str:
    """Tabular layout with shaded present cells and the twist row above and below."""
    g = ttable.g
    md = ttable.m * ttable.d
    lines = [r"\begin{tabular}{l" + "|".join(["lr"] * g) + "}"]
    if mask is not None:
        header = " & ".join(twist_row(mask.w, md)) + r" \\"
        lines += [header, r"\hline"]
    for k in _ordered(ttable, order):
        cells = [_dollar_row(ttable.rows[k])]
        for i in range(g):
            shade = SHADE + " " if mask is not None and mask.present[k][i] else ""
            cells += [shade + _dollar(ttable.a[k][i]), shade + _dollar(ttable.b[k][i])]
        lines.append(" & ".join(cells) + r" \\")
    if mask is not None:
        lines += [r"\hline", header]
    lines.append(r"\end{tabular}")
    return "\n".join(lines) + "\n"


def _dollar_row(row: Sequence[int]) -> str:
    return "$" + row_label(row) + "$"
