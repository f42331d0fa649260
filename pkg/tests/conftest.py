import json
import re
from pathlib import Path

import pytest

from mrcert.catalog import EXAMPLES
from mrcert.tables import ErasureMask, build_tables

DATA = Path(__file__).parent / "data"

# golden key -> catalog example name
GOLDEN_KEYS = {
    "m2_r3_g4": "m2-r3-g4",
    "m2_r3_g5": "m2-r3-g5",
    "m2_critical": "m2-critical",
    "m3_r3": "m3-r3",
    "m3_r4": "m3-r4",
    "m3_r5": "m3-r5",
}

# Printed highlighting that disagrees with the erasure definition, as
# (golden key, row, column): the printed flag is the opposite of the computed one.
PRINTED_ERRATA = {
    ("m2_r3_g5", (2, 3), 4),
    ("m2_r3_g5", (3, 3), 4),
    ("m3_r4", (3, 3, 4), 16),
}


def load_golden() -> dict:
    return json.loads((DATA / "golden_tables.json").read_text())


def golden_tex(key: str, which: str) -> str:
    return (DATA / f"{key}_{which}.tex").read_text()


def squash(text: str) -> str:
    return re.sub(r"\s+", "", text)


def example_tables(name: str):
    ex = EXAMPLES[name]
    return ex, build_tables(ex.delta, ex.g, ex.r, ex.d, ex.m)


def printed_mask(key: str, ttable, w) -> ErasureMask:
    """Mask read off the golden highlighting, in the table's own row order."""
    flags = {tuple(t["row"]): [c[2] for c in t["cells"]] for t in load_golden()[key]["tensor"]}
    return ErasureMask(tuple(w), tuple(tuple(flags[row]) for row in ttable.rows))


@pytest.fixture(scope="session")
def golden():
    return load_golden()


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
