from itertools import product
from math import comb

import pytest

from conftest import GOLDEN_KEYS, PRINTED_ERRATA, example_tables
from mrcert.errors import OccurrenceDeficit, PrefixViolation, PreconditionViolated, ShiftOutOfRange
from mrcert.tables import (
    CaseParams,
    build_tables,
    build_tensor_table,
    build_vanishing_table,
    epsilon,
    epsilon_fast,
    erase,
    graded_order,
    is_extendable,
    is_steady_pair,
    is_steady_table,
    is_unimaginative,
    m2_rank_gap,
    multidegree,
    row_indices,
    shift_pair,
    validate_sequence,
)


def test_case_params_counts():
    case = CaseParams(10, 4, 12, 2)
    assert case.ell == 2
    assert case.rho == 0
    assert case.n_rows == 15
    assert case.target_dim == 15
    assert case.injective and case.surjective


def test_case_params_rejects_bad_input():
    with pytest.raises(ValueError):
        CaseParams(4, 2, 6, 2)
    with pytest.raises(ValueError):
        CaseParams(4, 3, 6, 1)
    with pytest.raises(OverflowError):
        CaseParams(2**64, 3, 6, 2)


def test_validate_sequence_accepts_known_sequences():
    assert validate_sequence((0, 1, 2, 3), 4, 3, 6).entries == (0, 1, 2, 3)
    validate_sequence((0, 0, 1, 1, 2, 2, 3, 3, 4, 4), 10, 4, 12)


def test_validate_sequence_prefix_violation():
    with pytest.raises(PrefixViolation) as info:
        validate_sequence((1, 0, 2, 3), 4, 3, 6)
    assert info.value.position == 1
    assert info.value.smaller == 0


def test_validate_sequence_occurrence_deficit():
    with pytest.raises(OccurrenceDeficit) as info:
        validate_sequence((0, 0, 1, 2, 2, 3), 6, 3, 7)
    assert (info.value.value, info.value.count, info.value.required) == (1, 1, 2)


def test_validate_sequence_range_and_length():
    with pytest.raises(ValueError):
        validate_sequence((0, 1, 2), 4, 3, 6)
    with pytest.raises(ValueError):
        validate_sequence((0, 1, 2, 4), 4, 3, 6)


def _brute_valid(entries, r, need):
    for v in range(r + 1):
        if sum(1 for x in entries if x == v) < need:
            return False
    for i in range(len(entries)):
        prefix = entries[: i + 1]
        for v in range(entries[i]):
            if prefix.count(v) < prefix.count(entries[i]):
                return False
    return True


@pytest.mark.parametrize("g,r,d", [(4, 3, 6), (5, 3, 7), (6, 3, 8), (6, 3, 7), (8, 3, 9)])
def test_validate_sequence_matches_brute_force(g, r, d):
    need = r + g - d
    for entries in product(range(r + 1), repeat=g):
        try:
            validate_sequence(entries, g, r, d)
            ok = True
        except (OccurrenceDeficit, PrefixViolation):
            ok = False
        assert ok == _brute_valid(entries, r, need), entries


def test_is_extendable():
    assert is_extendable(validate_sequence((0, 1, 2, 3, 0), 5, 3, 7))
    assert is_extendable(validate_sequence((0, 1, 2, 3), 4, 3, 6))
    # three zeros against a single 3; the sequence only satisfies the occurrence
    # condition once every value is required just once, i.e. d = 10
    assert not is_extendable(validate_sequence((0, 0, 0, 1, 2, 3, 1, 2), 8, 3, 10))


def test_vanishing_table_columns():
    vt = build_vanishing_table(validate_sequence((0, 1, 2, 3), 4, 3, 6))
    assert vt.column(1) == [(0, 6), (1, 4), (2, 3), (3, 2)]
    assert vt.column(2) == [(0, 5), (2, 4), (3, 2), (4, 1)]
    vt = build_vanishing_table(validate_sequence((0, 1, 2, 3, 0), 5, 3, 7))
    assert vt.column(5) == [(3, 4), (4, 2), (5, 1), (6, 0)]


def test_vanishing_table_shifted():
    vt = build_vanishing_table(validate_sequence((0, 1, 2, 3), 4, 3, 7, shift=1))
    assert vt.column(1) == [(1, 6), (2, 4), (3, 3), (4, 2)]


def test_tensor_rows():
    tt = build_tables((0, 1, 2, 3), 4, 3, 6, 2)
    assert [tt.entry((0, 1), i) for i in range(1, 5)] == [(1, 10), (2, 9), (3, 7), (5, 5)]
    assert [tt.entry((3, 3), i) for i in range(1, 5)] == [(6, 4), (8, 2), (10, 0), (12, 0)]
    assert len(tt.rows) == 10
    assert tt.rows == tuple(sorted(tt.rows))


def test_row_orders():
    rows = row_indices(3, 2)
    assert len(rows) == comb(5, 2)
    assert graded_order(rows)[:4] == [(0, 0), (0, 1), (0, 2), (1, 1)]


def test_tensor_table_sum_identity():
    for name in GOLDEN_KEYS.values():
        ex, tt = example_tables(name)
        md = ex.m * ex.d
        for k, row in enumerate(tt.rows):
            for i in range(tt.g):
                assert tt.a[k][i] + tt.b[k][i] == md - ex.m + row.count(ex.delta[i])


def test_epsilon_examples():
    assert epsilon((0, 2, 4), (2, 6, 8)) == (1, 0, 0, 0)
    assert epsilon((7, 9, 10), (2, 6, 8)) == (0, 0, 0, 1)
    assert epsilon((2, 6, 8), (2, 6, 8)) == (1, 1, 1, 1)
    assert epsilon((), ()) == (1,)


def test_epsilon_fast_examples():
    assert epsilon_fast((0, 2, 4), (2, 6, 8)) == (1, 0, 0, 0)
    assert epsilon_fast((5, 3), (3, 3)) == (0, 1, 1)
    assert epsilon_fast((1, 1), (1, 1)) == (1, 1, 1)
    with pytest.raises(PreconditionViolated):
        epsilon_fast((0, 5), (1, 3))


def test_steady_pair():
    assert is_steady_pair((0, 2, 4), (2, 6, 8))
    assert is_steady_pair((3, 0, -2), (0, 0, 0))
    assert not is_steady_pair((-1, 2), (0, 0))


def test_steady_tables():
    ex, tt = example_tables("m2-r3-g4")
    assert is_steady_table(tt, ex.w)
    ex, tt = example_tables("m3-r4")
    assert is_steady_table(tt, ex.w)


def test_unimaginative():
    assert is_unimaginative((2, 6, 8), 2)
    assert not is_unimaginative((3, 5, 7, 12, 16, 19, 22, 24, 28, 31, 35, 37, 41, 44, 47), 3)
    assert is_unimaginative((5,), 3)


def test_erase_matches_highlighting(golden):
    for key, name in GOLDEN_KEYS.items():
        ex, tt = example_tables(name)
        mask = erase(tt, ex.w)
        for t in golden[key]["tensor"]:
            row = tuple(t["row"])
            k = tt.row_number(row)
            for i, (_, _, lit) in enumerate(t["cells"], start=1):
                flipped = (key, row, i) in PRINTED_ERRATA
                assert mask.is_present(k, i) == (lit != flipped), (key, row, i)


def test_every_row_present_somewhere():
    for name in GOLDEN_KEYS.values():
        ex, tt = example_tables(name)
        mask = erase(tt, ex.w)
        assert all(any(row) for row in mask.present)


def test_degenerate_genus_one():
    tt = build_tables((0,), 1, 3, 4, 2)
    mask = erase(tt, ())
    assert all(row == (True,) for row in mask.present)


def test_multidegree():
    assert multidegree((2, 6, 8), 12) == [2, 4, 2, 4]
    assert multidegree((4, 7, 10, 13, 17, 21), 27) == [4, 3, 3, 3, 4, 4, 6]
    assert multidegree((0, 0, 0), 9) == [0, 0, 0, 9]
    assert multidegree((), 5) == [5]


def test_shift_pair():
    seq = validate_sequence((0, 1, 2, 3), 4, 3, 6)
    tt = build_tensor_table(build_vanishing_table(seq), 2)
    new_seq, new_w = shift_pair(seq, (2, 6, 8), 1, 7, 2)
    assert new_w == (4, 8, 10)
    assert new_seq.shift == 1
    tt2 = build_tensor_table(build_vanishing_table(new_seq), 2)
    assert erase(tt2, new_w).present == erase(tt, (2, 6, 8)).present
    same_seq, same_w = shift_pair(seq, (2, 6, 8), 0, 6, 2)
    assert same_seq == seq and same_w == (2, 6, 8)
    with pytest.raises(ShiftOutOfRange):
        shift_pair(seq, (2, 6, 8), 2, 7, 2)


def test_shift_pair_cubic_example():
    ex, tt = example_tables("m3-r3")
    seq = validate_sequence(ex.delta, ex.g, ex.r, ex.d)
    new_seq, new_w = shift_pair(seq, ex.w, 1, 10, 3)
    tt2 = build_tensor_table(build_vanishing_table(new_seq), 3)
    for k in range(len(tt.rows)):
        assert all(x + 3 == y for x, y in zip(tt.a[k], tt2.a[k]))
    assert erase(tt2, new_w).present == erase(tt, ex.w).present


def test_m2_rank_gap():
    assert m2_rank_gap(4, 3, 6) == 1
    assert m2_rank_gap(5, 3, 7) == 0
    assert m2_rank_gap(10, 4, 12) == 0
