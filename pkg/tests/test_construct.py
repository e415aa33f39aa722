from itertools import combinations
from math import comb

import pytest

from pcdc.construct import (
    ConstructionPoint,
    InvalidSpecError,
    PreconditionViolation,
    build_regular_pda,
    construct,
    construct_one,
    construct_two,
    construction_one_params,
    construction_two_params,
    construction_two_printed_z,
    decompose_extended,
    extend_pda,
    row_pda,
    subset_rows,
)
from pcdc.pda import STAR, PdaError, is_star, regularity, validate_pda

from conftest import load_grid


def lex_rank(subset, d):
    """Independent rank: count the (t+1)-subsets that sort before it."""
    subset = tuple(sorted(subset))
    return 1 + sum(1 for c in combinations(range(1, d + 1), len(subset)) if c < subset)


def test_regular_5_3_entries():
    p = build_regular_pda(5, 3)
    assert p.grid == load_grid("regular_5_3.txt")
    assert p.params == (5, 10, 6, 5)
    rows = subset_rows(5, 3)
    assert p[rows.index((1, 2, 3)), 3] == 1
    assert p[rows.index((3, 4, 5)), 1] == 5


def test_small_regular_examples():
    assert build_regular_pda(3, 1).grid == ((STAR, 1, 2), (1, STAR, 3), (2, 3, STAR))
    assert build_regular_pda(3, 2).grid == ((STAR, STAR, 1), (STAR, 1, STAR), (1, STAR, STAR))


@pytest.mark.parametrize("d", range(2, 9))
def test_regular_pda_properties(d):
    for t in range(1, d):
        p = build_regular_pda(d, t)
        assert p.params == (d, comb(d, t), comb(d - 1, t - 1), comb(d, t + 1))
        assert regularity(p) == t + 1
        for i, row_set in enumerate(subset_rows(d, t)):
            for c in range(1, d + 1):
                e = p[i, c - 1]
                if c in row_set:
                    assert e == STAR
                else:
                    assert e == lex_rank(set(row_set) | {c}, d)


def test_invalid_regular_specs():
    for d, t in [(3, 0), (3, 3), (1, 1), (4, -1)]:
        with pytest.raises(InvalidSpecError):
            build_regular_pda(d, t)


def test_row_pda():
    assert row_pda(2).grid == ((1, 2),)
    assert row_pda(3).params == (3, 1, 0, 3)
    assert regularity(row_pda(4)) == 1
    with pytest.raises(InvalidSpecError):
        row_pda(1)


def test_example3_extension():
    a1, meta = extend_pda(validate_pda(load_grid("example3_A1_source.txt")),
                          validate_pda(load_grid("example3_A2_source.txt")))
    assert a1.grid == load_grid("example3_A1.txt")
    assert a1.params == (8, 8, 6, 4)
    assert (meta.k1, meta.k2, meta.f1, meta.f2) == (4, 2, 4, 2)


def test_example4_extension():
    p, meta = construct_two(3, 3, 1, 1)
    assert p.grid == load_grid("example4_P1.txt")
    assert p.params == (9, 9, 5, 9)


def test_example6_extension():
    p, _ = extend_pda(build_regular_pda(5, 3), row_pda(2))
    assert p.params == (10, 10, 6, 10)
    assert p.grid == load_grid("example6_A2.txt")
    assert construct_one(5, 2, 3)[0] == p


def test_example6_printed_grid_is_not_a_pda():
    # the printed array repeats "3 4" in row 2 where the construction needs "5 6"
    printed = load_grid("example6_A2_printed.txt")
    built = load_grid("example6_A2.txt")
    diff = [(i, j) for i in range(10) for j in range(10) if printed[i][j] != built[i][j]]
    assert diff == [(1, 8), (1, 9)]
    with pytest.raises(PdaError):
        validate_pda(printed)


def test_example7_and_8():
    p2, _ = construct_one(3, 3, 2)
    assert p2.grid == load_grid("example7_P2.txt") and p2.params == (9, 3, 2, 3)
    p3, _ = construct_two(3, 3, 2, 2)
    assert p3.grid == load_grid("example8_P3.txt") and p3.params == (9, 9, 8, 1)


def test_derived_params():
    assert construct_one(3, 3, 1)[0].params == (9, 3, 1, 9)
    assert construct_two(4, 4, 1, 1)[0].params == (16, 16, 7, 36)


def all_pairs():
    for k in range(2, 6):
        for q in range(2, 7):
            for r1 in range(1, k):
                for r2 in range(1, q):
                    yield k, q, r1, r2


def test_extension_validity_and_regularity_grid():
    n = 0
    for k, q, r1, r2 in all_pairs():
        p, meta = construct_two(k, q, r1, r2)
        assert p.params == construction_two_params(k, q, r1, r2)
        assert regularity(p) == (r1 + 1) * (r2 + 1)
        assert (meta.k1, meta.k2, meta.f1, meta.f2) == (k, q, comb(k, r1), comb(q, r2))
        n += 1
    assert n == sum((k - 1) * (q - 1) for k in range(2, 6) for q in range(2, 7))


@pytest.mark.parametrize("k", range(2, 6))
def test_construction_one_params_and_star_pattern(k):
    for q in range(2, 7):
        for r in range(1, k):
            p, meta = construct_one(k, q, r)
            base = build_regular_pda(k, r)
            assert p.params == construction_one_params(k, q, r)
            assert regularity(p) == r + 1
            assert (p.f, p.z) == (base.f, base.z)
            for j in range(p.k):
                assert p.star_rows(j) == base.star_rows(j // q)


def test_extension_of_regular_pdas_multiplies_regularity():
    for (d1, t1), (d2, t2) in [((4, 1), (3, 1)), ((4, 2), (2, 1)), ((5, 2), (4, 3)), ((3, 2), (4, 1))]:
        p, _ = extend_pda(build_regular_pda(d1, t1), build_regular_pda(d2, t2))
        assert regularity(p) == (t1 + 1) * (t2 + 1)


def test_extension_preconditions():
    with pytest.raises(PreconditionViolation):
        extend_pda(row_pda(3), row_pda(2))
    with pytest.raises(PreconditionViolation):
        extend_pda(build_regular_pda(3, 1), validate_pda([[STAR], [1]]))
    with pytest.raises(InvalidSpecError):
        construct_one(3, 3, 3)
    with pytest.raises(InvalidSpecError):
        construct_two(3, 3, 1, 3)
    with pytest.raises(InvalidSpecError):
        construct_one(3, 1, 1)


def test_decompose_round_trip():
    for k, q, r1, r2 in [(3, 3, 1, 1), (4, 5, 2, 3), (5, 2, 3, 1)]:
        p, meta = construct_two(k, q, r1, r2)
        p1, p2, meta2 = decompose_extended(p, meta.k1, meta.k2, meta.f1, meta.f2)
        assert p1 == build_regular_pda(k, r1) and p2 == build_regular_pda(q, r2)
        assert meta2 == meta
    p, meta = construct_one(4, 3, 2)
    p1, p2, _ = decompose_extended(p, 4, 3, meta.f1, 1)
    assert p2 == row_pda(3)


def test_decompose_rejects_foreign_grids():
    with pytest.raises(PdaError):
        decompose_extended(build_regular_pda(4, 1), 2, 2, 2, 3)
    p, _ = construct_two(3, 3, 1, 1)
    with pytest.raises(PdaError):
        decompose_extended(p, 9, 1, 3, 3)


def test_construct_dispatch():
    assert construct(ConstructionPoint(3, 3, 2))[0] == construct_one(3, 3, 2)[0]
    assert construct(ConstructionPoint(3, 3, 2, 2))[0] == construct_two(3, 3, 2, 2)[0]


def test_printed_star_count_formula_disagrees():
    assert construction_two_params(3, 3, 1, 1)[2] == 5
    assert construction_two_params(3, 3, 2, 2)[2] == 8
    assert construction_two_printed_z(3, 3, 1, 1) == 3
    assert construction_two_printed_z(3, 3, 2, 2) == 2


def test_star_count_matches_grid_everywhere():
    for k, q, r1, r2 in all_pairs():
        p, _ = construct_two(k, q, r1, r2)
        assert sum(is_star(e) for e in p.column(0)) == construction_two_params(k, q, r1, r2)[2]
