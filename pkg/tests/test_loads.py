from fractions import Fraction as Fr
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pcdc.construct import build_regular_pda, construct_one, construct_two, decompose_extended
from pcdc.loads import (
    LoadPoint,
    OutOfRangeError,
    SingletonIntegerError,
    Source,
    compare_theorems,
    nonprivate_corners,
    optimal_nonprivate_load,
    pda_nonprivate_load,
    theorem1_loads,
    theorem2_curve,
    theorem2_point,
    theorem3_point,
    tradeoff_sweep,
)
from pcdc.pda import multiplicity_profile, validate_pda

from conftest import load_grid


def test_optimal_nonprivate_values():
    assert optimal_nonprivate_load(2, 3) == Fr(1, 6)
    assert optimal_nonprivate_load(1, 3) == Fr(2, 3)
    for k in range(1, 9):
        assert optimal_nonprivate_load(k, k) == 0


def test_optimal_nonprivate_interpolates_between_corners():
    # halfway between (1, 2/3) and (2, 1/6) for K = 3
    assert optimal_nonprivate_load(Fr(3, 2), 3) == Fr(5, 12)
    assert optimal_nonprivate_load(Fr(5, 3), 3) == Fr(1, 3) * Fr(2, 3) + Fr(2, 3) * Fr(1, 6)


@given(st.integers(2, 9), st.fractions(min_value=1, max_value=9))
def test_envelope_is_below_the_curve(k, r):
    if r > k:
        return
    # the curve (1/r)(1-r/K) is convex, so chords lie above it
    assert optimal_nonprivate_load(r, k) >= Fr(1) / r - Fr(1, k)


def test_optimal_nonprivate_range():
    for bad in (0, -1, 4, Fr(7, 2)):
        with pytest.raises(OutOfRangeError):
            optimal_nonprivate_load(bad, 3)


def test_pda_nonprivate_examples():
    p = validate_pda(load_grid("example2_P2.txt"))
    assert pda_nonprivate_load(multiplicity_profile(p), p.k, p.f) == Fr(1, 4)
    assert pda_nonprivate_load({2: 1}, 2, 1) == 1
    with pytest.raises(SingletonIntegerError):
        pda_nonprivate_load({1: 2, 2: 1}, 2, 1)


def test_pda_nonprivate_matches_optimum_on_regular_pdas():
    for k in range(2, 9):
        for r in range(1, k):
            p = build_regular_pda(k, r)
            assert pda_nonprivate_load(multiplicity_profile(p), k, p.f) == optimal_nonprivate_load(r, k)


def theorem1_from(pda, meta):
    p1, p2, _ = decompose_extended(pda, meta.k1, meta.k2, meta.f1, meta.f2)
    return theorem1_loads(p1.params, multiplicity_profile(p1), p2.params, meta.k1)


def test_theorem1_examples():
    for build, expect in [
        (lambda: construct_two(3, 3, 1, 1), (Fr(5, 3), Fr(2, 3))),
        (lambda: construct_one(3, 3, 2), (Fr(2), Fr(1, 2))),
        (lambda: construct_two(3, 3, 2, 2), (Fr(8, 3), Fr(1, 18))),
    ]:
        pt = theorem1_from(*build())
        assert (pt.r, pt.l) == expect
        assert pt.source is Source.THEOREM1


def test_theorem1_rejects_singletons():
    with pytest.raises(SingletonIntegerError):
        theorem1_loads((2, 1, 0, 2), {1: 2}, (2, 1, 0, 2))


def test_theorem2_and_3_points():
    assert (theorem2_point(3, 3, 2).r, theorem2_point(3, 3, 2).l) == (2, Fr(1, 2))
    assert theorem2_point(3, 3, 1).l == 2
    for k in range(2, 7):
        for r in range(1, k):
            assert theorem2_point(k, 1, r).l == optimal_nonprivate_load(r, k)
    p = theorem3_point(3, 3, 1, 1)
    assert (p.r, p.l) == (Fr(5, 3), Fr(2, 3))
    p = theorem3_point(3, 3, 2, 2)
    assert (p.r, p.l) == (Fr(8, 3), Fr(1, 18))
    for k in range(2, 6):
        for q in range(2, 7):
            p = theorem3_point(k, q, k - 1, q - 1)
            assert p.r == k - Fr(1, q)
            assert p.l == Fr(1, (k - 1) * k * q)
            assert p.f_required == comb(k, k - 1) * comb(q, q - 1)


def test_point_ranges():
    for args in [(3, 3, 0), (3, 3, 3)]:
        with pytest.raises(OutOfRangeError):
            theorem2_point(*args)
    for args in [(3, 3, 0, 1), (3, 3, 1, 3), (3, 3, 3, 1)]:
        with pytest.raises(OutOfRangeError):
            theorem3_point(*args)
    with pytest.raises(ValueError):
        LoadPoint(0, 1, Source.MEASURED)
    with pytest.raises(ValueError):
        LoadPoint(1, -1, Source.MEASURED)


def test_compare_example():
    c = compare_theorems(3, 3, 1, 1)
    assert (c.a, c.b, c.ratio) == (Fr(4, 5), Fr(2, 3), Fr(6, 5))
    assert c.ratio == c.closed_form_ratio and c.assumption_holds


def test_compare_a_is_theorem2_curve_at_theorem3_r():
    for k in range(2, 6):
        for q in range(k, 7):
            for r1 in range(1, k):
                for r2 in range(1, q):
                    c = compare_theorems(k, q, r1, r2)
                    assert c.a == theorem2_curve(theorem3_point(k, q, r1, r2).r, k, q)
                    assert c.a > c.b and c.a / c.b == c.closed_form_ratio


def test_compare_equal_k_q_ratio():
    for q in range(2, 7):
        for r in range(1, q):
            c = compare_theorems(q, q, r, r)
            assert c.ratio == Fr(q * r * (r + 1), r * q + (q - r) * r) > 1


def test_compare_below_assumption_is_flagged_not_checked():
    # Q < K: Q r1 > K - r1 fails at (K=5, Q=2, r1=1), so A <= B is possible
    c = compare_theorems(5, 2, 1, 1)
    assert not c.assumption_holds
    assert c.a <= c.b


def test_sweep_contents():
    pts = tradeoff_sweep(3, 3)
    pairs = {(p.source, p.r, p.l) for p in pts}
    assert (Source.THEOREM2, 2, Fr(1, 2)) in pairs
    assert (Source.THEOREM3, Fr(8, 3), Fr(1, 18)) in pairs
    assert (Source.NONPRIVATE_OPTIMAL, 2, Fr(1, 6)) in pairs
    assert len(pts) == 2 + 4 + 3
    keys = [(p.source.value, p.r1 or 0, p.r2 or 0) for p in pts]
    assert keys == sorted(keys)
    assert [p.r for p in nonprivate_corners(3)] == [1, 2, 3]


def test_nonprivate_lower_bounds_private_points():
    for k in range(2, 6):
        for q in range(2, 7):
            for p in tradeoff_sweep(k, q):
                if p.source in (Source.THEOREM2, Source.THEOREM3):
                    assert optimal_nonprivate_load(p.r, k) <= p.l


def test_sweep_range():
    with pytest.raises(OutOfRangeError):
        tradeoff_sweep(1, 3)
