"""Builders for regular, row and extended PDAs and the two construction families."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

from .pda import STAR, ExtendedPdaMeta, Pda, PdaError, is_star, shift_integers, validate_pda


class InvalidSpecError(PdaError):
    pass


class PreconditionViolation(PdaError):
    pass


def subset_rows(d: int, t: int) -> list[tuple[int, ...]]:
    """The t-subsets of {1..d} in lexicographic order (row labels of the regular PDA)."""
    return list(combinations(range(1, d + 1), t))


def build_regular_pda(d: int, t: int) -> Pda:
    """(t+1)-regular (d, C(d,t), C(d-1,t-1), C(d,t+1)) PDA.

    Row T, column c holds a star when c is in T and otherwise the 1-based
    lexicographic rank of T | {c} among all (t+1)-subsets.
    """
    if not (isinstance(d, int) and isinstance(t, int)) or not 1 <= t <= d - 1:
        raise InvalidSpecError(f"need 1 <= t <= d-1, got d={d}, t={t}")
    rank = {s: i + 1 for i, s in enumerate(combinations(range(1, d + 1), t + 1))}
    grid = []
    for row in subset_rows(d, t):
        members = set(row)
        grid.append(
            tuple(STAR if c in members else rank[tuple(sorted(members | {c}))] for c in range(1, d + 1))
        )
    return validate_pda(grid)


def row_pda(q: int) -> Pda:
    """The 1 x q array [1 2 ... q], a 1-regular (q, 1, 0, q) PDA."""
    if not isinstance(q, int) or q < 2:
        raise InvalidSpecError(f"row PDA needs q >= 2, got {q}")
    return validate_pda([list(range(1, q + 1))])


def extend_pda(p1: Pda, p2: Pda) -> tuple[Pda, ExtendedPdaMeta]:
    """Block-replace p1's integers by shifted copies of p2 and its stars by all-star blocks."""
    single = sorted(s for s, c in p1.occurrences().items() if c < 2)
    if single:
        raise PreconditionViolation(f"integers {single} of the first PDA occur only once")
    if p2.k <= 1:
        raise PreconditionViolation("the second PDA needs more than one column")
    star_block = [[STAR] * p2.k for _ in range(p2.f)]
    rows = []
    for p1_row in p1.grid:
        blocks = [star_block if is_star(e) else shift_integers(p2, (e - 1) * p2.s) for e in p1_row]
        for i in range(p2.f):
            rows.append([x for b in blocks for x in b[i]])
    meta = ExtendedPdaMeta(k1=p1.k, k2=p2.k, f1=p1.f, f2=p2.f, s1=p1.s, s2=p2.s)
    pda = validate_pda(rows)
    meta.check(pda)
    return pda, meta


def decompose_extended(pda: Pda, k1: int, k2: int, f1: int, f2: int) -> tuple[Pda, Pda, ExtendedPdaMeta]:
    """Recover the two source PDAs of an extended PDA from its block structure.

    Raises PdaError when the grid is not an Algorithm-1 style extension
    with the given block sizes.
    """
    if k1 * k2 != pda.k or f1 * f2 != pda.f:
        raise PdaError(f"blocks {k1}x{k2} / {f1}x{f2} do not tile a {pda.f}x{pda.k} grid")

    def block(i, k):
        return tuple(tuple(pda.grid[i * f2 + a][k * k2:(k + 1) * k2]) for a in range(f2))

    blocks = {(i, k): block(i, k) for i in range(f1) for k in range(k1)}
    mins = {
        key: min(e for row in b for e in row if not is_star(e))
        for key, b in blocks.items()
        if any(not is_star(e) for row in b for e in row)
    }
    if not mins:
        raise PdaError("extended grid has no integer blocks")
    base = min(mins, key=mins.get)
    p2 = validate_pda(blocks[base])
    if p2.k != k2 or p2.f != f2:
        raise PdaError("inconsistent block shape")
    s2 = p2.s
    p1_grid = [[STAR] * k1 for _ in range(f1)]
    for (i, k), b in blocks.items():
        if (i, k) not in mins:
            continue
        offset = mins[(i, k)] - 1
        if offset % s2 or shift_integers(p2, offset) != b:
            raise PdaError(f"block ({i + 1},{k + 1}) is not a shifted copy of the base block")
        p1_grid[i][k] = offset // s2 + 1
    p1 = validate_pda(p1_grid)
    return p1, p2, ExtendedPdaMeta(k1, k2, f1, f2, p1.s, s2)


@dataclass(frozen=True)
class ConstructionPoint:
    k: int
    q: int
    r1: int
    r2: int | None = None


def construct_one(k: int, q: int, r: int) -> tuple[Pda, ExtendedPdaMeta]:
    if not 1 <= r <= k - 1 or q < 2:
        raise InvalidSpecError(f"construction 1 needs 1 <= r <= K-1 and Q >= 2 (K={k}, Q={q}, r={r})")
    return extend_pda(build_regular_pda(k, r), row_pda(q))


def construct_two(k: int, q: int, r1: int, r2: int) -> tuple[Pda, ExtendedPdaMeta]:
    if not 1 <= r1 <= k - 1 or not 1 <= r2 <= q - 1:
        raise InvalidSpecError(
            f"construction 2 needs 1 <= r1 <= K-1 and 1 <= r2 <= Q-1 (K={k}, Q={q}, r1={r1}, r2={r2})"
        )
    return extend_pda(build_regular_pda(k, r1), build_regular_pda(q, r2))


def construct(point: ConstructionPoint) -> tuple[Pda, ExtendedPdaMeta]:
    if point.r2 is None:
        return construct_one(point.k, point.q, point.r1)
    return construct_two(point.k, point.q, point.r1, point.r2)


def construction_one_params(k: int, q: int, r: int) -> tuple[int, int, int, int]:
    return (k * q, comb(k, r), comb(k - 1, r - 1), q * comb(k, r + 1))


def construction_two_params(k: int, q: int, r1: int, r2: int) -> tuple[int, int, int, int]:
    z1, f1 = comb(k - 1, r1 - 1), comb(k, r1)
    z2, f2 = comb(q - 1, r2 - 1), comb(q, r2)
    return (k * q, f1 * f2, z1 * f2 + (f1 - z1) * z2, comb(k, r1 + 1) * comb(q, r2 + 1))


def construction_two_printed_z(k: int, q: int, r1: int, r2: int) -> Fraction:
    """The closed-form star count printed alongside construction 2.

    It disagrees with the star count the construction actually produces
    (e.g. 3 vs 5 at K=Q=3, r1=r2=1); kept only for discrepancy reports.
    """
    return comb(k - 1, r1 - 1) * comb(q, r2 + 1) * (Fraction(q, r2) - Fraction(k - r1, r1))


def z_discrepancies(max_k: int = 5, max_q: int = 6) -> list[dict]:
    """Compare constructive and printed Z for every construction-2 point with K <= Q."""
    out = []
    for k in range(2, max_k + 1):
        for q in range(k, max_q + 1):
            for r1 in range(1, k):
                for r2 in range(1, q):
                    built = construction_two_params(k, q, r1, r2)[2]
                    printed = construction_two_printed_z(k, q, r1, r2)
                    out.append(
                        {"K": k, "Q": q, "r1": r1, "r2": r2, "constructive_z": built,
                         "printed_z": printed, "match": printed == built}
                    )
    return out
