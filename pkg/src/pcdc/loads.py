"""Closed-form computation/communication loads as exact rationals."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import comb, floor
from typing import Mapping

Rational = Fraction


class Source(str, enum.Enum):
    THEOREM1 = "theorem1"
    THEOREM2 = "theorem2"
    THEOREM3 = "theorem3"
    NONPRIVATE_OPTIMAL = "nonprivate"
    NONPRIVATE_PDA = "nonprivate_pda"
    MEASURED = "measured"


class OutOfRangeError(ValueError):
    pass


class SingletonIntegerError(ValueError):
    """A PDA integer occurs only once, so no multicast scheme is defined for it."""


@dataclass(frozen=True)
class LoadPoint:
    r: Fraction
    l: Fraction
    source: Source
    r1: int | None = None
    r2: int | None = None
    f_required: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "r", Fraction(self.r))
        object.__setattr__(self, "l", Fraction(self.l))
        if self.r <= 0 or self.l < 0:
            raise ValueError(f"invalid load point r={self.r}, L={self.l}")


def _corner(r: int, k: int) -> Fraction:
    return Fraction(1, r) * (1 - Fraction(r, k))


def optimal_nonprivate_load(r, k: int) -> Fraction:
    """Optimal non-private load: (1/r)(1 - r/K) at integer r, convex-envelope
    interpolation between integer corners otherwise.

    Below r = 1 there is no lower corner; the formula is evaluated directly.
    """
    r = Fraction(r)
    if not 0 < r <= k:
        raise OutOfRangeError(f"need 0 < r <= K, got r={r}, K={k}")
    if r < 1 or r.denominator == 1:
        return Fraction(1) / r * (1 - r / k)
    lo = floor(r)
    w = r - lo
    return (1 - w) * _corner(lo, k) + w * _corner(lo + 1, k)


def pda_nonprivate_load(profile: Mapping[int, int], k: int, f: int) -> Fraction:
    """Sum over g of g*S_g / (K F (g-1)) for the non-private PDA scheme."""
    if any(g < 2 and n for g, n in profile.items()):
        raise SingletonIntegerError("every integer must occur at least twice")
    return sum((Fraction(g * n, k * f * (g - 1)) for g, n in profile.items() if n), Fraction(0))


def theorem1_loads(p1_params, p1_profile: Mapping[int, int], p2_params, k1: int | None = None) -> LoadPoint:
    """Loads of the private scheme on an extended PDA.

    ``p1_params``/``p2_params`` are (K, F, Z, S) tuples of the two source
    PDAs; ``k1`` defaults to the first PDA's column count.
    """
    pk1, f1, z1, s1 = p1_params
    _, f2, z2, s2 = p2_params
    k1 = pk1 if k1 is None else k1
    if any(g < 2 and n for g, n in p1_profile.items()):
        raise SingletonIntegerError("every integer of the first PDA must occur at least twice")
    r = Fraction(z1 * k1, f1) + (1 - Fraction(z1, f1)) * Fraction(z2 * k1, f2)
    tail = sum((Fraction(n, g - 1) for g, n in p1_profile.items() if n), Fraction(0))
    l = Fraction(s2, k1 * f1 * f2) * (s1 + tail)
    return LoadPoint(r, l, Source.THEOREM1)


def theorem2_point(k: int, q: int, r: int) -> LoadPoint:
    if not 1 <= r <= k - 1:
        raise OutOfRangeError(f"need r in [1, K-1], got r={r}, K={k}")
    return LoadPoint(Fraction(r), Fraction(q, r) * (1 - Fraction(r, k)), Source.THEOREM2,
                     r1=r, f_required=comb(k, r))


def theorem3_point(k: int, q: int, r1: int, r2: int) -> LoadPoint:
    if not 1 <= r1 <= k - 1 or not 1 <= r2 <= q - 1:
        raise OutOfRangeError(f"need r1 in [1, K-1], r2 in [1, Q-1]; got K={k}, Q={q}, r1={r1}, r2={r2}")
    r = r1 + Fraction((k - r1) * r2, q)
    l = Fraction(1, r1) * (1 - Fraction(r1, k)) * Fraction(q - r2, r2 + 1)
    return LoadPoint(r, l, Source.THEOREM3, r1=r1, r2=r2, f_required=comb(k, r1) * comb(q, r2))


def theorem2_curve(r, k: int, q: int) -> Fraction:
    """Theorem-2 load treated as the continuous function (Q/r)(1 - r/K)."""
    r = Fraction(r)
    return Fraction(q) / r * (1 - r / k)


@dataclass(frozen=True)
class Comparison:
    a: Fraction
    b: Fraction
    ratio: Fraction
    closed_form_ratio: Fraction
    assumption_holds: bool


def compare_theorems(k: int, q: int, r1: int, r2: int) -> Comparison:
    """Theorem-2 load A versus Theorem-3 load B at the Theorem-3 computation load.

    With Q >= K the result is checked to satisfy A > B; for Q < K the
    values are returned with ``assumption_holds`` False and no check.
    """
    b_point = theorem3_point(k, q, r1, r2)
    a = Fraction(q * (k - r1) * (q - r2), k * (r1 * q + (k - r1) * r2))
    b = b_point.l
    closed = Fraction(q * r1 * (r2 + 1), r1 * q + (k - r1) * r2)
    ok = q >= k
    if ok and not a > b:
        raise AssertionError(f"A={a} is not above B={b} at K={k}, Q={q}, r1={r1}, r2={r2}")
    return Comparison(a, b, a / b, closed, ok)


def nonprivate_corners(k: int) -> list[LoadPoint]:
    return [
        LoadPoint(Fraction(r), _corner(r, k), Source.NONPRIVATE_OPTIMAL, r1=r, f_required=comb(k, r))
        for r in range(1, k + 1)
    ]


def tradeoff_sweep(k: int, q: int) -> list[LoadPoint]:
    """All Theorem-2, Theorem-3 and non-private corner points for (K, Q)."""
    if k < 2 or q < 2:
        raise OutOfRangeError("sweep needs K >= 2 and Q >= 2")
    pts = [theorem2_point(k, q, r) for r in range(1, k)]
    pts += [theorem3_point(k, q, r1, r2) for r1 in range(1, k) for r2 in range(1, q)]
    pts += nonprivate_corners(k)
    return sorted(pts, key=lambda p: (p.source.value, p.r1 or 0, p.r2 or 0))
