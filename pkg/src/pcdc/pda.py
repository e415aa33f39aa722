"""Placement delivery arrays: data model, validation and elementary transforms.

A PDA is an F x K grid whose entries are either the star symbol or a
positive integer.  Rows index file batches, columns index nodes.  Grid
coordinates are 0-based in the Python API and 1-based in every report
(violation messages, CLI output).
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Final, Iterable, Sequence, Union

STAR: Final = "*"

Entry = Union[int, str]
Grid = tuple[tuple[Entry, ...], ...]


def is_star(entry: Entry) -> bool:
    return entry == STAR


class PdaError(ValueError):
    """Base class for PDA errors."""


class NonRectangularError(PdaError):
    """Grid is empty or its rows differ in length."""

    def __init__(self, row_lengths: Sequence[int]):
        self.row_lengths = tuple(row_lengths)
        super().__init__(f"grid is not a non-empty rectangle (row lengths {list(self.row_lengths)})")


@dataclass(frozen=True)
class Violation:
    """One violated PDA condition; locations are 1-based."""

    def describe(self) -> str:  # pragma: no cover - overridden
        raise NotImplementedError


@dataclass(frozen=True)
class InvalidEntry(Violation):
    row: int
    column: int
    value: object

    def describe(self) -> str:
        return f"entry ({self.row},{self.column}) = {self.value!r} is neither '*' nor a positive integer"


@dataclass(frozen=True)
class A1Violation(Violation):
    column: int
    star_count: int
    expected: int

    def describe(self) -> str:
        return f"A1: column {self.column} has {self.star_count} stars, column 1 has {self.expected}"


@dataclass(frozen=True)
class A2Violation(Violation):
    missing: int

    def describe(self) -> str:
        return f"A2: integer {self.missing} does not appear"


@dataclass(frozen=True)
class A3Violation(Violation):
    value: int
    first: tuple[int, int]
    second: tuple[int, int]
    reason: str

    def describe(self) -> str:
        return f"A3: integer {self.value} at {self.first} and {self.second}: {self.reason}"


class InvalidPdaError(PdaError):
    """Raised by validate_pda; carries every violated condition."""

    def __init__(self, violations: Sequence[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(v.describe() for v in self.violations))


class NotRegularError(PdaError):
    """Integers of the PDA occur with differing multiplicities."""

    def __init__(self, witnesses: tuple[tuple[int, int], tuple[int, int]] | None):
        # witnesses: ((s1, count1), (s2, count2)) or None when the PDA has no integers
        self.witnesses = witnesses
        if witnesses is None:
            msg = "PDA has no integers"
        else:
            (s1, c1), (s2, c2) = witnesses
            msg = f"integer {s1} occurs {c1} times but integer {s2} occurs {c2} times"
        super().__init__(msg)


def _normalize(grid: Iterable[Iterable[Entry]]) -> Grid:
    rows = tuple(tuple(row) for row in grid)
    lengths = [len(r) for r in rows]
    if not rows or lengths[0] == 0 or any(n != lengths[0] for n in lengths):
        raise NonRectangularError(lengths)
    return rows


def _entry_ok(e: object) -> bool:
    if e == STAR:
        return True
    return isinstance(e, int) and not isinstance(e, bool) and e >= 1


def integer_positions(grid: Grid) -> dict[int, list[tuple[int, int]]]:
    """Map each integer to its (row, column) positions in row-major order."""
    pos: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for f, row in enumerate(grid):
        for k, e in enumerate(row):
            if not is_star(e):
                pos[e].append((f, k))
    return dict(pos)


def a3_pair_problem(grid: Grid, a: tuple[int, int], b: tuple[int, int]) -> str | None:
    """Why two equal-integer positions break A3, or None if they are fine."""
    (f1, k1), (f2, k2) = a, b
    if f1 == f2:
        return "same row"
    if k1 == k2:
        return "same column"
    if not (is_star(grid[f1][k2]) and is_star(grid[f2][k1])):
        return "opposite corners of the 2x2 subarray are not both stars"
    return None


def check_pda(grid: Iterable[Iterable[Entry]]) -> list[Violation]:
    """Collect every violated PDA condition (empty list means valid).

    Raises NonRectangularError when the grid has no rectangular shape,
    since none of the conditions are meaningful then.
    """
    g = _normalize(grid)
    violations: list[Violation] = []
    bad = [
        InvalidEntry(f + 1, k + 1, e)
        for f, row in enumerate(g)
        for k, e in enumerate(row)
        if not _entry_ok(e)
    ]
    if bad:
        return bad

    n_cols = len(g[0])
    stars = [sum(is_star(row[k]) for row in g) for k in range(n_cols)]
    violations += [
        A1Violation(k + 1, stars[k], stars[0]) for k in range(1, n_cols) if stars[k] != stars[0]
    ]

    pos = integer_positions(g)
    s = max(pos, default=0)
    violations += [A2Violation(v) for v in range(1, s + 1) if v not in pos]

    for value in sorted(pos):
        occ = pos[value]
        for i in range(len(occ)):
            for j in range(i + 1, len(occ)):
                why = a3_pair_problem(g, occ[i], occ[j])
                if why:
                    first = (occ[i][0] + 1, occ[i][1] + 1)
                    second = (occ[j][0] + 1, occ[j][1] + 1)
                    violations.append(A3Violation(value, first, second, why))
    return violations


@dataclass(frozen=True)
class Pda:
    """A validated (K, F, Z, S) placement delivery array.

    Construct through :func:`validate_pda` or directly; either way the
    grid is checked and an :class:`InvalidPdaError` is raised when it
    breaks any of the conditions.
    """

    grid: Grid
    k: int = field(init=False)
    f: int = field(init=False)
    z: int = field(init=False)
    s: int = field(init=False)

    def __post_init__(self):
        grid = _normalize(self.grid)
        violations = check_pda(grid)
        if violations:
            raise InvalidPdaError(violations)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "f", len(grid))
        object.__setattr__(self, "k", len(grid[0]))
        object.__setattr__(self, "z", sum(is_star(row[0]) for row in grid))
        object.__setattr__(self, "s", max((e for row in grid for e in row if not is_star(e)), default=0))

    @property
    def params(self) -> tuple[int, int, int, int]:
        return (self.k, self.f, self.z, self.s)

    def __getitem__(self, fk: tuple[int, int]) -> Entry:
        f, k = fk
        return self.grid[f][k]

    def column(self, k: int) -> tuple[Entry, ...]:
        return tuple(row[k] for row in self.grid)

    def column_integers(self, k: int) -> list[int]:
        return sorted(e for e in self.column(k) if not is_star(e))

    def star_rows(self, k: int) -> list[int]:
        return [f for f, row in enumerate(self.grid) if is_star(row[k])]

    def positions(self) -> dict[int, list[tuple[int, int]]]:
        return integer_positions(self.grid)

    def occurrences(self) -> Counter:
        return Counter(e for row in self.grid for e in row if not is_star(e))

    def __str__(self) -> str:
        return "\n".join(" ".join(str(e) for e in row) for row in self.grid)


def validate_pda(grid: Iterable[Iterable[Entry]]) -> Pda:
    return Pda(_normalize(grid))


def regularity(pda: Pda) -> int:
    """Return g when every integer of ``pda`` occurs exactly g times."""
    counts = pda.occurrences()
    if not counts:
        raise NotRegularError(None)
    items = sorted(counts.items())
    s0, g = items[0]
    for s, c in items[1:]:
        if c != g:
            raise NotRegularError(((s0, g), (s, c)))
    return g


def multiplicity_profile(pda: Pda) -> dict[int, int]:
    """Map multiplicity g to the number of integers occurring exactly g times."""
    return dict(sorted(Counter(pda.occurrences().values()).items()))


def shift_integers(pda: Pda | Grid, offset: int) -> Grid:
    """Add ``offset`` to every integer entry; stars stay stars.

    The result is a raw grid: for offset > 0 it no longer starts at 1 and
    is therefore not a standalone PDA.
    """
    if offset < 0:
        raise ValueError("offset must be nonnegative")
    grid = pda.grid if isinstance(pda, Pda) else _normalize(pda)
    return tuple(tuple(e if is_star(e) else e + offset for e in row) for row in grid)


def transpose(pda: Pda | Grid) -> Grid:
    """Swap rows and columns. Not every transposed PDA is a PDA; validate the result."""
    grid = pda.grid if isinstance(pda, Pda) else _normalize(pda)
    return tuple(zip(*grid))


def delete_columns(pda: Pda | Grid, columns: Iterable[int]) -> Grid:
    """Drop the given 0-based columns. A1 and A3 survive; A2 may not."""
    grid = pda.grid if isinstance(pda, Pda) else _normalize(pda)
    drop = set(columns)
    return tuple(tuple(e for j, e in enumerate(row) if j not in drop) for row in grid)


@dataclass(frozen=True)
class ExtendedPdaMeta:
    """Block structure of an extended PDA built from two source PDAs.

    The extended grid has k1 column blocks of k2 columns and f1 row blocks
    of f2 rows; s1 and s2 are the integer counts of the two sources.
    """

    k1: int
    k2: int
    f1: int
    f2: int
    s1: int
    s2: int

    def check(self, pda: Pda) -> None:
        if pda.k != self.k1 * self.k2 or pda.f != self.f1 * self.f2:
            raise PdaError(
                f"block structure {self.k1}x{self.k2} columns, {self.f1}x{self.f2} rows "
                f"does not fit a {pda.f}x{pda.k} grid"
            )

    def column_block(self, j: int) -> int:
        """0-based column block of 0-based extended column j."""
        return j // self.k2

    def row_block(self, f: int) -> int:
        return f // self.f2
