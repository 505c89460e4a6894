"""Finite linear spaces: representation, axiom checking, basic predicates.

A linear space is a set of points together with lines such that every line
has at least two points and any two distinct points lie on exactly one line.
Only lines with >= 3 points are stored explicitly; every point pair not
covered by a stored line is implicitly joined by a trivial 2-point line, so
the pair axiom holds by construction and the single invariant to enforce is
that two stored lines share at most one point.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

Line = tuple[int, ...]
Point = int


class GeometryError(Exception):
    """Base class for all domain errors raised by this package."""


class ValidationError(GeometryError):
    """Raw input does not describe a linear space."""


class DuplicatePointInLine(ValidationError):
    pass


class LineTooSmall(ValidationError):
    pass


class PointOutOfRange(GeometryError):
    pass


class TwoLinesShareTwoPoints(ValidationError):
    pass


class EqualPoints(GeometryError):
    pass


class NotClosed(GeometryError):
    pass


class PointDegreeBelowTwo(GeometryError):
    pass


@dataclass(frozen=True)
class LinearSpace:
    """Immutable incidence structure on points 0..n_points-1.

    ``lines`` holds the nontrivial (>= 3 point) lines only, each as a sorted
    tuple, the whole collection sorted lexicographically.  Values are
    hashable and safe to share between workers; all operations on them are
    pure functions.
    """

    n_points: int
    lines: tuple[Line, ...]

    def __post_init__(self) -> None:
        if self.n_points < 0:
            raise ValidationError(f"negative point count {self.n_points}")
        seen: dict[tuple[int, int], Line] = {}
        prev: Line | None = None
        for ln in self.lines:
            if len(ln) < 3:
                raise LineTooSmall(f"stored line {ln} has fewer than 3 points")
            if len(set(ln)) != len(ln):
                raise DuplicatePointInLine(f"line {ln} repeats a point")
            if ln[0] < 0 or ln[-1] >= self.n_points:
                raise PointOutOfRange(f"line {ln} leaves 0..{self.n_points - 1}")
            if tuple(sorted(ln)) != ln:
                raise ValidationError(f"line {ln} is not sorted")
            if prev is not None and ln <= prev:
                raise ValidationError("lines are not in canonical sorted order")
            prev = ln
            for pair in combinations(ln, 2):
                if pair in seen:
                    raise TwoLinesShareTwoPoints(
                        f"lines {seen[pair]} and {ln} share points {pair}"
                    )
                seen[pair] = ln


def validate(n_points: int, lines) -> LinearSpace:
    """Normalize untrusted input and return the canonical LinearSpace.

    Declared 2-point lines carry no information (they are trivial lines) and
    are dropped with a warning, as are exact duplicate lines.  Any violation
    of the axioms raises a ValidationError subclass.
    """
    if n_points < 0:
        raise ValidationError(f"negative point count {n_points}")
    normalized: list[Line] = []
    for raw in lines:
        pts = tuple(raw)
        if len(set(pts)) != len(pts):
            raise DuplicatePointInLine(f"line {pts} repeats a point")
        if len(pts) < 2:
            raise LineTooSmall(f"line {pts} has fewer than 2 points")
        for p in pts:
            if not 0 <= p < n_points:
                raise PointOutOfRange(f"point {p} outside 0..{n_points - 1}")
        normalized.append(tuple(sorted(pts)))

    dropped = sum(1 for ln in normalized if len(ln) == 2)
    kept = [ln for ln in normalized if len(ln) >= 3]
    duplicates = len(kept) - len(set(kept))
    if dropped:
        warnings.warn(f"dropped {dropped} trivial 2-point line(s)", stacklevel=2)
    if duplicates:
        warnings.warn(f"dropped {duplicates} duplicate line(s)", stacklevel=2)
    return LinearSpace(n_points, tuple(sorted(set(kept))))


def _check_point(space: LinearSpace, p: int) -> None:
    if not 0 <= p < space.n_points:
        raise PointOutOfRange(f"point {p} outside 0..{space.n_points - 1}")


@lru_cache(maxsize=4096)
def all_lines(space: LinearSpace) -> tuple[Line, ...]:
    """Stored lines plus one trivial 2-point line per uncovered point pair.

    The result partitions the set of point pairs: every pair lies in exactly
    one member.
    """
    covered: set[tuple[int, int]] = set()
    for ln in space.lines:
        covered.update(combinations(ln, 2))
    trivial = [
        pair for pair in combinations(range(space.n_points), 2) if pair not in covered
    ]
    return tuple(sorted(space.lines + tuple(trivial)))


@lru_cache(maxsize=4096)
def _pair_line(space: LinearSpace) -> dict[tuple[int, int], Line]:
    """Map each point pair covered by a stored line to that line."""
    table: dict[tuple[int, int], Line] = {}
    for ln in space.lines:
        for pair in combinations(ln, 2):
            table[pair] = ln
    return table


def line_through(space: LinearSpace, x: Point, y: Point) -> Line:
    """The unique line joining two distinct points (trivial if unstored)."""
    _check_point(space, x)
    _check_point(space, y)
    if x == y:
        raise EqualPoints(f"line through equal points {x}")
    pair = (x, y) if x < y else (y, x)
    return _pair_line(space).get(pair, pair)


def collinear(space: LinearSpace, x: Point, y: Point, z: Point) -> bool:
    """Symmetric ternary collinearity; degenerate triples are collinear."""
    for p in (x, y, z):
        _check_point(space, p)
    if x == y or x == z or y == z:
        return True
    pair = (x, y) if x < y else (y, x)
    ln = _pair_line(space).get(pair)
    return ln is not None and z in ln


def degrees(space: LinearSpace) -> tuple[tuple[int, ...], tuple[int, ...], int]:
    """Per-point degrees, per-line degrees (over all lines), space degree.

    A point's degree counts the lines through it including implicit trivial
    ones; a line's degree is its cardinality; the space degree is the
    maximum of both.
    """
    lines = all_lines(space)
    per_point = [0] * space.n_points
    for ln in lines:
        for p in ln:
            per_point[p] += 1
    per_line = tuple(len(ln) for ln in lines)
    best = max((max(per_point, default=0), max(per_line, default=0)), default=0)
    return tuple(per_point), per_line, best


def is_independent(space: LinearSpace, points) -> bool:
    """True when no stored line contains three points of the given set."""
    pts = set(points)
    for p in pts:
        _check_point(space, p)
    return all(len(pts.intersection(ln)) < 3 for ln in space.lines)


def _has_independent_quad(space: LinearSpace) -> bool:
    # Brute force over 4-subsets; fine at desk scale.
    return any(
        is_independent(space, quad)
        for quad in combinations(range(space.n_points), 4)
    )


def parallel_pair_count(space: LinearSpace) -> int:
    """Number of disjoint pairs in all_lines, without materializing them.

    Two distinct lines share at most one point, so the meeting pairs are
    counted exactly by summing C(deg(x), 2) over points x.
    """
    per_point, _, _ = degrees(space)
    total = len(all_lines(space))
    meeting = sum(d * (d - 1) // 2 for d in per_point)
    return total * (total - 1) // 2 - meeting


def is_closed(space: LinearSpace) -> bool:
    """True when every two lines (trivial ones included) intersect."""
    return parallel_pair_count(space) == 0


def parallel_pairs(space: LinearSpace) -> tuple[tuple[Line, Line], ...]:
    """All unordered pairs of disjoint lines, in canonical order."""
    lines = all_lines(space)
    out = []
    for i, ln in enumerate(lines):
        pts = set(ln)
        for other in lines[i + 1 :]:
            if pts.isdisjoint(other):
                out.append((ln, other))
    return tuple(out)


@dataclass(frozen=True)
class ShapeReport:
    """Classification flags for a linear space."""

    is_trivial: bool
    is_line: bool
    is_near_pencil: bool
    is_pentagon: bool
    is_degenerate: bool
    is_closed: bool
    is_projective_plane: bool
    degree: int
    order: int | None


def classify_shape(space: LinearSpace) -> ShapeReport:
    """Compute all shape predicates.

    Degeneracy is decided by exhaustive search for an independent 4-set;
    closedness over all lines including trivial ones.  A projective plane is
    a non-degenerate closed plane, and its order is the degree minus one.
    """
    n = space.n_points
    _, _, degree = degrees(space)
    trivial = not space.lines
    # A single line: all points collinear (spaces with <= 2 points count).
    line_shape = n <= 2 or any(len(ln) == n for ln in space.lines)
    near_pencil = n >= 4 and any(len(ln) == n - 1 for ln in space.lines)
    pentagon = n == 5 and trivial
    degenerate = not _has_independent_quad(space)
    closed = is_closed(space)
    projective = closed and not degenerate
    return ShapeReport(
        is_trivial=trivial,
        is_line=line_shape,
        is_near_pencil=near_pencil,
        is_pentagon=pentagon,
        is_degenerate=degenerate,
        is_closed=closed,
        is_projective_plane=projective,
        degree=degree,
        order=degree - 1 if projective else None,
    )


def dual(space: LinearSpace) -> LinearSpace:
    """Interchange points and lines of a closed space.

    Points of the dual are the lines of ``all_lines(space)``, in canonical
    order; lines of the dual are the pencils of the points of degree >= 3.
    """
    if not is_closed(space):
        raise NotClosed("dual requires a closed space")
    per_point, _, _ = degrees(space)
    if any(d < 2 for d in per_point):
        raise PointDegreeBelowTwo("dual requires every point on >= 2 lines")
    lines = all_lines(space)
    index = {ln: i for i, ln in enumerate(lines)}
    pencils = []
    for p in range(space.n_points):
        if per_point[p] >= 3:
            pencils.append(tuple(sorted(index[ln] for ln in lines if p in ln)))
    return LinearSpace(len(lines), tuple(sorted(pencils)))


def induced(space: LinearSpace, points) -> LinearSpace:
    """Induced substructure on a point subset, relabelled to 0..k-1."""
    pts = sorted(set(points))
    for p in pts:
        _check_point(space, p)
    rename = {p: i for i, p in enumerate(pts)}
    keep = set(pts)
    lines = []
    for ln in space.lines:
        inside = keep.intersection(ln)
        if len(inside) >= 3:
            lines.append(tuple(sorted(rename[p] for p in inside)))
    return LinearSpace(len(pts), tuple(sorted(lines)))


def relabel(space: LinearSpace, perm) -> LinearSpace:
    """Apply a point permutation (old id -> new id)."""
    lines = tuple(
        sorted(tuple(sorted(perm[p] for p in ln)) for ln in space.lines)
    )
    return LinearSpace(space.n_points, lines)
