"""Planarisation calculus: intersection-point extensions and planar closure.

An elementary planarisation adds one point at which two previously parallel
lines meet.  Iterating such steps yields planarisations; the planar closure
of a point set inside an ambient space is the least superset closed under
taking intersection points of its lines, and an embedding is aplanar when
its image equals its own closure.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple

from .core import (
    GeometryError,
    LinearSpace,
    Line,
    _check_point,
    all_lines,
    induced,
    is_closed,
    is_independent,
    line_through,
    parallel_pair_count,
    parallel_pairs,
)
from .morphisms import NotAnEmbedding, PartialMap, SearchBudgetExceeded, is_embedding


class LinesNotParallel(GeometryError):
    pass


class UnknownLine(GeometryError):
    pass


class PairNotParallel(GeometryError):
    pass


class DuplicatePair(GeometryError):
    pass


class NotPairwiseParallel(GeometryError):
    pass


class FewerThanThreeLines(GeometryError):
    pass


@dataclass(frozen=True)
class ElementaryStep:
    """One added point and the pre-step lines extended through it."""

    new_point: int
    intersected_lines: tuple[Line, ...]
    trivial: bool


@dataclass(frozen=True)
class PlanarisationTrace:
    """Ordered record of elementary steps from a base space."""

    base: LinearSpace
    steps: tuple[ElementaryStep, ...]
    result: LinearSpace

    def replay(self) -> LinearSpace:
        """Re-apply the steps, re-checking each precondition."""
        space = self.base
        for step in self.steps:
            space = _extend_on_lines(space, step.intersected_lines)
        return space


def _normalize_line(space: LinearSpace, line) -> Line:
    ln = tuple(sorted(line))
    if ln not in set(all_lines(space)):
        raise UnknownLine(f"{ln} is not a line of the space")
    return ln


def _extend_on_lines(space: LinearSpace, lines: tuple[Line, ...]) -> LinearSpace:
    """Add one point lying on the extension of each given pairwise parallel line."""
    for l1, l2 in combinations(lines, 2):
        if set(l1) & set(l2):
            raise LinesNotParallel(f"{l1} and {l2} intersect")
    new_point = space.n_points
    extended = {ln: tuple(sorted(ln + (new_point,))) for ln in lines}
    stored = [extended.get(ln, ln) for ln in space.lines]
    stored.extend(ext for ln, ext in extended.items() if len(ln) == 2)
    return LinearSpace(space.n_points + 1, tuple(sorted(stored)))


def elementary_planarisation(
    space: LinearSpace, l1, l2
) -> tuple[LinearSpace, ElementaryStep]:
    """Add the intersection point of two parallel lines (a trivial step)."""
    a = _normalize_line(space, l1)
    b = _normalize_line(space, l2)
    if a == b:
        raise LinesNotParallel(f"{a} given twice")
    if set(a) & set(b):
        raise LinesNotParallel(f"{a} and {b} intersect")
    result = _extend_on_lines(space, (a, b))
    step = ElementaryStep(space.n_points, tuple(sorted((a, b))), trivial=True)
    return result, step


def _trivial_planarisation_steps(
    space: LinearSpace, pairs
) -> tuple[LinearSpace, tuple[ElementaryStep, ...]]:
    seen = set()
    normalized: list[tuple[Line, Line]] = []
    for l1, l2 in pairs:
        a = _normalize_line(space, l1)
        b = _normalize_line(space, l2)
        key = (a, b) if a < b else (b, a)
        if key[0] == key[1]:
            raise PairNotParallel(f"{a} paired with itself")
        if set(a) & set(b):
            raise PairNotParallel(f"{a} and {b} intersect")
        if key in seen:
            raise DuplicatePair(f"pair {key} listed twice")
        seen.add(key)
        normalized.append(key)

    # New points are numbered by the sorted order of the pairs they resolve.
    normalized.sort()
    current = space
    steps = []
    for a, b in normalized:
        # The lines may have been extended by earlier points of this batch.
        ext_a = line_through(current, a[0], a[1])
        ext_b = line_through(current, b[0], b[1])
        step = ElementaryStep(current.n_points, (ext_a, ext_b), trivial=True)
        current = _extend_on_lines(current, (ext_a, ext_b))
        steps.append(step)
    return current, tuple(steps)


def trivial_planarisation(space: LinearSpace, pairs) -> LinearSpace:
    """Add one intersection point per listed parallel pair.

    Distinct pairs may share a line; every new point lands on that line's
    single extension.  Parallel pairs not listed remain parallel, and all
    lines joining new points to anything else are trivial.
    """
    result, _ = _trivial_planarisation_steps(space, pairs)
    return result


def concurrent_planarisation(space: LinearSpace, lines) -> LinearSpace:
    """Make >= 3 pairwise parallel lines concurrent at one new point."""
    normalized = tuple(sorted(_normalize_line(space, ln) for ln in lines))
    if len(normalized) < 3:
        raise FewerThanThreeLines(f"got {len(normalized)} lines, need at least 3")
    if len(set(normalized)) != len(normalized):
        raise NotPairwiseParallel("a line is listed twice")
    for a, b in combinations(normalized, 2):
        if set(a) & set(b):
            raise NotPairwiseParallel(f"{a} and {b} intersect")
    return _extend_on_lines(space, normalized)


def _concurrent_with_step(
    space: LinearSpace, lines
) -> tuple[LinearSpace, ElementaryStep]:
    result = concurrent_planarisation(space, lines)
    step = ElementaryStep(
        space.n_points, tuple(sorted(tuple(sorted(ln)) for ln in lines)), trivial=False
    )
    return result, step


def planar_closure(points, space: LinearSpace) -> tuple[int, ...]:
    """Least superset closed under intersections (in the ambient space) of
    the lines spanned by its points.  A closure operator: extensive,
    monotone, idempotent."""
    current = set(points)
    for p in current:
        _check_point(space, p)
    while True:
        spanned = {line_through(space, x, y) for x, y in combinations(sorted(current), 2)}
        lines = sorted(spanned)
        grown = set(current)
        for i, ln in enumerate(lines):
            pts = set(ln)
            for other in lines[i + 1 :]:
                grown.update(pts & set(other))
        if grown == current:
            return tuple(sorted(current))
        current = grown


def is_aplanar(points, space: LinearSpace) -> bool:
    """True when the point set equals its own planar closure."""
    pts = tuple(sorted(set(points)))
    return planar_closure(pts, space) == pts


def is_planarisation(a: LinearSpace, b: LinearSpace, embedding: PartialMap) -> bool:
    """True when b is generated from the embedded copy of a by intersection
    points alone, i.e. the planar closure of the image is all of b."""
    if embedding.source != a or embedding.target != b or not is_embedding(embedding):
        raise NotAnEmbedding("map is not an embedding of a into b")
    image = [t for _, t in embedding.pairs]
    return planar_closure(image, b) == tuple(range(b.n_points))


class CompletionResult(NamedTuple):
    space: LinearSpace
    closed: bool
    rounds_used: int


def projective_completion(
    space: LinearSpace, max_rounds: int, point_budget: int | None = None
) -> CompletionResult:
    """Iterate rounds of resolving all current parallel pairs at once.

    A degenerate input first gets the minimum number of free points needed
    to create an independent 4-set.  Each round adds one point per parallel
    pair, so every pair of lines present before a round intersects after it;
    the free completion of a non-closed space is infinite, so the iteration
    truncates at ``max_rounds`` and reports whether the result is closed.
    ``point_budget`` guards against the combinatorial growth of rounds.
    """
    current = _nondegeneracy_fix(space)
    rounds = 0
    while rounds < max_rounds and not is_closed(current):
        new_points = parallel_pair_count(current)
        if point_budget is not None and current.n_points + new_points > point_budget:
            raise SearchBudgetExceeded(
                f"round {rounds + 1} needs {new_points} new points on top of "
                f"{current.n_points}, exceeding the budget of {point_budget}"
            )
        current = trivial_planarisation(current, parallel_pairs(current))
        rounds += 1
    return CompletionResult(current, is_closed(current), rounds)


def _nondegeneracy_fix(space: LinearSpace) -> LinearSpace:
    """Add the fewest free points that create an independent 4-set."""
    best = 0
    for size in (4, 3, 2, 1):
        if size > space.n_points:
            continue
        if any(
            is_independent(space, sub)
            for sub in combinations(range(space.n_points), size)
        ):
            best = size
            break
    missing = 4 - best
    if missing <= 0:
        return space
    return LinearSpace(space.n_points + missing, space.lines)
