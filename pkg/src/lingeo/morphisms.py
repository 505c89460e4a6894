"""Partial maps, embedding and automorphism search, homogeneity testing."""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations

from .core import (
    GeometryError,
    LinearSpace,
    Line,
    classify_shape,
    degrees,
    induced,
)

DEFAULT_POINT_BUDGET = 25
_BUDGET_ENV = "LINGEO_POINT_BUDGET"


class MalformedMap(GeometryError):
    pass


class NotPartialIsomorphism(GeometryError):
    pass


class NotAnEmbedding(GeometryError):
    pass


class SearchBudgetExceeded(GeometryError):
    pass


class DegreeTooSmall(GeometryError):
    pass


def point_budget() -> int:
    return int(os.environ.get(_BUDGET_ENV, DEFAULT_POINT_BUDGET))


@dataclass(frozen=True)
class PartialMap:
    """Injective partial map between the point sets of two spaces.

    Injectivity and range membership are enforced here; being a partial
    isomorphism is a property to test, so raw candidate maps stay
    representable and failures can be reported.
    """

    source: LinearSpace
    target: LinearSpace
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        srcs = [s for s, _ in self.pairs]
        tgts = [t for _, t in self.pairs]
        if len(set(srcs)) != len(srcs):
            raise MalformedMap("map assigns a source point twice")
        if len(set(tgts)) != len(tgts):
            raise MalformedMap("map is not injective")
        if any(not 0 <= s < self.source.n_points for s in srcs):
            raise MalformedMap("source point out of range")
        if any(not 0 <= t < self.target.n_points for t in tgts):
            raise MalformedMap("target point out of range")
        if tuple(sorted(self.pairs)) != self.pairs:
            raise MalformedMap("pairs must be sorted by source point")

    @classmethod
    def from_dict(cls, source: LinearSpace, target: LinearSpace, mapping) -> "PartialMap":
        return cls(source, target, tuple(sorted(mapping.items())))

    @property
    def mapping(self) -> dict[int, int]:
        return dict(self.pairs)

    @property
    def domain(self) -> tuple[int, ...]:
        return tuple(s for s, _ in self.pairs)

    def __call__(self, p: int) -> int:
        return self.mapping[p]


@lru_cache(maxsize=2048)
def _pair_masks(space: LinearSpace) -> tuple[tuple[int, ...], ...]:
    """masks[x][y] = point bitmask of the stored line through x,y (0 if trivial)."""
    n = space.n_points
    masks = [[0] * n for _ in range(n)]
    for ln in space.lines:
        bits = 0
        for p in ln:
            bits |= 1 << p
        for x, y in combinations(ln, 2):
            masks[x][y] = bits
            masks[y][x] = bits
    return tuple(tuple(row) for row in masks)


@lru_cache(maxsize=2048)
def _profile(space: LinearSpace):
    """(pair masks, per-point degree, per-point stored line sizes desc)."""
    masks = _pair_masks(space)
    per_point, _, _ = degrees(space)
    sizes: list[list[int]] = [[] for _ in range(space.n_points)]
    for ln in space.lines:
        for p in ln:
            sizes[p].append(len(ln))
    line_sizes = tuple(tuple(sorted(s, reverse=True)) for s in sizes)
    return masks, per_point, line_sizes


def is_partial_isomorphism(m: PartialMap) -> bool:
    """Collinearity preserved and reflected on every triple of the domain."""
    dom = m.domain
    f = m.mapping
    pa, pb = _pair_masks(m.source), _pair_masks(m.target)
    for x, y, z in combinations(dom, 3):
        if ((pa[x][y] >> z) & 1) != ((pb[f[x]][f[y]] >> f[z]) & 1):
            return False
    return True


def is_embedding(m: PartialMap) -> bool:
    """Total on the source, injective, collinearity-preserving/reflecting."""
    return len(m.pairs) == m.source.n_points and is_partial_isomorphism(m)


def _dominates(big: tuple[int, ...], small: tuple[int, ...]) -> bool:
    # Both sorted descending; the greedy positional check decides whether the
    # entries of small can be matched injectively to >=-sized entries of big.
    if len(big) < len(small):
        return False
    return all(b >= s for b, s in zip(big, small))


def _search_order(a: LinearSpace, fixed: tuple[int, ...]) -> list[int]:
    """Static assignment order: constrained points first, connected next."""
    masks, degree, line_sizes = _profile(a)
    pool = [p for p in range(a.n_points) if p not in fixed]
    pool.sort(key=lambda p: (-len(line_sizes[p]), -degree[p], p))
    order: list[int] = []
    placed = set(fixed)
    while pool:
        pick = next((p for p in pool if any(masks[p][q] for q in placed)), pool[0])
        pool.remove(pick)
        order.append(pick)
        placed.add(pick)
    return order


def _match(
    a: LinearSpace,
    b: LinearSpace,
    initial: dict[int, int] | None = None,
    limit: int | None = None,
):
    """Complete backtracking search for embeddings of a into b.

    Yields mapping dicts extending ``initial``, in a deterministic order.
    Candidates are pruned by point degree and by domination of the multiset
    of incident stored-line sizes; each partial assignment keeps
    collinearity preserved and reflected on all placed triples.
    """
    initial = dict(initial or {})
    if a.n_points > b.n_points:
        return
    masks_a, deg_a, sizes_a = _profile(a)
    masks_b, deg_b, sizes_b = _profile(b)
    feasible = [
        [
            y
            for y in range(b.n_points)
            if deg_b[y] >= deg_a[x] and _dominates(sizes_b[y], sizes_a[x])
        ]
        for x in range(a.n_points)
    ]
    for x, y in initial.items():
        if y not in feasible[x]:
            return

    fixed = tuple(sorted(initial))
    for x, y, z in combinations(fixed, 3):
        fx, fy, fz = initial[x], initial[y], initial[z]
        if ((masks_a[x][y] >> z) & 1) != ((masks_b[fx][fy] >> fz) & 1):
            return

    order = _search_order(a, fixed)
    assigned = list(fixed)
    asg = dict(initial)
    used = set(initial.values())
    img_mask = 0
    for t in initial.values():
        img_mask |= 1 << t

    def consistent(x: int, y: int) -> bool:
        # For every assigned u: the other assigned points on the stored line
        # through (x, u) must map exactly onto the other assigned images on
        # the stored line through (y, asg[u]).
        for u in assigned:
            v = asg[u]
            want = masks_b[y][v] & img_mask & ~(1 << v)
            bits = masks_a[x][u]
            got = 0
            if bits:
                for w in assigned:
                    if w != u and (bits >> w) & 1:
                        got |= 1 << asg[w]
            if got != want:
                return False
        return True

    n_order = len(order)
    found = 0

    def dfs(depth: int):
        nonlocal found, img_mask
        if depth == n_order:
            found += 1
            yield dict(asg)
            return
        x = order[depth]
        for y in feasible[x]:
            if y in used or not consistent(x, y):
                continue
            asg[x] = y
            used.add(y)
            assigned.append(x)
            img_mask |= 1 << y
            yield from dfs(depth + 1)
            img_mask &= ~(1 << y)
            assigned.pop()
            used.discard(y)
            del asg[x]
            if limit is not None and found >= limit:
                return

    yield from dfs(0)


def find_embeddings(
    a: LinearSpace, b: LinearSpace, limit: int | None = None
) -> list[PartialMap]:
    """Up to ``limit`` embeddings of a into b.

    The search is complete: an empty list with the limit not reached means
    no embedding exists.
    """
    return [PartialMap.from_dict(a, b, m) for m in _match(a, b, limit=limit)]


def is_isomorphic(a: LinearSpace, b: LinearSpace) -> PartialMap | None:
    """An isomorphism if one exists, else None."""
    if a.n_points != b.n_points or len(a.lines) != len(b.lines):
        return None
    if sorted(map(len, a.lines)) != sorted(map(len, b.lines)):
        return None
    da, _, _ = degrees(a)
    db, _, _ = degrees(b)
    if sorted(da) != sorted(db):
        return None
    found = find_embeddings(a, b, limit=1)
    return found[0] if found else None


@lru_cache(maxsize=512)
def automorphisms(a: LinearSpace, budget: int | None = None) -> tuple[PartialMap, ...]:
    """The full automorphism group, in a deterministic order."""
    cap = budget if budget is not None else point_budget()
    if a.n_points > cap:
        raise SearchBudgetExceeded(
            f"{a.n_points} points exceeds the {cap}-point automorphism budget"
        )
    return tuple(find_embeddings(a, a, limit=None))


def extend_to_automorphism(m: PartialMap) -> PartialMap | None:
    """An automorphism extending m, or None; the backtracking is complete."""
    if m.source != m.target:
        raise ValueError("extension requires source and target to coincide")
    if not is_partial_isomorphism(m):
        raise NotPartialIsomorphism("map does not preserve induced structure")
    for mapping in _match(m.source, m.source, initial=m.mapping, limit=1):
        return PartialMap.from_dict(m.source, m.source, mapping)
    return None


@dataclass(frozen=True)
class HomogeneityResult:
    homogeneous: bool
    witness: PartialMap | None

    def __bool__(self) -> bool:
        return self.homogeneous


def is_homogeneous(a: LinearSpace, budget: int | None = None) -> HomogeneityResult:
    """Decide whether every partial isomorphism a -> a extends.

    Domain subsets are scanned by ascending size in lexicographic order,
    pruned to one representative per automorphism orbit.  For a domain D the
    extendable maps are exactly the restrictions of the automorphism group
    to D, so it suffices to check that every embedding of the induced
    substructure lands in that restriction set.  On failure the witness has
    the smallest possible domain and the least image tuple on it.
    """
    cap = budget if budget is not None else point_budget()
    if a.n_points > cap:
        raise SearchBudgetExceeded(
            f"{a.n_points} points exceeds the {cap}-point homogeneity budget"
        )
    n = a.n_points
    maps = [g.mapping for g in automorphisms(a, budget=budget)]
    covered: set[tuple[int, ...]] = set()
    for size in range(1, n):
        for subset in combinations(range(n), size):
            if subset in covered:
                continue
            covered.update(tuple(sorted(g[p] for p in subset)) for g in maps)
            restrictions = {tuple(g[p] for p in subset) for g in maps}
            sub = induced(a, subset)
            bad = []
            for emb in _match(sub, a):
                image = tuple(emb[i] for i in range(size))
                if image not in restrictions:
                    bad.append(image)
            if bad:
                witness = PartialMap.from_dict(a, a, dict(zip(subset, min(bad))))
                return HomogeneityResult(False, witness)
    return HomogeneityResult(True, None)


def is_homogeneous_bruteforce(a: LinearSpace) -> bool:
    """Oracle: all subsets, all injections, no orbit pruning."""
    n = a.n_points
    maps = [g.mapping for g in automorphisms(a)]
    for size in range(1, n + 1):
        for subset in combinations(range(n), size):
            restrictions = {tuple(g[p] for p in subset) for g in maps}
            for image in permutations(range(n), size):
                m = PartialMap.from_dict(a, a, dict(zip(subset, image)))
                if is_partial_isomorphism(m) and image not in restrictions:
                    return False
    return True


def nonhomogeneity_witness_deg5(plane: LinearSpace) -> PartialMap:
    """A 6-point partial isomorphism of a degree->4 plane with no extension.

    Take a line (the horizon) with points s != t on it, three further lines
    through s and two lines K0, K1 through t.  The six off-horizon
    intersection points induce exactly two parallel 3-point lines (one
    inside each K).  Replacing one point of the K0 triple by a fifth point
    of K0 preserves the induced structure, but no automorphism realizes the
    swap: the two untouched lines through s pin s, while the image of the
    moved line must meet them away from the horizon.
    """
    shape = classify_shape(plane)
    if not shape.is_projective_plane:
        raise ValueError("witness construction requires a projective plane")
    if shape.degree <= 4:
        raise DegreeTooSmall(f"plane degree {shape.degree} is not > 4")

    horizon = plane.lines[0]
    s, t = horizon[0], horizon[1]
    through_s = [ln for ln in plane.lines if s in ln and ln != horizon][:3]
    through_t = [ln for ln in plane.lines if t in ln and ln != horizon][:2]
    assert len(through_s) == 3 and len(through_t) == 2

    def meet(l1: Line, l2: Line) -> int:
        common = set(l1) & set(l2)
        assert len(common) == 1
        return common.pop()

    xs = {
        (i, j): meet(li, kj)
        for i, li in enumerate(through_s)
        for j, kj in enumerate(through_t)
    }
    six = sorted(xs.values())
    assert len(set(six)) == 6
    k0 = through_t[0]
    banned = {xs[(0, 0)], xs[(1, 0)], xs[(2, 0)], t}
    y = min(p for p in k0 if p not in banned)

    mapping = {p: p for p in six}
    mapping[xs[(0, 0)]] = y
    witness = PartialMap.from_dict(plane, plane, mapping)
    assert is_partial_isomorphism(witness)
    return witness
