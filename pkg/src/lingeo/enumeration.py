"""Canonical forms, isomorph-free generation, class filters, maximality."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from . import pg
from .core import GeometryError, LinearSpace, all_lines, degrees, relabel
from .morphisms import (
    PartialMap,
    SearchBudgetExceeded,
    automorphisms,
    find_embeddings,
    is_homogeneous,
    _pair_masks,
)

CANONICAL_POINT_CAP = 13
FULL_CLASS_CAP = 9
DEGREE_CLASS_CAP = 13


def _canonical_search(space: LinearSpace) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Lexicographically least triple-collinearity encoding over relabellings.

    Labels are assigned one at a time; assigning label m appends the block
    of collinearity bits for the triples (i, j, m), i < j < m, so partial
    encodings are comparable prefix-wise and branches that exceed the best
    known encoding are cut.  Automorphisms discovered at equal-encoding
    leaves prune symmetric branches, which keeps highly regular spaces
    (where every prefix ties) tractable.

    Returns (blocks, permutation old->new label).
    """
    n = space.n_points
    masks = _pair_masks(space)

    best_blocks: list[int] | None = None
    best_assign: list[int] | None = None
    autos: list[tuple[int, ...]] = []

    assign: list[int] = []
    used = [False] * n
    blocks: list[int] = []

    def block_of(candidate: int) -> int:
        bits = 0
        pos = 0
        for i in range(len(assign)):
            row = masks[assign[i]]
            for j in range(i + 1, len(assign)):
                if (row[assign[j]] >> candidate) & 1:
                    bits |= 1 << pos
                pos += 1
        return bits

    def stabilizer_orbits(candidates: list[int]) -> list[int]:
        fixing = [
            g
            for g in autos
            if all(g[p] == p for p in assign)
        ]
        if not fixing:
            return candidates
        seen: set[int] = set()
        reps = []
        for c in candidates:
            if c in seen:
                continue
            reps.append(c)
            frontier = {c}
            while frontier:
                nxt = {g[p] for g in fixing for p in frontier} - seen - frontier
                seen.update(frontier)
                frontier = nxt
        return reps

    def dfs(tight: bool) -> None:
        nonlocal best_blocks, best_assign
        depth = len(assign)
        if depth == n:
            if best_blocks is None or blocks < best_blocks:
                best_blocks = list(blocks)
                best_assign = list(assign)
            elif blocks == best_blocks and best_assign is not None:
                inverse = [0] * n
                for label, point in enumerate(best_assign):
                    inverse[point] = label
                g = tuple(assign[inverse[p]] for p in range(n))
                if any(g[p] != p for p in range(n)):
                    autos.append(g)
            return
        candidates = [p for p in range(n) if not used[p]]
        candidates = stabilizer_orbits(candidates)
        scored = sorted((block_of(p), p) for p in candidates)
        for bits, p in scored:
            child_tight = tight
            if tight and best_blocks is not None:
                ref = best_blocks[depth]
                if bits > ref:
                    break  # scored ascending: everything after is worse
                child_tight = bits == ref
            assign.append(p)
            used[p] = True
            blocks.append(bits)
            dfs(child_tight)
            blocks.pop()
            used[p] = False
            assign.pop()

    dfs(True)
    assert best_blocks is not None and best_assign is not None
    perm = [0] * n
    for label, point in enumerate(best_assign):
        perm[point] = label
    return tuple(best_blocks), tuple(perm)


@lru_cache(maxsize=65536)
def canonical_form(space: LinearSpace) -> bytes:
    """Relabelling-invariant encoding; equal bytes iff isomorphic spaces."""
    if space.n_points > CANONICAL_POINT_CAP:
        raise SearchBudgetExceeded(
            f"canonical form capped at {CANONICAL_POINT_CAP} points"
        )
    blocks, _ = _canonical_search(space)
    payload = ",".join(str(b) for b in blocks)
    return f"{space.n_points}|{payload}".encode()


def canonical_space(space: LinearSpace) -> LinearSpace:
    """The canonical representative (relabelled copy) of a space."""
    if space.n_points > CANONICAL_POINT_CAP:
        raise SearchBudgetExceeded(
            f"canonical form capped at {CANONICAL_POINT_CAP} points"
        )
    _, perm = _canonical_search(space)
    return relabel(space, perm)


@dataclass(frozen=True)
class ClassSpec:
    """A hereditary-style class filter for generation and AP checking."""

    name: str
    max_degree: int | None = None
    exclusions: tuple[bytes, ...] = ()

    def contains(self, space: LinearSpace) -> bool:
        if self.max_degree is not None:
            _, _, degree = degrees(space)
            if degree > self.max_degree:
                return False
        if self.exclusions and canonical_form(space) in self.exclusions:
            return False
        return True


def class_all() -> ClassSpec:
    return ClassSpec(name="all")


def class_degree_at_most(n: int) -> ClassSpec:
    return ClassSpec(name=f"degree<={n}", max_degree=n)


@lru_cache(maxsize=None)
def class_p4_star() -> ClassSpec:
    """Degree <= 4 with the 7-point plane and the pentagon excluded."""
    fano = canonical_form(pg.projective_plane(2))
    pentagon = canonical_form(LinearSpace(5, ()))
    return ClassSpec(name="degree<=4 star", max_degree=4, exclusions=(fano, pentagon))


def class_by_name(name: str) -> ClassSpec:
    table = {
        "all": class_all(),
        "d3": class_degree_at_most(3),
        "d4": class_degree_at_most(4),
        "d4star": class_p4_star(),
    }
    if name not in table:
        raise GeometryError(f"unknown class {name!r}; pick from {sorted(table)}")
    return table[name]


def _candidate_lines(n: int, max_degree: int | None) -> list[tuple[int, ...]]:
    cap = n if max_degree is None else min(n, max_degree)
    out = []
    for size in range(3, cap + 1):
        out.extend(combinations(range(n), size))
    return out


def _degree_feasible(space: LinearSpace, max_degree: int | None) -> bool:
    """Optimistic test: can further lines bring every point degree in bound?

    A point's degree is its stored-line count plus one trivial line per
    uncovered partner; a future line of size s absorbs s-1 partners for one
    extra degree, so the least achievable degree is stored + ceil(remaining
    / (cap - 1)).
    """
    if max_degree is None:
        return True
    n = space.n_points
    stored = [0] * n
    covered = [0] * n
    for ln in space.lines:
        if len(ln) > max_degree:
            return False
        for p in ln:
            stored[p] += 1
            covered[p] += len(ln) - 1
    absorb = max_degree - 1
    for p in range(n):
        remaining = (n - 1) - covered[p]
        extra = -(-remaining // absorb) if remaining > 0 else 0
        if stored[p] + extra > max_degree:
            return False
    return True


def enumerate_spaces(n: int, spec: ClassSpec | None = None) -> list[LinearSpace]:
    """One canonical representative per isomorphism class of n-point spaces
    in the class, in a deterministic order.

    Generation proceeds by line count: every representative is augmented by
    every admissible new line and the children are reduced to canonical
    forms, so each class with k+1 lines is reached from the class of one of
    its k-line subsets.
    """
    return list(_enumerate_spaces(n, spec or class_all()))


@lru_cache(maxsize=256)
def _enumerate_spaces(n: int, spec: ClassSpec) -> tuple[LinearSpace, ...]:
    cap = FULL_CLASS_CAP if spec.max_degree is None else DEGREE_CLASS_CAP
    if n > cap:
        raise SearchBudgetExceeded(f"enumeration capped at {cap} points for {spec.name}")
    if n < 0:
        raise GeometryError("negative point count")

    empty = LinearSpace(n, ())
    level = {canonical_form(empty): empty}
    collected: dict[bytes, LinearSpace] = {}
    if _degree_feasible(empty, spec.max_degree):
        collected.update(level)
    candidates = _candidate_lines(n, spec.max_degree)

    while level:
        next_level: dict[bytes, LinearSpace] = {}
        for space in level.values():
            taken = set()
            for ln in space.lines:
                taken.update(combinations(ln, 2))
            for cand in candidates:
                pairs = list(combinations(cand, 2))
                if any(p in taken for p in pairs):
                    continue
                child = LinearSpace(n, tuple(sorted(space.lines + (cand,))))
                if not _degree_feasible(child, spec.max_degree):
                    continue
                key = canonical_form(child)
                if key not in next_level and key not in collected:
                    next_level[key] = canonical_space(child)
        collected.update(next_level)
        level = next_level

    return tuple(s for k, s in sorted(collected.items()) if spec.contains(s))


def one_point_class_extensions(
    space: LinearSpace, spec: ClassSpec | None = None
) -> list[LinearSpace]:
    """All one-point extensions (new point = n) inside the class.

    An extension is determined by the set of existing lines the new point is
    added to, which must be pairwise parallel; every other line through the
    new point is trivial.
    """
    from .planarise import _extend_on_lines  # deferred to avoid a cycle

    spec = spec or class_all()
    lines = all_lines(space)
    out = []
    for subset in _parallel_subsets(lines, spec, space.n_points):
        if subset:
            ext = _extend_on_lines(space, subset)
        else:
            ext = LinearSpace(space.n_points + 1, space.lines)
        if spec.contains(ext):
            out.append(ext)
    return out


def _parallel_subsets(lines, spec: ClassSpec, n: int):
    """Pairwise-disjoint subsets of lines, degree-capped for the new point."""
    cap = spec.max_degree
    usable = [
        ln for ln in lines if cap is None or len(ln) + 1 <= cap
    ]

    def rec(start: int, chosen: list, used: set):
        # New point degree: one line per chosen extension plus a trivial
        # line to every point not absorbed.
        if cap is not None:
            remaining = n - len(used)
            if len(chosen) + remaining > cap and len(chosen) > cap:
                return
        yield tuple(chosen)
        for i in range(start, len(usable)):
            ln = usable[i]
            if used.isdisjoint(ln):
                chosen.append(ln)
                yield from rec(i + 1, chosen, used | set(ln))
                chosen.pop()

    for subset in rec(0, [], set()):
        if cap is not None:
            degree_new = len(subset) + (n - sum(len(ln) for ln in subset))
            if degree_new > cap:
                continue
        yield subset


def is_maximal_in_class(
    space: LinearSpace, spec: ClassSpec, max_points: int
) -> bool:
    """True when no class member with more points (up to max_points)
    properly contains an embedded copy of the space.

    For degree-bounded classes the one-point-extension test decides quickly;
    where enumeration is feasible the exhaustive route is also run and the
    two must agree.
    """
    one_point = len(one_point_class_extensions(space, spec)) == 0
    cap = FULL_CLASS_CAP if spec.max_degree is None else DEGREE_CLASS_CAP
    if max_points > cap or space.n_points >= cap:
        if spec.max_degree is None:
            raise SearchBudgetExceeded(
                "exhaustive maximality needs enumeration beyond its cap"
            )
        return one_point
    exhaustive = True
    for m in range(space.n_points + 1, max_points + 1):
        for candidate in enumerate_spaces(m, spec):
            if find_embeddings(space, candidate, limit=1):
                exhaustive = False
                break
        if not exhaustive:
            break
    if spec.max_degree is not None and one_point != exhaustive:
        raise GeometryError(
            "one-point and exhaustive maximality disagree; please report"
        )
    return exhaustive


@dataclass(frozen=True)
class ClassificationRecord:
    space: LinearSpace
    homogeneous: bool
    tag: str | None
    witness: PartialMap | None


def homogeneity_tag(space: LinearSpace) -> str:
    """Tag a homogeneous space: trivial / line / fano / pg3 / other."""
    if not space.lines:
        return "trivial"
    if space.n_points <= 2 or any(len(ln) == space.n_points for ln in space.lines):
        return "line"
    if space.n_points == 7 and canonical_form(space) == canonical_form(
        pg.projective_plane(2)
    ):
        return "fano"
    if space.n_points == 13 and canonical_form(space) == canonical_form(
        pg.projective_plane(3)
    ):
        return "pg3"
    return "other"


def classify_homogeneous(max_points: int) -> list[ClassificationRecord]:
    """Test homogeneity of every space with up to max_points points.

    Returns one record per isomorphism class; homogeneous spaces carry a
    tag, failures carry a minimal non-extendable witness.
    """
    if max_points > 8:
        raise SearchBudgetExceeded("full classification capped at 8 points")
    records = []
    for n in range(1, max_points + 1):
        for space in enumerate_spaces(n):
            verdict = is_homogeneous(space)
            records.append(
                ClassificationRecord(
                    space=space,
                    homogeneous=verdict.homogeneous,
                    tag=homogeneity_tag(space) if verdict.homogeneous else None,
                    witness=verdict.witness,
                )
            )
    return records
