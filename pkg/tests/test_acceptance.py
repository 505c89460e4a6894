"""Acceptance suite: one test per criterion, each printing a verdict line.

Run with ``pytest tests/test_acceptance.py -v -rA`` to see every verdict.
Criterion 13 is expected to fail at its fourth round: the round-4 output
from the quadrilateral needs ~6.8e8 points (see the failure message), which
no desk-scale machine can materialize.  The test states the criterion
faithfully and reports the measured growth instead of weakening the check.
"""

import random
import time
from itertools import combinations, permutations

import pytest

from lingeo import (
    LinearSpace,
    PartialMap,
    all_lines,
    automorphisms,
    builtin_strategies,
    canonical_form,
    class_by_name,
    classify_homogeneous,
    classify_shape,
    degrees,
    enumerate_spaces,
    extend_to_automorphism,
    find_amalgam,
    find_embeddings,
    incompatible_planarisations,
    induced,
    is_amalgamation_base,
    is_amalgamation_base_exhaustive,
    is_closed,
    is_homogeneous,
    is_independent,
    is_partial_isomorphism,
    line_through,
    nonhomogeneity_witness_deg5,
    parallel_pairs,
    planar_closure,
    play,
    projective_completion,
    projective_plane,
    strategy_by_name,
    trivial_planarisation,
    validate,
    verify_certificate,
    verify_class_ap,
)
from lingeo.core import parallel_pair_count
from lingeo.morphisms import SearchBudgetExceeded, _match


def verdict(number: int, name: str, elapsed: float | None = None) -> None:
    stamp = f" [{elapsed:.1f}s]" if elapsed is not None else ""
    print(f"[acceptance] criterion {number:2d} ({name}): PASS{stamp}")


@pytest.mark.acceptance
def test_01_fano_construction():
    t0 = time.time()
    plane = projective_plane(2)
    per_point, per_line, degree = degrees(plane)
    assert plane.n_points == 7
    assert len(plane.lines) == 7
    assert set(per_point) == {3} and set(per_line) == {3} and degree == 3
    assert classify_shape(plane).order == 2
    elapsed = time.time() - t0
    assert elapsed < 1.0
    verdict(1, "fano construction", elapsed)


@pytest.mark.acceptance
def test_02_fano_homogeneity():
    t0 = time.time()
    plane = projective_plane(2)
    assert is_homogeneous(plane).homogeneous

    group = automorphisms(plane)
    assert len(group) == 168
    # Independent brute force over all 5040 permutations.
    brute = 0
    line_set = set(plane.lines)
    for perm in permutations(range(7)):
        if all(tuple(sorted(perm[p] for p in ln)) in line_set for ln in plane.lines):
            brute += 1
    assert brute == 168

    # Unpruned oracle for domains of size <= 4: every partial isomorphism
    # must be a restriction of some automorphism.
    restrictions_of = [g.mapping for g in group]
    for size in range(1, 5):
        for subset in combinations(range(7), size):
            allowed = {tuple(g[p] for p in subset) for g in restrictions_of}
            for image in permutations(range(7), size):
                m = PartialMap.from_dict(plane, plane, dict(zip(subset, image)))
                if is_partial_isomorphism(m):
                    assert image in allowed
    elapsed = time.time() - t0
    assert elapsed < 10.0
    verdict(2, "fano homogeneity + 168 automorphisms", elapsed)


@pytest.mark.acceptance
def test_03_pg3_homogeneity():
    t0 = time.time()
    plane = projective_plane(3)
    assert plane.n_points == 13 and len(plane.lines) == 13
    assert degrees(plane)[2] == 4
    assert is_homogeneous(plane).homogeneous

    group = automorphisms(plane)
    assert len(group) == 5616

    # Orbit-stabilizer cross-check on an ordered quadrilateral: the orbit is
    # the set of ordered independent 4-tuples the base maps onto, and the
    # stabilizer the automorphisms fixing it pointwise.
    quad = next(
        q for q in combinations(range(13), 4) if is_independent(plane, q)
    )
    stabilizer = sum(
        1 for _ in _match(plane, plane, initial={p: p for p in quad})
    )
    orbit = 0
    for target in permutations(range(13), 4):
        if not is_independent(plane, target):
            continue
        m = PartialMap.from_dict(plane, plane, dict(zip(quad, target)))
        if not is_partial_isomorphism(m):
            continue
        if extend_to_automorphism(m) is not None:
            orbit += 1
    assert orbit * stabilizer == 5616
    elapsed = time.time() - t0
    assert elapsed < 300.0
    verdict(3, "pg(2,3) homogeneity + 5616 automorphisms", elapsed)


@pytest.mark.acceptance
def test_04_degree5_witness():
    t0 = time.time()
    plane = projective_plane(4)
    witness = nonhomogeneity_witness_deg5(plane)
    assert len(witness.pairs) == 6
    assert is_partial_isomorphism(witness)
    assert extend_to_automorphism(witness) is None
    elapsed = time.time() - t0
    assert elapsed < 300.0
    verdict(4, "degree-5 witness on pg(2,4)", elapsed)


@pytest.mark.acceptance
def test_05_ap_degree3():
    t0 = time.time()
    report = verify_class_ap(class_by_name("d3"), 7)
    assert report.total_failures == 0
    assert not report.inconclusive
    assert report.bases_checked >= 9
    elapsed = time.time() - t0
    assert elapsed < 600.0
    verdict(5, "amalgamation property of degree<=3", elapsed)


@pytest.mark.acceptance
def test_06_ap_degree4_star():
    t0 = time.time()
    spec = class_by_name("d4star")
    assert not spec.contains(LinearSpace(5, ()))  # pentagon rejected
    assert not spec.contains(projective_plane(2))  # 7-point plane rejected
    report = verify_class_ap(spec, 7)
    assert report.total_failures == 0
    assert not report.inconclusive
    elapsed = time.time() - t0
    assert elapsed < 1800.0
    verdict(6, "amalgamation property of degree<=4 star", elapsed)


@pytest.mark.acceptance
def test_07_classification():
    t0 = time.time()
    records = classify_homogeneous(7)
    for record in records:
        shape = classify_shape(record.space)
        expected = (
            shape.is_trivial
            or shape.is_line
            or canonical_form(record.space) == canonical_form(projective_plane(2))
        )
        assert record.homogeneous == expected, record.space
        if record.homogeneous:
            assert record.tag in {"trivial", "line", "fano"}
        else:
            assert record.witness is not None
            assert extend_to_automorphism(record.witness) is None
        if shape.is_near_pencil:
            assert not record.homogeneous
        if shape.is_pentagon:
            # The pentagon is a trivial space, and trivial spaces are
            # homogeneous; its special role is being excluded from the
            # degree<=4 class, not failing homogeneity.
            assert record.homogeneous and record.tag == "trivial"

    direct = is_homogeneous(projective_plane(3))
    assert direct.homogeneous
    from lingeo.enumeration import homogeneity_tag

    assert homogeneity_tag(projective_plane(3)) == "pg3"
    elapsed = time.time() - t0
    verdict(7, "classification of homogeneous spaces", elapsed)


@pytest.mark.acceptance
def test_08_universality_in_degree3():
    t0 = time.time()
    fano = projective_plane(2)
    spec = class_by_name("d3")
    checked = 0
    for n in range(1, 8):
        for space in enumerate_spaces(n, spec):
            assert find_embeddings(space, fano, limit=1), space
            checked += 1
    assert checked >= 9
    verdict(8, "degree<=3 spaces embed into fano", time.time() - t0)


@pytest.mark.acceptance
def test_09_amalgamation_base_boundary():
    t0 = time.time()
    for n in range(1, 7):
        for space in enumerate_spaces(n):
            closed = is_amalgamation_base(space)
            exhaustive = is_amalgamation_base_exhaustive(space)
            assert exhaustive.is_base == closed, space
            shape = classify_shape(space)
            if not shape.is_degenerate:
                assert closed == shape.is_projective_plane, space
    verdict(9, "base boundary on <=6 points", time.time() - t0)


@pytest.mark.acceptance
def test_10_certificates():
    t0 = time.time()
    checked = 0
    for n in range(2, 7):
        for space in enumerate_spaces(n):
            if is_closed(space):
                continue
            b1, b2, cert = incompatible_planarisations(space)
            assert verify_certificate(cert, space, b1, b2), space
            # The matching search is complete for any amalgam size, which
            # subsumes the "<= 2 extra points beyond the union" bound.
            assert find_amalgam(space, b1, b2) is None, space
            checked += 1
    # The non-closed classes on 2..6 points: 1 on four points, 3 on five,
    # 8 on six.
    assert checked == 12
    verdict(10, "incompatibility certificates on <=6 points", time.time() - t0)


@pytest.mark.acceptance
def test_11_closure_laws():
    t0 = time.time()
    rng = random.Random(2024)
    planes = [projective_plane(q) for q in (2, 3, 4)]
    for _ in range(1000):
        plane = rng.choice(planes)
        n = plane.n_points
        subset = frozenset(rng.sample(range(n), rng.randrange(0, 7)))
        closure = planar_closure(subset, plane)
        assert subset <= set(closure)
        assert planar_closure(closure, plane) == closure
        extra = subset | {rng.randrange(n)}
        bigger = planar_closure(extra, plane)
        assert set(closure) <= set(bigger)

    pg3 = projective_plane(3)
    quad = next(q for q in combinations(range(13), 4) if is_independent(pg3, q))
    assert planar_closure(quad, pg3) == tuple(range(13))
    verdict(11, "closure operator laws", time.time() - t0)


@pytest.mark.acceptance
def test_12_epimorphism_property():
    t0 = time.time()
    rng = random.Random(12)
    instances = 0
    for n in range(2, 6):
        for base in enumerate_spaces(n):
            pairs = parallel_pairs(base)
            if not pairs:
                continue
            planarisations = [trivial_planarisation(base, [pairs[0]])]
            if len(pairs) >= 2:
                planarisations.append(trivial_planarisation(base, list(pairs[:2])))
            for mid in planarisations:
                for seed in range(2):
                    ambient = _grow(mid, 10, random.Random((n, seed)))
                    groups = {}
                    for emb in find_embeddings(mid, ambient):
                        key = tuple(
                            t for s, t in emb.pairs if s < base.n_points
                        )
                        groups.setdefault(key, []).append(emb)
                    for members in groups.values():
                        assert len(members) == 1
                        instances += 1
    assert instances > 50
    verdict(12, "planarisations are epimorphisms", time.time() - t0)


def _grow(space, upto, rng):
    current = space
    while current.n_points < upto:
        trivial = [ln for ln in all_lines(current) if len(ln) == 2]
        pick = rng.randrange(len(trivial) + 1)
        if pick == len(trivial):
            current = LinearSpace(current.n_points + 1, current.lines)
        else:
            ln = trivial[pick]
            grown = tuple(sorted(ln + (current.n_points,)))
            current = LinearSpace(
                current.n_points + 1, tuple(sorted(current.lines + (grown,)))
            )
    return current


@pytest.mark.acceptance
def test_13_completion_progress():
    """Four completion rounds from the quadrilateral, each validated.

    Rounds one to three hold exactly.  The fourth round is stated
    faithfully and fails: resolving every parallel pair of the round-3
    space requires one new point per pair, and that count is measured in
    the hundreds of millions.
    """
    t0 = time.time()
    current = LinearSpace(4, ())
    sizes = [4]
    for round_number in range(1, 5):
        before = all_lines(current)
        projected = parallel_pair_count(current)
        if current.n_points + projected > 2_000_000:
            pytest.fail(
                "criterion 13 is unattainable at round "
                f"{round_number}: the quadrilateral's completion grows "
                f"{' -> '.join(map(str, sizes))} -> "
                f"{current.n_points + projected} points "
                f"({projected} parallel pairs would each need a new point); "
                "rounds 1-3 verified exactly, round 4 exceeds any desk-scale "
                "budget. See the decisions ledger for the analysis."
            )
        current = trivial_planarisation(current, parallel_pairs(current))
        sizes.append(current.n_points)
        # Every pair of lines present before the round intersects after it.
        for l1, l2 in combinations(before, 2):
            e1 = line_through(current, l1[0], l1[1])
            e2 = line_through(current, l2[0], l2[1])
            assert set(e1) & set(e2), (round_number, l1, l2)
        assert validate(current.n_points, current.lines) == current
    verdict(13, "completion progress over 4 rounds", time.time() - t0)


@pytest.mark.acceptance
def test_14_game_determinism():
    t0 = time.time()
    start = LinearSpace(4, ())
    a = strategy_by_name("random_extension")
    b = strategy_by_name("closure_strategy")
    for seed in range(100):
        first = play(start, a, b, 6, seed=seed)
        second = play(start, a, b, 6, seed=seed)
        assert first.state.current == second.state.current
        assert first.analysis == second.analysis
        chain = first.state.history
        for small, big in zip(chain, chain[1:]):
            assert induced(big, range(small.n_points)) == small
    verdict(14, "game determinism and monotonicity", time.time() - t0)
