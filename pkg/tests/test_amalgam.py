import random
from dataclasses import replace

import pytest

from lingeo import (
    LinearSpace,
    PartialMap,
    amalgamate_in_class,
    class_all,
    class_by_name,
    collinear,
    enumerate_spaces,
    find_amalgam,
    free_amalgam,
    identity_embedding,
    incompatible_planarisations,
    is_amalgamation_base,
    is_amalgamation_base_exhaustive,
    is_closed,
    is_embedding,
    validate,
    verify_certificate,
    verify_class_ap,
)
from lingeo.amalgam import (
    NotAplanarEither,
    NotInClass,
    NotOnePointExtension,
    SpaceIsClosed,
)
from lingeo.core import classify_shape
from lingeo.morphisms import is_isomorphic


def identity(a, b):
    return PartialMap.from_dict(a, b, {p: p for p in range(a.n_points)})


class TestFreeAmalgam:
    def test_identity_amalgam(self, quadrilateral):
        e = identity(quadrilateral, quadrilateral)
        result = free_amalgam(quadrilateral, quadrilateral, quadrilateral, e, e)
        assert is_isomorphic(result.c, quadrilateral) is not None

    def test_fano_plus_two_free_points(self, pg2):
        bigger = LinearSpace(8, pg2.lines)
        e = identity(pg2, bigger)
        result = free_amalgam(pg2, bigger, bigger, e, e)
        assert result.c.n_points == 9
        # The two new points are joined by a trivial line only.
        p, q = result.e1(7), result.e2(7)
        assert p != q
        assert all(not collinear(result.c, p, q, x) for x in range(7))

    def test_two_point_base_always_aplanar(self):
        # A single-line base has no pair of lines, so aplanarity is vacuous.
        base = LinearSpace(2, ())
        rng = random.Random(3)
        for _ in range(10):
            b1 = _grow(base, rng.randrange(3, 6), rng)
            b2 = _grow(base, rng.randrange(3, 6), rng)
            result = free_amalgam(base, b1, b2, identity(base, b1), identity(base, b2))
            assert validate(result.c.n_points, result.c.lines) == result.c
            assert is_embedding(result.e1) and is_embedding(result.e2)

    def test_neither_side_aplanar(self, quadrilateral, pg2):
        # The quadrilateral closes up inside the plane on both sides.
        from itertools import combinations

        from lingeo import is_independent

        image = next(
            q for q in combinations(range(7), 4) if is_independent(pg2, q)
        )
        quad_in_fano = PartialMap.from_dict(
            quadrilateral, pg2, dict(zip(range(4), image))
        )
        assert is_embedding(quad_in_fano)
        with pytest.raises(NotAplanarEither):
            free_amalgam(quadrilateral, pg2, pg2, quad_in_fano, quad_in_fano)

    def test_outputs_validate(self, triangle):
        rng = random.Random(11)
        for _ in range(10):
            b1 = _grow(triangle, rng.randrange(4, 7), rng)
            b2 = _grow(triangle, rng.randrange(4, 7), rng)
            if not _aplanar_head(triangle, b1) and not _aplanar_head(triangle, b2):
                continue
            result = free_amalgam(
                triangle, b1, b2, identity(triangle, b1), identity(triangle, b2)
            )
            assert validate(result.c.n_points, result.c.lines) == result.c


def _aplanar_head(base, ext):
    from lingeo import is_aplanar

    return is_aplanar(range(base.n_points), ext)


def _grow(space, upto, rng):
    from lingeo.core import all_lines

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


class TestIncompatible:
    def test_quadrilateral_case1(self, quadrilateral):
        b1, b2, cert = incompatible_planarisations(quadrilateral)
        assert verify_certificate(cert, quadrilateral, b1, b2)
        # The nontrivial side glues the diagonal points into one new point.
        assert b1.n_points == b2.n_points == 7
        assert len(cert.l1) == 2 and len(cert.l2) == 2

    def test_case2_with_nontrivial_line(self):
        space = validate(5, [(0, 1, 2)])
        b1, b2, cert = incompatible_planarisations(space)
        assert verify_certificate(cert, space, b1, b2)
        # The trivial-pair reduction walks through intermediate points.
        assert len(cert.chain.steps) >= 4

    def test_closed_space_rejected(self, fano, near_pencil):
        for space in (fano, near_pencil):
            with pytest.raises(SpaceIsClosed):
                incompatible_planarisations(space)

    def test_tampered_certificate_fails(self, quadrilateral):
        b1, b2, cert = incompatible_planarisations(quadrilateral)
        assert not verify_certificate(replace(cert, l3=cert.l1), quadrilateral, b1, b2)
        assert not verify_certificate(
            replace(cert, witness_pair=(cert.l1[0], cert.l1[1])), quadrilateral, b1, b2
        )

    def test_no_bounded_amalgam_exists(self, quadrilateral):
        b1, b2, cert = incompatible_planarisations(quadrilateral)
        assert find_amalgam(quadrilateral, b1, b2) is None

    def test_certificates_on_all_small_nonclosed_spaces(self):
        for n in range(2, 6):
            for space in enumerate_spaces(n):
                if is_closed(space):
                    continue
                b1, b2, cert = incompatible_planarisations(space)
                assert verify_certificate(cert, space, b1, b2), space
                assert find_amalgam(space, b1, b2) is None, space

    @pytest.mark.slow
    def test_certificates_up_to_eight_points(self):
        # Cross-oracle on larger bases: whenever the certificate verifies,
        # the complete amalgam search must come up empty.  All 7-point
        # classes plus a deterministic sample of the 8-point ones.
        bases = list(enumerate_spaces(7))
        bases += enumerate_spaces(8)[::8]
        for space in bases:
            if is_closed(space):
                continue
            b1, b2, cert = incompatible_planarisations(space)
            assert verify_certificate(cert, space, b1, b2), space
            assert find_amalgam(space, b1, b2) is None, space


class TestAmalgamationBase:
    def test_fano(self, fano):
        assert is_amalgamation_base(fano)

    def test_pentagon(self, pentagon):
        assert not is_amalgamation_base(pentagon)

    def test_near_pencil_closed_but_degenerate(self, near_pencil):
        # Closed degenerate planes are bases even though not projective.
        assert is_amalgamation_base(near_pencil)
        assert not classify_shape(near_pencil).is_projective_plane

    def test_exhaustive_triangle(self, triangle):
        assert is_amalgamation_base_exhaustive(triangle).is_base

    def test_exhaustive_quadrilateral(self, quadrilateral):
        result = is_amalgamation_base_exhaustive(quadrilateral)
        assert result.is_base is False
        assert result.witness is not None and result.certificate is not None

    def test_exhaustive_fano(self, pg2):
        assert is_amalgamation_base_exhaustive(pg2).is_base

    def test_boundary_on_small_spaces(self):
        for n in range(1, 6):
            for space in enumerate_spaces(n):
                exhaustive = is_amalgamation_base_exhaustive(space)
                assert exhaustive.is_base == is_amalgamation_base(space), space


class TestAmalgamateInClass:
    def test_identify_free_extensions(self, triangle):
        d3 = class_by_name("d3")
        free = LinearSpace(4, ())
        result = amalgamate_in_class(triangle, free, free, d3)
        assert result is not None and result.c.n_points == 4

    def test_declared_collinearity_case(self, triangle):
        # Base {c0,c1,d} with one extension free and one on the line c0c1:
        # the amalgam makes {d, new1, new2} collinear.
        d3 = class_by_name("d3")
        free = LinearSpace(4, ())
        determined = validate(4, [(0, 1, 3)])
        result = amalgamate_in_class(triangle, free, determined, d3)
        assert result is not None
        assert (2, 3, 4) in result.c.lines

    def test_pentagon_not_in_class(self, pentagon):
        with pytest.raises(NotInClass):
            amalgamate_in_class(
                pentagon, LinearSpace(6, ()), LinearSpace(6, ()), class_by_name("d4star")
            )

    def test_not_one_point_extension(self, triangle):
        with pytest.raises(NotOnePointExtension):
            amalgamate_in_class(
                triangle, LinearSpace(6, ()), LinearSpace(4, ()), class_all()
            )

    def test_amalgam_embeds_both_sides(self, quadrilateral):
        spec = class_all()
        b1 = validate(5, [(0, 1, 4)])
        b2 = validate(5, [(2, 3, 4)])
        result = amalgamate_in_class(quadrilateral, b1, b2, spec)
        assert result is not None
        assert is_embedding(result.e1) and is_embedding(result.e2)
        for p in range(4):
            assert result.e1(p) == result.e2(p) == result.over(p)


class TestClassAp:
    def test_degree3_small(self):
        report = verify_class_ap(class_by_name("d3"), 5)
        assert report.total_failures == 0 and not report.inconclusive

    def test_full_class_has_failures(self):
        report = verify_class_ap(class_by_name("all"), 5)
        assert report.total_failures > 0
        assert all(f.certificate is not None for f in report.sanity_failures)

    def test_parallel_jobs_agree(self):
        seq = verify_class_ap(class_by_name("d3"), 5, jobs=1)
        par = verify_class_ap(class_by_name("d3"), 5, jobs=2)
        assert seq == par


class TestLiftingAmalgams:
    def test_amalgam_over_base_commutes_over_planarisation(self, quadrilateral):
        # Extensions of a planarisation amalgamated over the original base
        # still agree on the planarisation (epimorphism consequence).
        mid = validate(5, [(0, 1, 4), (2, 3, 4)])
        b1 = LinearSpace(6, mid.lines)
        b2 = validate(6, mid.lines + ((0, 2, 5),))
        result = find_amalgam(quadrilateral, b1, b2)
        assert result is not None
        for p in range(mid.n_points):
            assert result.e1(p) == result.e2(p)
