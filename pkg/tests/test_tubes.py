"""Rays, tube distance/projection, blending, two-strata verification."""

import math
from fractions import Fraction

import pytest

from facons_kit.asymptotic import asymptotic_set
from facons_kit.facons import Facon
from facons_kit.parser import parse_map
from facons_kit.strata import star_stratify
from facons_kit.tubes import (
    PairReport,
    PreconditionError,
    RayTemplate,
    blend_rays,
    coverage_check,
    curvilinear_distance,
    project_pi,
    solve_ray,
    template_from_witness,
    verify_thom_mather,
    _facon_pair,
    _witness_for,
)

MONOMIAL3 = "vars: x1 x2 x3 / map: x1*x2 ; x2*x3 ; x1*x2*x3"
CUSP = "vars: x1 x2 / map: (x1*x2)^2 ; (x1*x2)^3 + x1"
TWO_PLANES = "vars: x1 x2 x3 / map: x1^2 - 1 ; x2 + 2 ; (x1^2 - 1)*(x2 + 2)*x3"

# reference arc lengths for the explicit ray of the two-planes example,
# computed with a brute-force 1e6-panel trapezoid before the build
RHO_REFERENCE = {1: 3.326161485357, 2: 1.437921515516,
                 4: 0.664662565987, 8: 0.319110708592}


@pytest.fixture(scope="module")
def planes():
    _, F = parse_map(TWO_PLANES)
    SF = asymptotic_set(F)
    S = star_stratify(F, SF)
    axis = next(s for s in S.strata
                if sorted(str(g) for g in s.equations.generators) == ["a1", "a2"])
    plane = next(s for s in S.strata if s.dimension == 2
                 and [str(g) for g in s.equations.generators] == ["a1"])
    return F, SF, S, axis, plane


@pytest.fixture(scope="module")
def paper_ray(planes):
    F, SF, S, axis, plane = planes
    template = RayTemplate.from_spec(3, [
        {"shift": 1, "coeff": {"lam": -1}, "weight": -1},
        {"shift": -2, "coeff": {"mu": -1}, "weight": -1},
        {"shift": 0, "coeff": {"lam": 1, "mu": 1}, "weight": 2},
    ], symbols=("lam", "mu"))
    a = (Fraction(3), Fraction(1), Fraction(3))
    return solve_ray(F, a, axis, Facon((3,), (1, 2)), template,
                     sf_components=SF.components)


class TestSolveRay:
    def test_explicit_template_solution(self, paper_ray):
        ray = paper_ray
        assert ray.exact
        assert ray.solved == {"lam": Fraction(1), "mu": Fraction(1)}
        # gamma(u) = (1 + 1/u, -2 + 1/u, u^2)
        assert ray.gamma == (
            (Fraction(1), Fraction(1), -1),
            (Fraction(-2), Fraction(1), -1),
            (Fraction(0), Fraction(1), 2),
        )
        assert ray.start == (Fraction(3), Fraction(1), Fraction(3))
        assert ray.limit == (Fraction(0), Fraction(0), Fraction(2))

    def test_exactness_at_one(self, paper_ray):
        assert paper_ray.image_at(Fraction(1)) == paper_ray.start

    def test_no_positive_powers(self, paper_ray):
        for comp in paper_ray.image:
            assert all(p <= 0 for p in comp)

    def test_monomial_map_template(self):
        _, F = parse_map(MONOMIAL3)
        SF = asymptotic_set(F)
        S = star_stratify(F, SF)
        plane = next(s for s in S.strata
                     if s.facon_set == frozenset({Facon((1,), (2,))}))
        template = RayTemplate.from_spec(3, [
            {"shift": 0, "coeff": "c1", "weight": 1},
            {"shift": 0, "coeff": "c2", "weight": -1},
            {"shift": "c3", "coeff": 0, "weight": 0},
        ], symbols=("c1", "c2", "c3"))
        a = (Fraction(1), Fraction(1), Fraction(1))
        ray = solve_ray(F, a, plane, Facon((1,), (2,)), template,
                        sf_components=SF.components)
        assert ray.solved == {"c1": Fraction(1), "c2": Fraction(1), "c3": Fraction(1)}
        assert ray.limit == (Fraction(1), Fraction(0), Fraction(1))

    def test_rejects_point_on_asymptotic_set(self, planes):
        F, SF, S, axis, plane = planes
        template = template_from_witness(_witness_for(axis, Facon((3,), (1, 2))))
        with pytest.raises(PreconditionError):
            solve_ray(F, (Fraction(0), Fraction(1), Fraction(1)), axis,
                      Facon((3,), (1, 2)), template, sf_components=SF.components)

    def test_numeric_fallback_when_no_rational_solution(self, planes):
        # a1 = 1 forces the shift system (s1 + c1)^2 = 2: irrational, so the
        # certified Newton path takes over
        F, SF, S, axis, plane = planes
        template = template_from_witness(_witness_for(axis, Facon((3,), (1, 2))))
        ray = solve_ray(F, (Fraction(1), Fraction(1), Fraction(1)), axis,
                        Facon((3,), (1, 2)), template, sf_components=SF.components)
        assert not ray.exact
        start = ray.image_at(1.0)
        residual = max(abs(complex(s) - complex(t))
                       for s, t in zip(start, ray.start))
        assert residual < 1e-10
        assert abs(complex(ray.solved["c1"]) - (math.sqrt(2) - 1)) < 1e-9


class TestCurvilinearDistance:
    def test_against_trapezoid_oracle(self, paper_ray):
        for u, ref in RHO_REFERENCE.items():
            got = curvilinear_distance(paper_ray, float(u))
            assert abs(got - ref) < 1e-6, f"rho({u}) = {got} vs oracle {ref}"

    def test_vanishes_at_infinity(self, paper_ray):
        assert curvilinear_distance(paper_ray, 1e9) < 1e-6

    def test_strictly_decreasing(self, paper_ray):
        values = [curvilinear_distance(paper_ray, float(u)) for u in (1, 2, 4, 8)]
        assert all(a > b > 0 for a, b in zip(values, values[1:]))


class TestProjectPi:
    def test_paper_point(self, paper_ray):
        assert project_pi(paper_ray) == (Fraction(0), Fraction(0), Fraction(2))

    def test_projection_constant_along_ray(self, planes, paper_ray):
        # rays solved from points on the same image curve share the limit
        F, SF, S, axis, plane = planes
        template = template_from_witness(_witness_for(axis, Facon((3,), (1, 2))))
        for u in (2, 4):
            a_u = paper_ray.image_at(Fraction(u))
            ray_u = solve_ray(F, a_u, axis, Facon((3,), (1, 2)), template,
                              seed=paper_ray.solved)
            assert project_pi(ray_u) == project_pi(paper_ray)


@pytest.fixture(scope="module")
def two_rays():
    _, F = parse_map(MONOMIAL3)
    SF = asymptotic_set(F)
    S = star_stratify(F, SF)
    axis = next(s for s in S.strata
                if s.facon_set == frozenset({Facon((1,), (2, 3)), Facon((2,), (1, 3))}))
    k1, k2 = Facon((1,), (2, 3)), Facon((2,), (1, 3))
    t1 = template_from_witness(_witness_for(axis, k1))
    t2 = template_from_witness(_witness_for(axis, k2))
    a = (Fraction(2), Fraction(3), Fraction(6))
    r1 = solve_ray(F, a, axis, k1, t1, sf_components=SF.components)
    r2 = solve_ray(F, a, axis, k2, t2, sf_components=SF.components)
    return r1, r2


class TestBlendRays:

    def test_single_ray_identity(self, two_rays):
        r1, _ = two_rays
        blended = blend_rays([r1], [1])
        for p, vec in blended.items():
            for k in range(3):
                assert vec[k] == r1.image[k].get(p, Fraction(0))

    def test_midpoint_keeps_limit(self, two_rays):
        r1, r2 = two_rays
        assert r1.limit == r2.limit
        blended = blend_rays([r1, r2], [Fraction(1, 2), Fraction(1, 2)])
        assert tuple(blended[0]) == r1.limit

    def test_degenerate_weights_pick_one_ray(self, two_rays):
        r1, r2 = two_rays
        blended = blend_rays([r1, r2], [1, 0])
        for p, vec in blended.items():
            for k in range(3):
                assert vec[k] == r1.image[k].get(p, Fraction(0))

    def test_mismatched_limits_rejected(self, planes, paper_ray, two_rays):
        r1, _ = two_rays
        with pytest.raises(ValueError):
            blend_rays([paper_ray, r1], [Fraction(1, 2), Fraction(1, 2)])

    def test_weights_validated(self, two_rays):
        r1, r2 = two_rays
        with pytest.raises(ValueError):
            blend_rays([r1, r2], [Fraction(3, 4), Fraction(3, 4)])


class TestVerifyThomMather:
    def test_axis_plane_pair(self, planes):
        F, SF, S, axis, plane = planes
        rep = verify_thom_mather(F, axis, plane, SF.components, samples=8,
                                 rank_samples=2)
        assert rep.samples >= 8
        assert rep.max_pi_residual < 1e-9
        assert rep.max_rho_residual < 1e-9
        assert rep.rank_ok and rep.rho_monotone and rep.rho_zero_on_stratum
        assert rep.violations(1e-9) == []

    def test_unrelated_pair_rejected(self, planes):
        F, SF, S, axis, plane = planes
        other_plane = next(s for s in S.strata if s.dimension == 2
                           and [str(g) for g in s.equations.generators] == ["a2"])
        with pytest.raises(PreconditionError):
            verify_thom_mather(F, plane, other_plane, SF.components, samples=2)

    def test_fault_injection_reports_violation(self):
        report = PairReport("S1", "S0", 0.0, 1e-3, True, 5, True, True)
        assert any("rho" in v for v in report.violations(1e-9))
        clean = PairReport("S1", "S0", 0.0, 0.0, True, 5, True, True)
        assert clean.violations(1e-9) == []


class TestCoverage:
    def test_monomial_map_full_coverage(self):
        _, F = parse_map(MONOMIAL3)
        SF = asymptotic_set(F)
        covered, details = coverage_check(F, SF.components, 20, 12345)
        assert covered == 20

    def test_point_covered_via_asymptotic_set(self):
        _, F = parse_map(MONOMIAL3)
        SF = asymptotic_set(F)
        from facons_kit.asymptotic import fiber_nonempty, on_asymptotic_set
        a = (Fraction(1), Fraction(1), Fraction(0))
        assert not fiber_nonempty(F, a)
        assert on_asymptotic_set(SF, a)

    def test_identity_covered_by_fibers(self):
        _, F = parse_map("vars: x1 x2 / map: x1 ; x2")
        covered, details = coverage_check(F, (), 20, 7)
        assert covered == 20
        assert all(kind == "fiber" for _, kind in details)
