import math

import numpy as np
import pytest

from hhv.convexity import (
    PhiMap, SamplePlan, SampleTriple, VERDICT_HOLDS, VERDICT_VIOLATED,
    check_convex, check_implication_chain, check_phi_chord_equivalence,
    check_log_phi_chord_equivalence, check_log_convex, check_log_phi_convex,
    check_log_phi_midconvex, check_phi_convex,
)
from hhv.errors import PhiRangeViolated, PositivityViolated
from hhv.expr import Interval, parse

UNIT = Interval(0.0, 1.0)
SMALL = SamplePlan(x_points=9, t_points=9, random_count=64, seed=1)


def brute_force_log_convex(f, interval, nx=41, nt=21):
    """Independent dense-grid oracle: min log-margin over a lattice."""
    xs = np.linspace(interval.a, interval.b, nx)
    ts = np.linspace(0.0, 1.0, nt)
    worst = math.inf
    for x in xs:
        for y in xs:
            for t in ts:
                lhs = math.log(f.eval(t * x + (1.0 - t) * y))
                rhs = t * math.log(f.eval(x)) + (1.0 - t) * math.log(f.eval(y))
                worst = min(worst, rhs - lhs)
    return worst


def brute_force_phi_convex(f, phi, interval, nx=21, nt=11):
    xs = np.linspace(interval.a, interval.b, nx)
    ts = np.linspace(0.0, 1.0, nt)
    worst = math.inf
    for x in xs:
        for y in xs:
            px, py = phi.eval(x), phi.eval(y)
            for t in ts:
                lhs = f.eval(t * px + (1.0 - t) * py)
                rhs = t * f.eval(px) + (1.0 - t) * f.eval(py)
                worst = min(worst, rhs - lhs)
    return worst


class TestSamplePlan:
    def test_t_lattice_contains_anchors(self):
        _, _, ts = SamplePlan(x_points=5, t_points=9, random_count=0).triples(UNIT)
        assert {0.0, 0.5, 1.0} <= set(ts)

    def test_even_t_points_rejected(self):
        with pytest.raises(ValueError):
            SamplePlan(t_points=8)

    def test_random_block_is_prefix_stable(self):
        small = SamplePlan(x_points=3, t_points=3, random_count=100, seed=9)
        big = SamplePlan(x_points=3, t_points=3, random_count=200, seed=9)
        xs_s, ys_s, ts_s = small.triples(UNIT)
        xs_b, ys_b, ts_b = big.triples(UNIT)
        lattice = 3 * 3 * 3
        assert (xs_b[: lattice + 100] == xs_s).all()
        assert (ys_b[: lattice + 100] == ys_s).all()
        assert (ts_b[: lattice + 100] == ts_s).all()


class TestPhiMap:
    def test_identity_factory(self):
        phi = PhiMap.identity(UNIT)
        assert phi.at_a == 0.0 and phi.at_b == 1.0

    def test_square_is_self_map_on_unit(self):
        PhiMap(parse("x^2"), UNIT)  # must not raise

    def test_escaping_map_rejected(self):
        with pytest.raises(PhiRangeViolated):
            PhiMap(parse("2*x"), UNIT)

    def test_shifted_domain(self):
        with pytest.raises(PhiRangeViolated):
            PhiMap(parse("x^2"), Interval(1.0, 2.0))  # 2^2 = 4 escapes


class TestCheckConvex:
    def test_square_holds(self):
        rep = check_convex(parse("x^2"), Interval(-1, 1), SMALL)
        assert rep.verdict == VERDICT_HOLDS
        assert rep.min_margin >= 0.0

    def test_sqrt_violated_with_expected_scale(self):
        # chord midpoint check at (0, 1, 1/2): 0.5 - sqrt(0.5) ~ -0.2071
        rep = check_convex(parse("sqrt(x)"), UNIT)
        assert rep.verdict == VERDICT_VIOLATED
        assert rep.min_margin < -0.2
        assert rep.failure_kind == "inequality"

    def test_affine_equality_case(self):
        rep = check_convex(parse("2*x + 3"), Interval(-2, 5), SMALL)
        assert rep.verdict == VERDICT_HOLDS
        assert abs(rep.min_margin) <= 1e-12

    def test_witness_reproduces_margin(self):
        f = parse("sqrt(x)")
        rep = check_convex(f, UNIT)
        w = rep.witness
        margin = w.t * f.eval(w.x) + (1 - w.t) * f.eval(w.y) - f.eval(w.t * w.x + (1 - w.t) * w.y)
        assert margin < -rep.tolerance
        assert margin == pytest.approx(rep.min_margin, rel=1e-12)

    def test_domain_failure_flagged(self):
        rep = check_convex(parse("ln(x - 0.5)"), UNIT, SMALL)
        assert rep.verdict == VERDICT_VIOLATED
        assert rep.failure_kind == "domain"
        assert rep.witness is not None
        assert rep.min_margin == -math.inf


class TestCheckLogConvex:
    def test_exp_equality_case(self):
        rep = check_log_convex(parse("exp(x)"), UNIT)
        assert rep.verdict == VERDICT_HOLDS
        assert abs(rep.min_margin) <= 1e-12

    def test_linear_violated_with_known_witness_scale(self):
        # (1, 2, 1/2): log(sqrt 2) - log(1.5) ~ -0.0589
        rep = check_log_convex(parse("x"), Interval(1, 2))
        assert rep.verdict == VERDICT_VIOLATED
        assert rep.min_margin <= -0.05

    def test_exp_x_squared_matches_grid_oracle(self):
        f = parse("exp(x^2)")
        rep = check_log_convex(f, Interval(-1, 1), SMALL)
        assert rep.verdict == VERDICT_HOLDS
        assert brute_force_log_convex(f, Interval(-1, 1)) >= -1e-12

    def test_positivity_precondition(self):
        with pytest.raises(PositivityViolated):
            check_log_convex(parse("x"), Interval(-1, 1))


class TestPhiClasses:
    def test_identity_reduction_convex(self):
        f = parse("exp(x) - x")
        plan = SamplePlan(x_points=7, t_points=5, random_count=32, seed=3)
        direct = check_convex(f, UNIT, plan)
        deformed = check_phi_convex(f, PhiMap.identity(UNIT), plan)
        assert direct.verdict == deformed.verdict
        assert direct.min_margin == deformed.min_margin

    def test_identity_reduction_log(self):
        f = parse("x + 1")
        plan = SamplePlan(x_points=7, t_points=5, random_count=32, seed=3)
        direct = check_log_convex(f, UNIT, plan)
        deformed = check_log_phi_convex(f, PhiMap.identity(UNIT), plan)
        assert direct.verdict == deformed.verdict
        assert direct.min_margin == deformed.min_margin
        assert direct.witness == deformed.witness

    def test_square_deformation_holds_with_oracle(self):
        f = parse("x^2")
        phi = PhiMap(parse("x^2"), UNIT)
        rep = check_phi_convex(f, phi, SMALL)
        assert rep.verdict == VERDICT_HOLDS
        assert brute_force_phi_convex(f, parse("x^2"), UNIT) >= -1e-15

    def test_sqrt_violated_under_identity(self):
        rep = check_phi_convex(parse("sqrt(x)"), PhiMap.identity(UNIT))
        assert rep.verdict == VERDICT_VIOLATED

    def test_exp_holds_for_any_phi(self):
        for phi_text in ("x", "x^2", "sqrt(x)", "0.5*x + 0.25"):
            rep = check_log_phi_convex(parse("exp(x)"), PhiMap(parse(phi_text), UNIT), SMALL)
            assert rep.verdict == VERDICT_HOLDS
            assert abs(rep.min_margin) <= 1e-12

    def test_linear_violated_under_identity_log(self):
        dom = Interval(1, 2)
        rep = check_log_phi_convex(parse("x"), PhiMap.identity(dom))
        assert rep.verdict == VERDICT_VIOLATED


class TestMidconvex:
    def test_exp_equality(self):
        rep = check_log_phi_midconvex(parse("exp(x)"), PhiMap.identity(UNIT), SMALL)
        assert rep.verdict == VERDICT_HOLDS
        assert abs(rep.min_margin) <= 1e-12

    def test_t_pinned_to_half(self):
        rep = check_log_phi_midconvex(parse("exp(x)"), PhiMap.identity(UNIT), SMALL)
        assert rep.samples_tested == 9 * 9 * 9 + 64

    def test_full_class_implies_midpoint_class(self):
        f = parse("exp(x^2)")
        phi = PhiMap(parse("x^2"), UNIT)
        full = check_log_phi_convex(f, phi, SMALL)
        mid = check_log_phi_midconvex(f, phi, SMALL)
        assert full.verdict == VERDICT_HOLDS
        assert mid.verdict == VERDICT_HOLDS

    def test_linear_violated_at_endpoints_pair(self):
        # f(1.5) = 1.5 > sqrt(2): fails at the (1, 2) pair
        rep = check_log_phi_midconvex(parse("x"), PhiMap.identity(Interval(1, 2)))
        assert rep.verdict == VERDICT_VIOLATED
        assert rep.min_margin <= math.log(math.sqrt(2.0)) - math.log(1.5) + 1e-12


class TestDeterminismAndMonotonicity:
    def test_reports_identical_across_runs(self):
        f = parse("exp(x^2)")
        plan = SamplePlan(x_points=9, t_points=5, random_count=128, seed=11)
        a = check_log_convex(f, Interval(-1, 1), plan)
        b = check_log_convex(f, Interval(-1, 1), plan)
        assert a == b

    def test_enlarging_samples_never_unflags(self):
        f = parse("x")
        dom = Interval(1, 2)
        small = SamplePlan(x_points=5, t_points=5, random_count=16, seed=2)
        big = SamplePlan(x_points=9, t_points=9, random_count=32, seed=2)
        rep_small = check_log_convex(f, dom, small)
        rep_big = check_log_convex(f, dom, big)
        assert rep_small.verdict == VERDICT_VIOLATED
        assert rep_big.verdict == VERDICT_VIOLATED
        assert rep_big.min_margin <= rep_small.min_margin + 1e-15


class TestImplicationChain:
    def test_exp_all_links_hold_link1_tight(self):
        rep = check_implication_chain(parse("exp(x)"), PhiMap.identity(UNIT), SMALL)
        assert rep.verdict == VERDICT_HOLDS
        link1 = rep.links[0]
        assert abs(link1.min_margin) <= 1e-12

    def test_linear_breaks_only_first_link(self):
        rep = check_implication_chain(parse("x"), PhiMap.identity(Interval(1, 2)), SMALL)
        assert rep.links[0].verdict == VERDICT_VIOLATED
        assert rep.links[1].verdict == VERDICT_HOLDS
        assert rep.links[2].verdict == VERDICT_HOLDS

    def test_am_gm_and_max_links_unconditional(self):
        # links 2 and 3 hold for every positive f, convex or not
        for text in ("x", "1/(1 + x)", "2 + x*(1 - x)", "exp(-x^2)"):
            rep = check_implication_chain(parse(text), PhiMap.identity(Interval(0.1, 1)), SMALL)
            assert rep.links[1].min_margin >= -1e-12
            assert rep.links[2].min_margin >= -1e-12


class TestChordEquivalences:
    def test_exp_with_square_phi_agree_holding(self):
        rep = check_log_phi_chord_equivalence(
            parse("exp(x)"), PhiMap(parse("x^2"), UNIT), 100,
            SamplePlan(x_points=7, t_points=7, random_count=16, seed=4), seed=17)
        assert rep.agree
        assert rep.direct_verdict == VERDICT_HOLDS
        assert rep.segment_verdict == VERDICT_HOLDS

    def test_linear_agree_violated(self):
        rep = check_log_phi_chord_equivalence(
            parse("x"), PhiMap.identity(Interval(1, 2)), 32,
            SamplePlan(x_points=7, t_points=7, random_count=16, seed=4), seed=17)
        assert rep.agree
        assert rep.direct_verdict == VERDICT_VIOLATED
        assert rep.segment_verdict == VERDICT_VIOLATED

    def test_zero_pairs_vacuous(self):
        rep = check_log_phi_chord_equivalence(parse("exp(x)"), PhiMap.identity(UNIT), 0)
        assert rep.agree
        assert rep.pairs_tested == 0

    def test_additive_variant_on_convex_and_concave(self):
        plan = SamplePlan(x_points=7, t_points=7, random_count=16, seed=4)
        holds = check_phi_chord_equivalence(parse("x^2"), PhiMap.identity(UNIT), 32, plan, seed=5)
        assert holds.agree and holds.direct_verdict == VERDICT_HOLDS
        fails = check_phi_chord_equivalence(parse("sqrt(x)"), PhiMap.identity(UNIT), 32, plan, seed=5)
        assert fails.agree and fails.direct_verdict == VERDICT_VIOLATED

    def test_determinism(self):
        args = (parse("exp(x^2)"), PhiMap(parse("x^2"), UNIT), 16,
                SamplePlan(x_points=5, t_points=5, random_count=8, seed=0))
        assert check_log_phi_chord_equivalence(*args, seed=9) == check_log_phi_chord_equivalence(*args, seed=9)
