"""Unit tests for the exact rational moment oracle and the class audit."""

from fractions import Fraction

import pytest

from wignerlab import oracle as orc
from wignerlab import walks as wk
from wignerlab.catalan import catalan


class TestMomentSpec:
    def test_rademacher(self):
        assert orc.rademacher_moments(3) == \
            (Fraction(1, 4), Fraction(1, 16), Fraction(1, 64))

    def test_gaussian(self):
        assert orc.gaussian_moments(3) == \
            (Fraction(1, 4), Fraction(3, 16), Fraction(15, 64))

    def test_validation(self):
        with pytest.raises(ValueError):
            orc.MomentSpec(4, Fraction(5), 1, (Fraction(1, 4),))
        with pytest.raises(ValueError):
            orc.MomentSpec(4, Fraction(1), 2, (Fraction(1, 4),))
        with pytest.raises(ValueError):
            orc.make_spec(4, 1, 1, "poisson")

    def test_odd_moment_zero(self):
        spec = orc.make_spec(4, 1, 2)
        assert spec.v_moment(3) == 0


class TestPairWeight:
    def test_multiplicity_two(self):
        spec = orc.make_spec(4, Fraction(3, 2), 1)
        assert orc.pair_weight(2, spec) == Fraction(1, 16)

    def test_multiplicity_four_scales_with_rho(self):
        spec = orc.make_spec(4, Fraction(1, 2), 2)
        # V_4 rho^{-1} / n
        assert orc.pair_weight(4, spec) == Fraction(1, 16) * 2 / 4

    def test_odd_is_zero(self):
        spec = orc.make_spec(4, 1, 2)
        assert orc.pair_weight(3, spec) == 0

    def test_loop_walk_weight_zero(self):
        spec = orc.make_spec(3, 1, 1)
        w = wk.walk_from_trajectory(wk.Trajectory((1, 1), 3))
        assert orc.walk_weight(w, spec) == 0


class TestExactMoment:
    def test_m2(self):
        for n in range(2, 7):
            assert orc.exact_moment_walk(orc.make_spec(n, 1, 1)) == \
                Fraction(n - 1, 4)

    def test_n2_all_s(self):
        for s in range(1, 5):
            for rho in (Fraction(1, 2), Fraction(1), Fraction(2)):
                spec = orc.MomentSpec(2, rho, s, orc.rademacher_moments(s))
                assert orc.exact_moment_walk(spec) == \
                    Fraction(1, 4) ** s * rho ** (1 - s)

    def test_frozen_values(self):
        # n=4, rho=2, Rademacher entries +-1/2
        expected = {1: Fraction(3, 4), 2: Fraction(9, 32),
                    3: Fraction(69, 512), 4: Fraction(627, 8192)}
        for s, value in expected.items():
            assert orc.exact_moment_walk(orc.make_spec(4, 2, s)) == value

    def test_methods_agree(self):
        for n in range(2, 7):
            for s in range(1, 4):
                spec = orc.make_spec(n, Fraction(3, 2), s)
                assert orc.exact_moment(spec, "both") == \
                    orc.exact_moment_trajectory(spec)

    def test_budget_guard(self):
        spec = orc.make_spec(9, 2, 6)
        with pytest.raises(orc.MomentBudgetError) as exc:
            orc.exact_moment_trajectory(spec)
        assert exc.value.estimate == 9 ** 12

    def test_gaussian_exceeds_rademacher(self):
        r = orc.exact_moment_walk(orc.make_spec(4, 2, 2))
        g = orc.exact_moment_walk(orc.make_spec(4, 2, 2, "gaussian"))
        assert g > r

    def test_dense_limit_direction(self):
        # at rho = n the s=2 moment approaches t_2/4^2 per site from below
        per_site = [Fraction(orc.exact_moment_walk(orc.make_spec(n, n, 2)), n)
                    for n in (3, 5, 8, 12)]
        assert per_site == sorted(per_site)
        assert all(v < Fraction(catalan(2), 16) for v in per_site)


class TestClosedForms:
    def test_edge_constant(self):
        got = orc.theorem_7_1_rhs(1.0, 1.0, 1.0 / 16.0)
        import math
        assert got == pytest.approx(
            math.exp(-math.e) / math.sqrt(math.pi), rel=1e-12)
        with pytest.raises(ValueError):
            orc.theorem_7_1_rhs(0.0, 1.0, 1.0)

    def test_insertion_count(self):
        assert orc.insertion_count(4, 0) == 1
        assert orc.insertion_count(4, 1) == 6
        assert orc.insertion_count(4, 2) == 3
        assert orc.insertion_count(3, 2) == 0

    def test_insertion_bound(self):
        for s in range(2, 13):
            for mu2 in range(0, s // 2 + 1):
                for m in range(mu2, s // 2 + 1):
                    assert orc.insertion_lower_bound_ok(s, mu2, m)


class TestAudit:
    def test_small_sweep(self):
        for s in range(1, 4):
            for n in range(2, 6):
                for rec in orc.class_weight_audit(s, n, 1, 4):
                    assert rec.bound_ok
                    assert rec.eq_5_15_ok
                    assert rec.n_walks > 0

    def test_weights_total(self):
        # per-class weights add back to the full moment
        s, n, rho = 3, 5, Fraction(2)
        recs = orc.class_weight_audit(s, n, rho, 4)
        total = sum(r.weight for r in recs)
        assert total == orc.exact_moment_walk(orc.make_spec(n, rho, s))
