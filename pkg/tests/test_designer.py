import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wetrain import analytic, designer
from wetrain.designer import Branch, Case
from wetrain.orderstats import g_value
from wetrain.params import Scheme, SystemParams

from oracles import grid_max_q_net, grid_maximize, stratified_params

T_GRID = [float(t) for t in np.logspace(-4, math.log10(2.0), 12)]


def _k(p):
    return p.energy_scale * p.beta**2 / p.n0


class TestClassify:
    def test_large_noise(self, nominal):
        assert designer.classify_case(10, nominal.replace(n0=1e-3)) is Case.CASE1

    def test_large_energy(self, nominal):
        assert designer.classify_case(10, nominal.replace(p_f=1e6)) is Case.CASE2

    def test_reference_point(self, nominal):
        a = analytic.alpha(nominal)
        beta_m, beta_g = nominal.beta * nominal.m, nominal.beta * g_value(10, nominal.m)
        assert beta_m == pytest.approx(5e-5)
        expected = Case.CASE1 if a >= beta_g else Case.CASE2 if a <= beta_m else Case.CASE3
        assert designer.classify_case(10, nominal) is expected is Case.CASE2

    def test_single_antenna(self, nominal):
        assert designer.classify_case(7, nominal.replace(m=1)) is Case.CASE1

    def test_boundaries_inclusive(self, nominal):
        # choose N0 so alpha equals beta*M exactly -> Case2 (<=)
        p = nominal
        n0 = (p.beta * p.m) ** 2 * p.energy_scale * (p.m - 1) / p.m**2
        q = p.replace(n0=n0)
        assert analytic.alpha(q) == pytest.approx(q.beta * q.m, rel=1e-14)
        assert designer.classify_case(5, q.replace(n0=n0 * (1 - 1e-9))) is Case.CASE2
        assert designer.classify_case(5, q.replace(n0=n0 * (1 + 1e-9))) is Case.CASE3

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from(["Case1", "Case2", "Case3"]),
           st.integers(2, 80))
    def test_dimensionless_rule(self, seed, case, n1):
        p = stratified_params(np.random.default_rng(seed), case, n1)
        assert designer.classify_case(n1, p).value == case


class TestCase1ClosedForm:
    def test_single_subband(self, nominal):
        assert designer.e1_star_case1(1, nominal) == 0.0

    def test_large_beta_limit(self, nominal):
        p = nominal.replace(beta=1e6)
        n1 = 8
        ref = math.sqrt(p.energy_scale * p.n0 * (g_value(n1, p.m) / p.m - 1) / n1)
        assert designer.e1_star_case1(n1, p) == pytest.approx(ref, rel=1e-9)

    def test_grid_oracle(self):
        # the formula maximizes the no-phase-II objective whatever the case
        rng = np.random.default_rng(11)
        for _ in range(20):
            m, n1 = int(rng.integers(1, 8)), int(rng.integers(2, 80))
            p = SystemParams(m=m, n_subbands=100, beta=10 ** rng.uniform(-6, -3),
                             n0=10 ** rng.uniform(-17, -14), t_block=10 ** rng.uniform(-3, 1))
            fun = lambda e1: p.energy_scale * analytic.r_h(n1, e1, p) / p.m - e1 * n1
            hi = 1e3 * max(designer.e1_star_case1(n1, p), p.n0 / p.beta)
            _, v = grid_maximize(fun, 1e-9 * p.n0 / p.beta, hi)
            got = float(fun(designer.e1_star_case1(n1, p)))
            assert got >= v * (1 - 1e-6) - 1e-300
            assert got == pytest.approx(v, rel=1e-6)

    def test_case1_instances_do_not_train(self):
        # Case-1 bounds on k force k (G/M - 1) < N1, so the closed form is 0
        rng = np.random.default_rng(5)
        for _ in range(50):
            n1 = int(rng.integers(2, 100))
            p = stratified_params(rng, "Case1", n1)
            opt = designer.optimize_e1(n1, p)
            assert opt.case is Case.CASE1
            assert opt.e1 == designer.e1_star_case1(n1, p) == 0.0


class TestStationary:
    def test_polynomial_against_derivative(self, nominal):
        # polynomial sign changes bracket the rational derivative's roots
        for n1 in (3, 19, 60):
            for e1 in designer.stationary_candidates(n1, nominal, Branch.CASE2):
                h = 1e-6 * e1
                fd = (analytic.q_net_reduced(n1, e1 + h, nominal)
                      - analytic.q_net_reduced(n1, e1 - h, nominal)) / (2 * h)
                assert abs(fd) / n1 <= 1e-6
                w = 1 + nominal.beta * e1 / nominal.n0
                coeffs = designer.stationary_polynomial(n1, nominal, high=True)
                assert abs(np.polyval(coeffs, w)) <= 1e-9 * np.polyval(np.abs(coeffs), w)

    def test_residual(self):
        rng = np.random.default_rng(21)
        seen = 0
        for _ in range(60):
            n1 = int(rng.integers(2, 100))
            p = stratified_params(rng, "Case2", n1)
            for e1 in designer.stationary_candidates(n1, p, Branch.CASE2):
                seen += 1
                assert designer.stationary_residual(n1, e1, p, high=True) <= 1e-8
        assert seen > 30

    def test_single_antenna_matches_closed_form(self, nominal):
        p = nominal.replace(m=1, t_block=10.0)
        for n1 in (2, 10, 50):
            cands = designer.stationary_candidates(n1, p, Branch.CASE2)
            e = designer.e1_star_case1(n1, p)
            assert cands == ([e] if e > 0 else [])

    def test_flat_selection_has_no_stationary_point(self, nominal):
        assert designer.stationary_candidates(1, nominal, Branch.CASE2) == []

    def test_case2_grid_oracle(self):
        rng = np.random.default_rng(8)
        for _ in range(15):
            n1 = int(rng.integers(2, 100))
            p = stratified_params(rng, "Case2", n1)
            cands = [0.0] + designer.stationary_candidates(n1, p, Branch.CASE2)
            best = max(analytic.q_net_reduced(n1, e, p) for e in cands)
            _, ref = grid_max_q_net(n1, p)
            assert best == pytest.approx(ref, rel=1e-6)


class TestOptimizeE1:
    def test_case1_dispatch(self, nominal):
        p = nominal.replace(n0=1e-3)
        opt = designer.optimize_e1(10, p)
        assert opt.case is Case.CASE1 and opt.e1 == designer.e1_star_case1(10, p)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from(["Case1", "Case2", "Case3"]),
           st.integers(1, 100))
    def test_not_worse_than_zero(self, seed, case, n1):
        p = stratified_params(np.random.default_rng(seed), case, max(n1, 2))
        opt = designer.optimize_e1(n1, p)
        assert opt.q_net >= analytic.q_net_reduced(n1, 0.0, p)
        assert opt.e2 == analytic.e2_star(analytic.r_h(n1, opt.e1, p), p)

    def test_stratified_grid_oracle(self):
        rng = np.random.default_rng(2)
        for case in ("Case1", "Case2", "Case3"):
            for _ in range(10):
                n1 = int(rng.integers(2, 100))
                p = stratified_params(rng, case, n1)
                opt = designer.optimize_e1(n1, p)
                assert opt.case.value == case
                _, ref = grid_max_q_net(n1, p)
                assert opt.q_net == pytest.approx(ref, rel=1e-6)

    def test_case3_includes_boundary(self):
        rng = np.random.default_rng(4)
        n1 = 30
        p = stratified_params(rng, "Case3", n1)
        opt = designer.optimize_e1(n1, p)
        assert designer.e0(n1, p) in opt.candidates
        assert analytic.r_h(n1, designer.e0(n1, p), p) == pytest.approx(analytic.alpha(p),
                                                                        rel=1e-10)

    def test_interior_maximum(self, nominal):
        for m, expected in ((5, 19), (2, 17)):
            curve = [o.q_net for o in designer.optimize_curve(nominal.replace(m=m))]
            best = int(np.argmax(curve))
            assert 0 < best < len(curve) - 1
            assert best + 1 == expected
            assert all(np.diff(curve[: best + 1]) > 0)
            assert all(np.diff(curve[best:]) < 0)

    def test_failure_carries_n1(self, nominal, monkeypatch):
        from wetrain.errors import RootFindingFailure

        def boom(n1, p, branch):
            raise RootFindingFailure("no convergence")
        monkeypatch.setattr(designer, "stationary_candidates", boom)
        with pytest.raises(RootFindingFailure) as info:
            designer.optimize_curve(nominal, [4])
        assert info.value.n1 == 4


class TestOptimizeDesign:
    def test_single_subband(self, nominal):
        sol = designer.optimize_design(nominal.replace(n_subbands=1))
        assert sol.n1_star == 1 and sol.e1_star == 0.0

    def test_no_channel(self, nominal):
        sol = designer.optimize_design(nominal.replace(beta=1e-30))
        assert sol.e1_star == 0 and sol.e2_star == 0
        assert 0 < sol.q_net_star < 1e-25

    def test_more_antennas_help(self, nominal):
        assert (designer.optimize_design(nominal).q_net_star
                > designer.optimize_design(nominal.replace(m=2)).q_net_star)

    def test_invariants(self, nominal):
        sol = designer.optimize_design(nominal)
        assert sol.q_net_star == analytic.q_net_reduced(sol.n1_star, sol.e1_star, nominal)
        assert sol.e2_star == analytic.e2_star(analytic.r_h(sol.n1_star, sol.e1_star, nominal), nominal)
        assert sol.candidates_evaluated >= nominal.n_subbands
        assert len(sol.per_n1) == nominal.n_subbands

    def test_ties_prefer_fewer_subbands(self, nominal):
        # no channel gain to select: every n1 ties at e1 = 0
        p = nominal.replace(n0=1.0)
        sol = designer.optimize_design(p)
        assert sol.n1_star == 1

    def test_monotone_in_resources(self, nominal):
        for m in (2, 5):
            p = nominal.replace(m=m)
            by_t = [designer.optimize_design(p.replace(t_block=t)).q_net_star for t in T_GRID]
            assert all(np.diff(by_t) >= 0)
            by_pf = [designer.optimize_design(p.replace(p_f=pf)).q_net_star
                     for pf in np.logspace(-2, 1, 8)]
            assert all(np.diff(by_pf) >= 0)

    def test_energies_grow_with_block_length(self, nominal):
        for m in (2, 5):
            sols = [designer.optimize_design(nominal.replace(m=m, t_block=t)) for t in T_GRID]
            e1 = [s.e1_star for s in sols]
            e2 = [s.e2_star for s in sols]
            assert all(np.diff(e1) >= 0) and all(np.diff(e2) >= 0)
            assert all(b > a for a, b in zip(e1, e2))

    def test_case_boundary_continuity(self, nominal):
        for m in (2, 5):
            p = nominal.replace(m=m)
            for n1 in (2, 10, 50):
                gain = g_value(n1, m)
                # alpha = beta*G and alpha = beta*M solved for N0
                for level in (gain, m):
                    n0 = (p.beta * level) ** 2 * p.energy_scale * (m - 1) / m**2
                    lo = designer.optimize_e1(n1, p.replace(n0=n0 * (1 - 1e-9)))
                    hi = designer.optimize_e1(n1, p.replace(n0=n0 * (1 + 1e-9)))
                    assert lo.case != hi.case
                    assert hi.q_net == pytest.approx(lo.q_net, rel=1e-6)


class TestSchemes:
    def test_phase1_only(self, nominal):
        d, value = designer.scheme_design(Scheme.PHASE_I_ONLY, nominal)
        assert d.e2 == 0
        assert value == pytest.approx(analytic.q_net(d, nominal).q_net, rel=1e-12)

    def test_phase2_only(self, nominal):
        d, value = designer.scheme_design(Scheme.PHASE_II_ONLY, nominal)
        assert d.n1 == 1 and d.e1 == 0
        assert value == pytest.approx(analytic.q_net(d, nominal).q_net, rel=1e-12)

    def test_ordering(self, nominal):
        vals = {s: designer.scheme_design(s, nominal)[1] for s in Scheme}
        assert vals[Scheme.NO_CSIT] <= vals[Scheme.PHASE_I_ONLY] <= vals[Scheme.TWO_PHASE]
        assert vals[Scheme.NO_CSIT] <= vals[Scheme.PHASE_II_ONLY] <= vals[Scheme.TWO_PHASE]
        assert vals[Scheme.TWO_PHASE] <= vals[Scheme.PERFECT_CSIT]
