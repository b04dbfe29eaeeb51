import math

import numpy as np
import pytest
from scipy.special import rel_entr, xlogy

import wiretap_exponent as wx
from wiretap_exponent.exponent import ExponentSolver

from conftest import make_bsc, random_channel, random_test_channel

LN2 = math.log(2.0)


def bsc_brute_force(p, r1, r2, step=1e-5):
    """Grid oracle over BSC test channels: the three constrained minima
    evaluated directly on a dense crossover grid."""
    eps = np.arange(0.0, 0.5 + step / 2, step)
    d = rel_entr(eps, p) + rel_entr(1.0 - eps, 1.0 - p)
    i = LN2 + xlogy(eps, eps) + xlogy(1.0 - eps, 1.0 - eps)
    e1 = r1 - r2 + d[i <= r2].min() if np.any(i <= r2) else math.inf
    band = (i >= r2) & (i <= r1)
    e2 = r1 + (d - i)[band].min() if np.any(band) else math.inf
    e3 = d[i >= r1].min() if np.any(i >= r1) else math.inf
    return min(e1, e2, e3)


class TestGammaDmc:
    def test_branches(self):
        rates = wx.RatePair(0.6, 0.1)
        assert wx.gamma_dmc(0.0, rates) == pytest.approx(0.1)
        assert wx.gamma_dmc(0.3, rates) == 0.0
        assert wx.gamma_dmc(0.8, rates) == pytest.approx(-0.2)

    def test_bracket_identity(self):
        rng = np.random.default_rng(0)
        rates = wx.RatePair(0.7, 0.25)
        for i in rng.uniform(0, 2.0, size=1000):
            expected = max(rates.r2 - i, 0.0) - max(i - rates.r1, 0.0)
            assert wx.gamma_dmc(float(i), rates) == pytest.approx(expected, abs=1e-15)


class TestRatePair:
    def test_rejects_r2_above_r1(self):
        with pytest.raises(ValueError):
            wx.RatePair(0.5, 0.6)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            wx.RatePair(-0.1, 0.0)

    def test_message_rate(self):
        assert wx.RatePair(0.6, 0.1).r == pytest.approx(0.5)


class TestInnerLagrangianMin:
    def test_mu_zero_returns_true_channel(self, bsc01):
        q, d, i = wx.inner_lagrangian_min(bsc01, 0.0)
        assert d == pytest.approx(0.0, abs=1e-12)
        assert i == pytest.approx(LN2 - (-0.1 * math.log(0.1) - 0.9 * math.log(0.9)),
                                  abs=1e-10)
        assert np.allclose(q.rows, bsc01.wiretap.rows, atol=1e-9)

    def test_bsc_tilted_crossover_s1(self, bsc01):
        # s = 1 keeps the true channel: crossover p
        q, _, _ = wx.inner_lagrangian_min(bsc01, 0.0)
        assert q.rows[0, 1] == pytest.approx(0.1, abs=1e-9)

    def test_bsc_tilted_crossover_s2(self, bsc01):
        # s = 2 gives p^{1/2} / (p^{1/2} + (1-p)^{1/2}) = 1/4 exactly for p = 0.1
        q, _, _ = wx.inner_lagrangian_min(bsc01, 1.0)
        assert q.rows[0, 1] == pytest.approx(0.25, abs=1e-9)

    def test_mu_out_of_range(self, bsc01):
        solver = ExponentSolver(bsc01)
        with pytest.raises(ValueError):
            solver.inner_lagrangian_min(1.5)

    def test_global_minimality_against_probes(self):
        rng = np.random.default_rng(4)
        spec = random_channel(rng, 3, 3)
        solver = ExponentSolver(spec)
        for mu in (-1.0, -0.6, -0.2, 0.3, 1.0):
            q, d, i = solver.inner_lagrangian_min(mu)
            value = d + mu * i
            for _ in range(1000):
                probe = random_test_channel(rng, spec)
                pv = wx.weighted_divergence(probe, spec.wiretap) \
                    + mu * wx.mutual_information(probe)
                assert pv >= value - 1e-9

    def test_reproducible_across_solvers(self, bsc01):
        a = ExponentSolver(bsc01).inner_lagrangian_min(-0.7)
        b = ExponentSolver(bsc01).inner_lagrangian_min(-0.7)
        assert a[1] == b[1] and a[2] == b[2]
        assert np.array_equal(a[0].rows, b[0].rows)


class TestParetoCurve:
    def test_contains_true_channel(self, bsc01):
        curve = wx.pareto_curve(bsc01, num_mu=41)
        best = min(curve.points, key=lambda p: abs(p.mu))
        assert best.mu == 0.0
        assert best.d_value == pytest.approx(0.0, abs=1e-12)

    def test_bsc_noiseless_endpoint(self, bsc01):
        curve = wx.pareto_curve(bsc01, num_mu=41)
        end = curve.points[-1]
        assert end.mu == -1.0
        assert end.i_value == pytest.approx(LN2, abs=1e-7)
        assert end.d_value == pytest.approx(math.log(1 / 0.9), abs=1e-7)

    def test_monotone_and_convex(self):
        rng = np.random.default_rng(5)
        spec = random_channel(rng, 3, 4)
        curve = wx.pareto_curve(spec, num_mu=101)
        iv = np.array([p.i_value for p in curve.points])
        dv = np.array([p.d_value for p in curve.points])
        assert np.all(np.diff(iv) >= -1e-10)
        for k in range(1, len(iv) - 1):
            if iv[k + 1] - iv[k - 1] < 1e-9:
                continue
            t = (iv[k] - iv[k - 1]) / (iv[k + 1] - iv[k - 1])
            chord = (1 - t) * dv[k - 1] + t * dv[k + 1]
            assert dv[k] <= chord + 1e-8

    def test_zero_divergence_only_at_ip(self, bsc01):
        solver = ExponentSolver(bsc01)
        curve = solver.pareto_curve(num_mu=81)
        for p in curve.points:
            if p.d_value <= 1e-10:
                assert abs(p.i_value - solver.i_p) <= 1e-4

    def test_i_range(self, bsc01):
        curve = wx.pareto_curve(bsc01, num_mu=21)
        assert curve.i_range[0] == curve.points[0].i_value
        assert curve.i_range[1] == curve.points[-1].i_value


class TestExponentRep1:
    def test_equal_rates_give_zero(self):
        rng = np.random.default_rng(6)
        for _ in range(5):
            spec = random_channel(rng, int(rng.integers(2, 4)),
                                  int(rng.integers(2, 4)))
            solver = ExponentSolver(spec)
            for r in (0.0, 0.05, 0.4, 1.0):
                assert solver.exponent_rep1(wx.RatePair(r, r)).e == 0.0

    def test_zero_region_below_ip(self, bsc01):
        solver = ExponentSolver(bsc01)
        res = solver.exponent_rep1(wx.RatePair(0.3, 0.1))
        assert res.e == 0.0
        assert res.active_branch in ("E2", "E3")

    def test_bsc_against_grid_oracle(self, bsc01):
        res = wx.exponent_rep1(bsc01, wx.RatePair(0.6, 0.1))
        brute = bsc_brute_force(0.1, 0.6, 0.1)
        assert res.e == pytest.approx(brute, abs=1e-4)
        v2 = wx.exponent_rep2(bsc01, wx.RatePair(0.6, 0.1))[0]
        assert abs(res.e - v2) <= 1e-4

    def test_min_and_branch_reporting(self, bsc01):
        solver = ExponentSolver(bsc01)
        res = solver.exponent_rep1(wx.RatePair(0.8, 0.2))
        assert res.e == min(res.e1, res.e2, res.e3)
        assert res.e1 >= res.e - 1e-12
        values = {"E1": res.e1, "E2": res.e2, "E3": res.e3}
        assert values[res.active_branch] <= res.e + 1e-9

    def test_e1_lower_bound(self):
        rng = np.random.default_rng(7)
        spec = random_channel(rng, 2, 3)
        solver = ExponentSolver(spec)
        for _ in range(20):
            r1 = float(rng.uniform(0, 1.0))
            r2 = float(rng.uniform(0, r1)) if r1 else 0.0
            res = solver.exponent_rep1(wx.RatePair(r1, r2))
            assert res.e1 >= r1 - r2 - 1e-12

    def test_q_star_consistency(self, bsc01):
        solver = ExponentSolver(bsc01)
        res = solver.exponent_rep1(wx.RatePair(0.6, 0.1))
        d = wx.weighted_divergence(res.q_star, bsc01.wiretap)
        i = wx.mutual_information(res.q_star)
        # active branch is E2/E3 at I = R1; the achiever sits there
        assert i == pytest.approx(0.6, abs=1e-5)
        assert res.e == pytest.approx(d, abs=1e-6)


class TestExponentRep2:
    def test_matches_rep1_random(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            spec = random_channel(rng, int(rng.integers(2, 4)),
                                  int(rng.integers(2, 4)))
            solver = ExponentSolver(spec)
            for _ in range(4):
                r1 = float(rng.uniform(0, 1.2))
                r2 = float(rng.uniform(0, r1)) if r1 else 0.0
                e1 = solver.exponent_rep1(wx.RatePair(r1, r2)).e
                e2 = solver.exponent_rep2(wx.RatePair(r1, r2))[0]
                assert abs(e1 - e2) <= 1e-4

    def test_r2_zero_lambda2_vanishes(self, bsc01):
        solver = ExponentSolver(bsc01)
        value, lam1, lam2 = solver.exponent_rep2(wx.RatePair(0.5, 0.0))
        assert lam2 == 0.0
        assert value == pytest.approx(solver.exponent_r2_zero(0.5), abs=1e-9)

    def test_bsc_against_closed_form(self, bsc01):
        for rates in (wx.RatePair(0.6, 0.1), wx.RatePair(0.9, 0.4),
                      wx.RatePair(0.4, 0.0)):
            generic = wx.exponent_rep2(bsc01, rates)[0]
            closed = wx.bsc_exponent_closed_form(0.1, rates)
            assert generic == pytest.approx(closed, abs=1e-5)

    def test_solve_populates_all_fields(self, bsc01):
        res = wx.solve_exponent(bsc01, wx.RatePair(0.6, 0.1))
        assert res.rep2_value is not None
        assert 0.0 <= res.lambda1 <= 1.0
        assert 0.0 <= res.lambda2 <= 1.0
        assert abs(res.e - res.rep2_value) <= 1e-4


class TestExponentR2Zero:
    def test_zero_rate(self, bsc01):
        assert wx.exponent_r2_zero(bsc01, 0.0) == pytest.approx(0.0, abs=1e-12)

    def test_beyond_curve_matches_rep1(self, bsc01):
        solver = ExponentSolver(bsc01)
        r = solver.i_max + 0.2
        assert solver.exponent_r2_zero(r) == pytest.approx(
            solver.exponent_rep1(wx.RatePair(r, 0.0)).e, abs=1e-8)

    def test_bsc_r_half_scalar_oracle(self, bsc01):
        solver = ExponentSolver(bsc01)
        value = solver.exponent_r2_zero(0.5)
        assert value == pytest.approx(
            solver.exponent_rep2(wx.RatePair(0.5, 0.0))[0], abs=1e-6)
        # dense scalar grid over (eps, lambda1)
        eps = np.linspace(1e-9, 0.5, 4001)
        d = rel_entr(eps, 0.1) + rel_entr(1 - eps, 0.9)
        i = LN2 + xlogy(eps, eps) + xlogy(1 - eps, 1 - eps)
        lam = np.linspace(0.0, 1.0, 2001)
        inner = d[None, :] + lam[:, None] * (0.5 - i[None, :])
        oracle = inner.min(axis=1).max()
        assert value == pytest.approx(oracle, abs=1e-4)


class TestBscClosedForm:
    def test_rejects_bad_p(self):
        with pytest.raises(ValueError):
            wx.bsc_exponent_closed_form(0.0, wx.RatePair(0.5, 0.1))
        with pytest.raises(ValueError):
            wx.bsc_exponent_closed_form(0.6, wx.RatePair(0.5, 0.1))

    def test_useless_channel_p_half(self):
        spec = make_bsc(0.5)
        for rates in (wx.RatePair(0.5, 0.1), wx.RatePair(0.3, 0.0)):
            closed = wx.bsc_exponent_closed_form(0.5, rates)
            generic = wx.exponent_rep2(spec, rates)[0]
            assert closed == pytest.approx(generic, abs=1e-6)
            assert closed == pytest.approx(rates.r, abs=1e-6)

    def test_near_noiseless_limit(self):
        # p -> 0 hands the eavesdropper the codeword: zero exponent below
        # ln 2, and min(R1 - R2, R1 - ln 2) above it
        p = 1e-6
        spec = make_bsc(p)
        rates = wx.RatePair(0.5, 0.2)
        closed = wx.bsc_exponent_closed_form(p, rates)
        generic = wx.exponent_rep2(spec, rates)[0]
        assert abs(closed - generic) <= 1e-3
        assert closed == pytest.approx(0.0, abs=1e-3)
        rates = wx.RatePair(0.8, 0.2)
        closed = wx.bsc_exponent_closed_form(p, rates)
        generic = wx.exponent_rep2(spec, rates)[0]
        assert abs(closed - generic) <= 1e-3
        assert closed == pytest.approx(min(rates.r, rates.r1 - LN2), abs=1e-3)


class TestShapeProperties:
    def test_monotone_and_concave_small_grid(self, bsc01):
        solver = ExponentSolver(bsc01)
        r1s = np.linspace(0.1, 0.9, 7)
        r2s = np.linspace(0.0, 0.9, 7)
        e = {}
        for r1 in r1s:
            for r2 in r2s[r2s <= r1 + 1e-12]:
                e[(round(float(r1), 9), round(float(r2), 9))] = \
                    solver.exponent_rep1(wx.RatePair(float(r1), min(float(r2), float(r1)))).e
        for r2 in r2s:
            col = [e[k] for k in sorted(e) if k[1] == round(float(r2), 9)]
            assert all(b >= a - 1e-6 for a, b in zip(col, col[1:]))
        for r1 in r1s:
            row = [e[k] for k in sorted(e) if k[0] == round(float(r1), 9)]
            assert all(b <= a + 1e-6 for a, b in zip(row, row[1:]))
            for a, b, c in zip(row, row[1:], row[2:]):
                assert a - 2 * b + c <= 1e-6

    def test_bounds_everywhere(self):
        rng = np.random.default_rng(9)
        spec = random_channel(rng, 3, 2)
        solver = ExponentSolver(spec)
        for _ in range(25):
            r1 = float(rng.uniform(0, 1.5))
            r2 = float(rng.uniform(0, r1)) if r1 else 0.0
            res = solver.exponent_rep1(wx.RatePair(r1, r2))
            assert -1e-12 <= res.e <= r1 - r2 + 1e-9


class TestSparseSupport:
    def test_rep_equivalence_with_structural_zeros(self):
        rng = np.random.default_rng(31337)
        for _ in range(25):
            nx = int(rng.integers(2, 5))
            nz = int(rng.integers(2, 5))
            rows = rng.dirichlet(np.full(nz, 1.0), size=nx)
            mask = rng.random((nx, nz)) < 0.3
            for x in range(nx):
                mask[x, int(rng.integers(0, nz))] = False
            rows = np.where(mask, 0.0, rows)
            rows = rows / rows.sum(axis=1, keepdims=True)
            px = rng.dirichlet(np.full(nx, 2.0))
            px = 0.85 * px + 0.15 / nx
            spec = wx.ChannelSpec(wx.Distribution(px / px.sum()), wx.Dmc(rows))
            solver = ExponentSolver(spec)
            for _ in range(4):
                r1 = float(rng.uniform(0, 1.4))
                r2 = float(rng.uniform(0, r1)) if r1 else 0.0
                rates = wx.RatePair(r1, r2)
                a = solver.exponent_rep1(rates).e
                b = solver.exponent_rep2(rates)[0]
                assert abs(a - b) <= 1e-4
                assert -1e-10 <= a <= r1 - r2 + 1e-8

    def test_unreachable_output_column_dropped(self):
        spec = wx.ChannelSpec(wx.Distribution([0.6, 0.4]),
                              wx.Dmc([[0.9, 0.0, 0.1], [0.2, 0.0, 0.8]]))
        solver = ExponentSolver(spec)
        res = solver.solve(wx.RatePair(0.5, 0.1))
        assert abs(res.e - res.rep2_value) <= 1e-6
        assert np.all(res.q_star.rows[:, 1] == 0.0)

    def test_near_deterministic_rows_and_skewed_input(self):
        # tiny equilibrium masses make the small-s landscape delicate;
        # both representations must still agree
        rng = np.random.default_rng(777)
        for _ in range(8):
            nx = int(rng.integers(2, 6))
            nz = int(rng.integers(2, 6))
            rows = np.full((nx, nz), 1e-7)
            for x in range(nx):
                rows[x, int(rng.integers(0, nz))] = 1.0
            rows = rows / rows.sum(axis=1, keepdims=True)
            px = rng.dirichlet(np.full(nx, 0.3))
            px = np.maximum(px, 1e-6)
            spec = wx.ChannelSpec(wx.Distribution(px / px.sum()), wx.Dmc(rows))
            solver = ExponentSolver(spec)
            for _ in range(3):
                r1 = float(rng.uniform(0, 2.0))
                r2 = float(rng.uniform(0, r1)) if r1 else 0.0
                rates = wx.RatePair(r1, r2)
                a = solver.exponent_rep1(rates).e
                b = solver.exponent_rep2(rates)[0]
                assert abs(a - b) <= 1e-4
                assert -1e-9 <= a <= r1 - r2 + 1e-7


class TestDeterminism:
    def test_bitwise_reproducible(self, bsc01):
        rates = wx.RatePair(0.6, 0.1)
        a = wx.solve_exponent(bsc01, rates)
        b = wx.solve_exponent(bsc01, rates)
        assert (a.e, a.e1, a.e2, a.e3, a.rep2_value, a.lambda1, a.lambda2) == \
            (b.e, b.e1, b.e2, b.e3, b.rep2_value, b.lambda1, b.lambda2)
        assert np.array_equal(a.q_star.rows, b.q_star.rows)

    def test_query_order_independent(self, bsc01):
        s1 = ExponentSolver(bsc01)
        s2 = ExponentSolver(bsc01)
        pairs = [wx.RatePair(0.6, 0.1), wx.RatePair(0.8, 0.5),
                 wx.RatePair(0.2, 0.05)]
        res_fwd = [s1.exponent_rep1(r).e for r in pairs]
        res_rev = [s2.exponent_rep1(r).e for r in reversed(pairs)]
        assert res_fwd == list(reversed(res_rev))
