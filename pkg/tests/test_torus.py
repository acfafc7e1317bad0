import math

import numpy as np
import pytest

import helpers
from curvecount import (
    FNChart,
    MarkovChart,
    Slope,
    TorusHyperbolicLength,
    count_multicurves,
    count_simple,
    enumerate_simple,
    fn_from_markov,
    fn_to_markov,
    fricke_matrices,
    markov_reduce,
    matrix_slope_trace,
    mcg_apply,
    slope_length,
    slope_trace,
    transport_chart,
)
from curvecount.errors import (
    DepthCapExceeded,
    InvalidChart,
    NonConvergent,
    NonHyperbolicTrace,
    NonPositiveLength,
    NotUnimodular,
)
from curvecount.torus import _reduce_triple, fn_holonomy, trace_to_length

MODULAR = MarkovChart(3.0, 3.0, 3.0)
SYSTOLE = 2.0 * math.acosh(1.5)  # 1.9248473002384139

S = [[0, -1], [1, 0]]
T = [[1, 1], [0, 1]]


class TestSlope:
    def test_canonical_forms(self):
        assert Slope(1, 0) == Slope.from_vector(-1, 0)
        assert Slope.from_vector(-2, -3) == Slope(2, 3)
        with pytest.raises(ValueError):
            Slope(2, 4)
        with pytest.raises(ValueError):
            Slope(1, -2)


class TestChartValidation:
    def test_modular_triple_is_valid(self):
        assert MODULAR.triple() == (3.0, 3.0, 3.0)

    def test_off_cubic_rejected(self):
        with pytest.raises(InvalidChart):
            MarkovChart(3.0, 3.0, 5.9)

    def test_parabolic_rejected(self):
        with pytest.raises(InvalidChart):
            MarkovChart(2.0, 10.0, 10.0)

    def test_pinched_structures_have_traces_below_three(self):
        # traces between 2 and 3 occur for genuine structures
        chart = fn_to_markov(FNChart(0.1, 0.0))
        assert 2.0 < chart.x < 3.0


class TestFNConversion:
    def test_symmetric_twist_hits_modular_chart(self):
        # solve for the twist equalizing y and z, then compare with the
        # closed-form chart: it is the (3,3,3) point
        lstar = 2.0 * math.acosh(1.5)

        def gap(tau):
            c = fn_to_markov(FNChart(lstar, tau))
            return c.z - c.y

        lo, hi = -lstar, 0.0
        assert gap(lo) < 0 < gap(hi)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if gap(mid) < 0:
                lo = mid
            else:
                hi = mid
        tau0 = 0.5 * (lo + hi)
        assert tau0 == pytest.approx(-lstar / 2, abs=1e-10)
        chart = fn_to_markov(FNChart(lstar, tau0))
        assert chart.x == pytest.approx(3.0, abs=1e-9)
        assert chart.y == pytest.approx(3.0, abs=1e-9)
        assert chart.z == pytest.approx(3.0, abs=1e-9)

    def test_holonomy_matches_chart_and_cusp(self):
        rng = np.random.default_rng(21)
        for _ in range(25):
            fn = FNChart(float(rng.uniform(0.3, 3.0)), float(rng.uniform(-3, 3)))
            A, B = fn_holonomy(fn)
            chart = fn_to_markov(fn)
            assert np.trace(A) == pytest.approx(chart.x, rel=1e-12)
            assert np.trace(B) == pytest.approx(chart.y, rel=1e-12)
            assert np.trace(A @ B) == pytest.approx(chart.z, rel=1e-12)
            Ai = np.linalg.inv(A)
            Bi = np.linalg.inv(B)
            assert np.trace(A @ B @ Ai @ Bi) == pytest.approx(-2.0, abs=1e-8)

    def test_cubic_residual_within_tolerance(self):
        rng = np.random.default_rng(22)
        for _ in range(50):
            c = fn_to_markov(FNChart(float(rng.uniform(0.05, 4.0)),
                                     float(rng.uniform(-6, 6))))
            s = c.x**2 + c.y**2 + c.z**2
            assert abs(s - c.x * c.y * c.z) <= 1e-9 * s

    def test_full_twist_is_a_mapping_class(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            l = float(rng.uniform(0.4, 2.5))
            tau = float(rng.uniform(-2, 2))
            a = markov_reduce(fn_to_markov(FNChart(l, tau)))
            b = markov_reduce(fn_to_markov(FNChart(l, tau + l)))
            assert a.x == pytest.approx(b.x, abs=1e-9)
            assert a.y == pytest.approx(b.y, abs=1e-9)
            assert a.z == pytest.approx(b.z, abs=1e-9)

    def test_tau_zero_is_minimal_y(self):
        l = 1.3
        y0 = fn_to_markov(FNChart(l, 0.0)).y
        for tau in (-0.5, -0.1, 0.1, 0.7):
            assert fn_to_markov(FNChart(l, tau)).y > y0

    def test_nonpositive_length_rejected(self):
        for bad in (0.0, -1.0):
            with pytest.raises(NonPositiveLength):
                FNChart(bad, 0.0)

    def test_roundtrip(self):
        rng = np.random.default_rng(24)
        for _ in range(30):
            fn = FNChart(float(rng.uniform(0.3, 3.0)), float(rng.uniform(-4, 4)))
            back = fn_from_markov(fn_to_markov(fn))
            assert back.length == pytest.approx(fn.length, rel=1e-9)
            assert back.twist == pytest.approx(fn.twist, abs=1e-8)


class TestTraces:
    def test_chart_coordinates(self):
        assert slope_trace(Slope(1, 0), MODULAR) == 3.0
        assert slope_trace(Slope(0, 1), MODULAR) == 3.0
        assert slope_trace(Slope(1, 1), MODULAR) == 3.0

    def test_one_recursion_step(self):
        # child (2,1) of the base triangle: 3*3 - 3, and the explicit word
        # A*A*B realizes it
        assert slope_trace(Slope(2, 1), MODULAR) == 6.0
        A, B = fricke_matrices(MODULAR)
        assert abs(np.trace(A @ A @ B)) == pytest.approx(6.0, rel=1e-12)

    def test_three_two_against_matrix_oracle(self):
        got = slope_trace(Slope(3, 2), MODULAR)
        assert got == pytest.approx(15.0, rel=1e-12)
        assert got == pytest.approx(matrix_slope_trace(Slope(3, 2), MODULAR), rel=1e-9)

    def test_recursion_matches_oracle_on_random_charts(self):
        rng = np.random.default_rng(31)
        for _ in range(8):
            chart = helpers.random_chart(rng)
            x, y, z = chart.triple()
            for _ in range(60):
                q = int(rng.integers(0, 41))
                p = int(rng.integers(-40, 41))
                if q == 0:
                    p = 1
                if math.gcd(abs(p), q) != 1:
                    continue
                s = Slope(p, q)
                t1 = slope_trace(s, chart)
                t2 = helpers.oracle_matrix_trace(p, q, x, y, z)
                assert abs(t1 - t2) <= 1e-9 * max(1.0, abs(t1))

    def test_lengths(self):
        assert slope_length(Slope(1, 0), MODULAR) == pytest.approx(SYSTOLE, rel=1e-12)
        assert slope_length(Slope(2, 1), MODULAR) == pytest.approx(
            2.0 * math.acosh(3.0), rel=1e-12
        )

    def test_weighted_multicurve_is_ray_linear(self):
        fn = TorusHyperbolicLength(MODULAR)
        base = fn((2.0, 1.0))
        for n in (2, 3, 7):
            assert fn((2.0 * n, 1.0 * n)) == pytest.approx(n * base, rel=1e-12)

    def test_parabolic_trace_rejected(self):
        with pytest.raises(NonHyperbolicTrace):
            trace_to_length(1.9)
        with pytest.raises(NonHyperbolicTrace):
            trace_to_length(2.0)


class TestEnumeration:
    def test_below_systole_empty(self):
        assert enumerate_simple(MODULAR, 1.0) == []
        assert count_simple(MODULAR, 1.0) == 0

    def test_at_two_exactly_three_slopes(self):
        recs = enumerate_simple(MODULAR, 2.0)
        assert [(r.slope.p, r.slope.q) for r in recs] == [(0, 1), (1, 0), (1, 1)]
        for r in recs:
            assert r.length == pytest.approx(1.924847, abs=1e-6)

    def test_deterministic_order(self):
        recs = enumerate_simple(MODULAR, 6.0)
        keys = [(r.length, r.slope.p, r.slope.q) for r in recs]
        assert keys == sorted(keys)

    def test_monotone_in_length(self):
        small = {(r.slope.p, r.slope.q) for r in enumerate_simple(MODULAR, 3.0)}
        large = {(r.slope.p, r.slope.q) for r in enumerate_simple(MODULAR, 5.0)}
        assert small <= large

    def test_symmetric_chart_multiplicities(self):
        # (3,3,3) has a symmetry group permuting the three base slopes,
        # so per-length multiplicities come in multiples of 3
        recs = enumerate_simple(MODULAR, 6.0)
        byval = {}
        for r in recs:
            byval[round(r.length, 9)] = byval.get(round(r.length, 9), 0) + 1
        assert byval
        assert all(v % 3 == 0 for v in byval.values())

    def test_matches_brute_force_on_random_charts(self):
        rng = np.random.default_rng(41)
        for _ in range(3):
            chart = helpers.random_chart(rng)
            got = {(r.slope.p, r.slope.q) for r in enumerate_simple(chart, 6.0)}
            want = helpers.brute_force_short_slopes(chart, 6.0, 30)
            assert got == want

    def test_depth_cap_diagnostic(self):
        with pytest.raises(DepthCapExceeded):
            enumerate_simple(MODULAR, 6.0, depth_cap=2)

    def test_growth_ratio_near_four(self):
        ratio = count_simple(MODULAR, 120.0) / count_simple(MODULAR, 60.0)
        assert 3.5 <= ratio <= 4.5


class TestMulticurves:
    def test_just_above_systole(self):
        assert count_multicurves(MODULAR, SYSTOLE + 0.01) == 3

    def test_double_systole_counts_twice(self):
        L = 2 * SYSTOLE + 0.01
        assert count_simple(MODULAR, L) == 6
        assert count_multicurves(MODULAR, L) == 9  # 3 slopes twice + 3 new
        assert count_multicurves(MODULAR, 2 * SYSTOLE - 0.01) == 6

    def test_multicurve_identity(self):
        # multicurves at L are exactly simple counts at L/n summed over n
        L = 10.0
        total = 0
        n = 1
        while L / n > SYSTOLE:
            total += count_simple(MODULAR, L / n)
            n += 1
        assert count_multicurves(MODULAR, L) == total


class TestMappingClasses:
    def test_identity(self):
        s = Slope(3, 2)
        assert mcg_apply([[1, 0], [0, 1]], s) == s

    def test_twist_generator(self):
        assert mcg_apply(T, Slope(0, 1)) == Slope(1, 1)

    def test_not_unimodular(self):
        with pytest.raises(NotUnimodular):
            mcg_apply([[2, 0], [0, 1]], Slope(1, 0))

    def test_orbit_bfs_words_up_to_twelve(self):
        gens = [S, T, [[0, 1], [-1, 0]], [[1, -1], [0, 1]]]
        seen = {Slope(1, 0)}
        frontier = set(seen)
        for _ in range(12):
            nxt = set()
            for s in frontier:
                for g in gens:
                    img = mcg_apply(g, s)
                    if img not in seen:
                        seen.add(img)
                        nxt.add(img)
            frontier = nxt
        assert len(seen) == 466
        assert all(math.gcd(abs(s.p), s.q) == 1 for s in seen)
        # every slope with max(|p|, q) <= 9 is reached within 12 letters
        for (p, q) in helpers.canonical_slopes_upto(9):
            assert Slope(p, q) in seen

    def test_counts_invariant_under_transport(self):
        rng = np.random.default_rng(51)
        charts = [MODULAR, helpers.random_chart(rng)]
        word = np.array(S) @ np.array(T) @ np.array(T)
        for chart in charts:
            for g in (S, T, word.tolist()):
                moved = transport_chart(g, chart)
                assert count_simple(moved, 6.0) == count_simple(chart, 6.0)
                assert count_multicurves(moved, 6.0) == count_multicurves(chart, 6.0)


class TestReduction:
    def test_fixed_point(self):
        assert markov_reduce(MODULAR).triple() == (3.0, 3.0, 3.0)

    def test_one_exchange_move(self):
        assert markov_reduce(MarkovChart(3, 3, 6)).triple() == (3.0, 3.0, 3.0)

    def test_reduction_stays_on_cubic(self):
        rng = np.random.default_rng(61)
        for _ in range(20):
            c = markov_reduce(fn_to_markov(FNChart(float(rng.uniform(0.2, 2.0)),
                                                   float(rng.uniform(-8, 8)))))
            s = c.x**2 + c.y**2 + c.z**2
            assert abs(s - c.x * c.y * c.z) <= 1e-9 * s

    def test_step_cap_diagnostic(self):
        # (3, 6, 15) needs two exchange moves
        with pytest.raises(NonConvergent):
            _reduce_triple(3.0, 6.0, 15.0, max_steps=1)
        assert _reduce_triple(3.0, 6.0, 15.0)[:3] == (3.0, 3.0, 3.0)

    def test_reduction_tracks_mirror_parity(self):
        # a plain sort swap is orientation-reversing: (3,3,3) input in any
        # order never mirrors (all entries equal), one exchange move does
        assert _reduce_triple(3.0, 3.0, 3.0)[3] is False
        assert _reduce_triple(3.0, 3.0, 6.0)[3] is True  # one exchange, no swaps


class TestHyperbolicLengthFunction:
    def test_plane_symmetry(self):
        fn = TorusHyperbolicLength(MODULAR)
        assert fn((-3.0, -2.0)) == fn((3.0, 2.0))

    def test_scaled_direction_snap(self):
        fn = TorusHyperbolicLength(MODULAR)
        s = 0.37
        assert fn((s * 5, s * 3)) == pytest.approx(s * fn((5.0, 3.0)), rel=1e-12)

    def test_irrational_direction_rejected(self):
        fn = TorusHyperbolicLength(MODULAR)
        with pytest.raises(ValueError):
            fn((1.0, math.sqrt(2)))

    def test_zero(self):
        fn = TorusHyperbolicLength(MODULAR)
        assert fn((0.0, 0.0)) == 0.0
