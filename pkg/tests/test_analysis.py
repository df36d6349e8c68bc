from math import log2, sqrt

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from telecloner.analysis import (
    argmax_x0,
    finite_difference_gradient,
    fidelity_gradient,
    maximize_fidelity,
    sweep_grid,
    sweep_x0,
)
from telecloner.cloning import opt_fidelity_analytic
from telecloner.telecloning import fidelity_analytic, optimal_amplitudes, optimal_x0_y


class TestSweep:
    def test_grid_contains_markers(self):
        for d in (3, 5, 9):
            grid = sweep_grid(d, 201)
            assert 1 / sqrt(d) in grid
            assert optimal_x0_y(d)[0] in grid
            assert len(grid) == 203
            assert np.all(np.diff(grid) > 0)
            assert grid[0] == pytest.approx(1e-6) and grid[-1] == 1.0

    def test_qubit_markers_merge(self):
        assert len(sweep_grid(2, 201)) == 202

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            sweep_grid(3, 2)

    def test_qubit_shared_argmax(self):
        pts = sweep_x0(2)
        assert argmax_x0(pts, "entropy") == pytest.approx(1 / sqrt(2), abs=1e-15)
        assert argmax_x0(pts, "fidelity") == argmax_x0(pts, "entropy")
        assert max(p.entropy for p in pts) == pytest.approx(1, abs=1e-12)

    @pytest.mark.parametrize("d", [3, 5, 9])
    def test_argmaxes_differ(self, d):
        pts = sweep_x0(d)
        assert argmax_x0(pts, "entropy") == 1 / sqrt(d)
        assert argmax_x0(pts, "fidelity") == optimal_x0_y(d)[0]

    @pytest.mark.parametrize("d", [3, 5, 9])
    def test_tradeoff_strictly_monotone(self, d):
        lo, hi = 1 / sqrt(d), optimal_x0_y(d)[0]
        seg = [p for p in sweep_x0(d) if lo <= p.x0 <= hi]
        assert len(seg) > 3
        for a, b in zip(seg, seg[1:]):
            assert b.fidelity > a.fidelity
            assert b.entropy < a.entropy

    @pytest.mark.parametrize("d", [2, 3, 5, 9])
    def test_bounds_and_optimum(self, d):
        pts = sweep_x0(d)
        assert all(0 <= p.entropy <= log2(d) + 1e-12 for p in pts)
        assert all(0 <= p.fidelity <= 1 for p in pts)
        at = [p for p in pts if abs(p.x0 - optimal_x0_y(d)[0]) <= 1e-12]
        assert abs(at[0].fidelity - opt_fidelity_analytic(d)) < 1e-9

    def test_tie_breaks_to_smallest_x0(self):
        class P:
            def __init__(self, x0, f):
                self.x0, self.fidelity = x0, f

        assert argmax_x0([P(0.5, 1.0), P(0.2, 1.0), P(0.9, 0.3)], "fidelity") == 0.2


class TestGradient:
    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 9), st.integers(0, 2**32 - 1))
    def test_matches_central_differences(self, d, seed):
        x = np.random.default_rng(seed).random(d) + 0.01
        x /= np.linalg.norm(x)
        fd = finite_difference_gradient(x, 1e-6)
        g = fidelity_gradient(x)
        assert np.max(np.abs(g - fd)) <= 1e-6 * np.max(np.abs(fd))


class TestOptimizer:
    def test_qubit(self):
        res = maximize_fidelity(2, restarts=16, seed=42)
        np.testing.assert_allclose(res.x_star.x, [1 / sqrt(2)] * 2, atol=1e-4)
        assert res.f_star == pytest.approx(0.8535534, abs=1e-6)
        assert res.converged

    def test_five(self):
        res = maximize_fidelity(5, restarts=16, seed=42)
        assert abs(res.f_star - opt_fidelity_analytic(5)) < 1e-6

    def test_qutrit_tail_symmetric(self):
        x = maximize_fidelity(3, restarts=16, seed=42).x_star.x
        assert abs(x[1] - x[2]) < 1e-6

    def test_result_consistent(self):
        res = maximize_fidelity(4, restarts=3, seed=1)
        assert res.f_star == fidelity_analytic(res.x_star)
        assert 0 <= res.restart < 3

    def test_reproducible(self):
        a, b = maximize_fidelity(6, seed=7), maximize_fidelity(6, seed=7)
        np.testing.assert_array_equal(a.x_star.x, b.x_star.x)

    def test_iteration_cap(self):
        res = maximize_fidelity(6, restarts=1, seed=0, max_iter=1)
        assert not res.converged
        assert res.iterations == 1

    def test_restarts_validated(self):
        with pytest.raises(ValueError):
            maximize_fidelity(3, restarts=0)

    @pytest.mark.parametrize("d", range(2, 10))
    def test_rediscovers_optimal_channel(self, d):
        res = maximize_fidelity(d)
        xo = optimal_amplitudes(d).x
        assert abs(res.f_star - opt_fidelity_analytic(d)) <= 1e-6
        assert abs(res.x_star.x[0] - xo[0]) <= 1e-4
        assert np.max(np.abs(np.sort(res.x_star.x[1:]) - np.sort(xo[1:]))) <= 1e-4
