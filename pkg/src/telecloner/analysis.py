"""Entropy/fidelity sweeps over the channel and a numerical fidelity maximizer."""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .core import TOL, check_dim
from .telecloning import (
    ChannelAmplitudes,
    channel_entropy,
    fidelity_analytic,
    fidelity_formula,
    optimal_x0_y,
)

SWEEP_EPS = 1e-6
MERGE_TOL = 1e-12
DEFAULT_POINTS = 201
DEFAULT_RESTARTS = 16
DEFAULT_SEED = 42
MAX_ITER = 100_000
# larger steps let the negative curvature directions stall convergence
MAX_STEP = 1.0


@dataclass(frozen=True)
class SweepPoint:
    x0: float
    entropy: float
    fidelity: float


@dataclass(frozen=True)
class OptimizationResult:
    x_star: ChannelAmplitudes
    f_star: float
    iterations: int
    converged: bool
    seed: int
    restart: int


def sweep_grid(d: int, n_points: int = DEFAULT_POINTS) -> np.ndarray:
    """Uniform ``x0`` grid on ``[eps, 1]`` with ``1/sqrt(d)`` and ``X(d)`` injected."""
    d = check_dim(d)
    if n_points < 3:
        raise ValueError(f"n_points must be >= 3, got {n_points}")
    grid = np.linspace(SWEEP_EPS, 1.0, n_points)
    marks = [1.0 / sqrt(d), optimal_x0_y(d)[0]]
    for m in marks:
        # X(2) and 1/sqrt(2) coincide up to rounding; keep one point
        if not np.any(np.abs(grid - m) <= MERGE_TOL):
            grid = np.append(grid, m)
    return np.sort(grid)


def sweep_x0(d: int, n_points: int = DEFAULT_POINTS) -> list:
    """Entropy and clone fidelity along ``x0`` with ``x_1 = ... = x_{d-1}``."""
    points = []
    for x0 in sweep_grid(d, n_points):
        x = ChannelAmplitudes.symmetric(d, float(x0))
        points.append(SweepPoint(float(x0), channel_entropy(x), fidelity_analytic(x)))
    return points


def argmax_x0(points, key: str) -> float:
    """``x0`` of the first point maximizing ``key``; ties go to the smallest ``x0``."""
    best = max(getattr(p, key) for p in points)
    return min(p.x0 for p in points if getattr(p, key) == best)


def fidelity_gradient(x: np.ndarray) -> np.ndarray:
    """Euclidean gradient of the closed-form clone fidelity."""
    x = np.asarray(x, dtype=float)
    d = x.size
    s = x[1:].sum()
    g = np.empty(d)
    g[0] = sqrt(2.0) * s
    g[1:] = sqrt(2.0) * x[0] + s - x[1:]
    return g / d


def finite_difference_gradient(x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (fidelity_formula(x + e) - fidelity_formula(x - e)) / (2 * h)
    return g


def _project(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, 0.0, None)
    return x / np.linalg.norm(x)


def _ascend(x: np.ndarray, tol: float, max_iter: int):
    f = fidelity_formula(x)
    step = 1.0
    for it in range(1, max_iter + 1):
        g = fidelity_gradient(x)
        # backtrack until the projected step does not lose fidelity
        while True:
            x_new = _project(x + step * g)
            f_new = fidelity_formula(x_new)
            if f_new >= f or step < 1e-12:
                break
            step *= 0.5
        moved = float(np.max(np.abs(x_new - x)))
        if f_new >= f:
            x, f = x_new, f_new
        # the objective is flat to O(dx^2) near the optimum; judge progress on x
        if moved < tol:
            return x, f, it, True
        step = min(step * 2.0, MAX_STEP)
    return x, f, max_iter, False


def maximize_fidelity(
    d: int,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = DEFAULT_SEED,
    tol: float = TOL.opt,
    max_iter: int = MAX_ITER,
) -> OptimizationResult:
    """Maximize the clone fidelity over non-negative unit channel vectors.

    Projected gradient ascent on the sphere from ``restarts`` random interior
    starting points; the best restart wins (ties: lowest restart index). A
    restart has converged once an accepted step moves every coordinate by
    less than ``tol``. Nothing here uses the closed-form optimal amplitudes.
    """
    d = check_dim(d)
    if restarts < 1:
        raise ValueError(f"restarts must be >= 1, got {restarts}")
    rng = np.random.default_rng(seed)
    best = None
    for r in range(restarts):
        x0 = _project(np.abs(rng.standard_normal(d)) + 1e-3)
        x, f, iters, ok = _ascend(x0, tol, max_iter)
        if best is None or f > best[1]:
            best = (x, f, iters, ok, r)
    x, f, iters, ok, r = best
    x_star = ChannelAmplitudes(x)
    return OptimizationResult(x_star, fidelity_analytic(x_star), iters, ok, seed, r)
