"""Ancilla-free 1->2 phase-covariant cloner for qudits and its fidelity benchmarks."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import sqrt

import numpy as np

from .core import StateVector, check_dim, fidelity, partial_trace

TWO_PI = 2.0 * np.pi


def phase_vector(theta, d: int | None = None) -> np.ndarray:
    """Real phases reduced into ``[0, 2pi)``."""
    theta = np.mod(np.asarray(theta, dtype=float).reshape(-1), TWO_PI)
    if d is not None and theta.size != check_dim(d):
        raise ValueError(f"expected {d} phases, got {theta.size}")
    if theta.size < 2:
        raise ValueError("a phase vector needs at least two entries")
    # mod can round up to exactly 2pi for tiny negative inputs
    theta[theta >= TWO_PI] = 0.0
    theta.setflags(write=False)
    return theta


def random_phases(d: int, rng: np.random.Generator) -> np.ndarray:
    return phase_vector(rng.uniform(0.0, TWO_PI, size=check_dim(d)))


def phase_state(d: int, theta) -> StateVector:
    """Equatorial qudit state with amplitudes ``exp(i theta_j) / sqrt(d)``."""
    d = check_dim(d)
    theta = phase_vector(theta, d)
    return StateVector((d,), np.exp(1j * theta) / np.sqrt(d))


def phi_basis_state(d: int, k: int, j: int) -> StateVector:
    """Symmetric two-qudit state ``|kk>`` for ``j == k``, else ``(|jk> + |kj>)/sqrt 2``."""
    d = check_dim(d)
    if not (0 <= k < d and 0 <= j < d):
        raise ValueError(f"indices (k={k}, j={j}) out of range for d={d}")
    amps = np.zeros((d, d), dtype=complex)
    if j == k:
        amps[k, k] = 1.0
    else:
        amps[j, k] = amps[k, j] = 1.0 / sqrt(2.0)
    return StateVector((d, d), amps)


@lru_cache(maxsize=256)
def phi_basis_matrix(d: int, k: int = 0) -> np.ndarray:
    """Columns are the amplitudes of ``phi_basis_state(d, k, j)`` for j = 0..d-1."""
    d = check_dim(d)
    m = np.stack([phi_basis_state(d, k, j).amplitudes for j in range(d)], axis=1)
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class CloneOutput:
    state: StateVector
    clones: tuple
    fidelity_each: float


def econ_clone(psi: StateVector) -> CloneOutput:
    """Apply ``|j>|0> -> |phi^0_j>`` to a single-qudit input.

    The blank carrier starts in ``|0>``; the map is extended linearly so any
    normalized input is accepted. Fidelity is measured against the input.
    """
    if len(psi.dims) != 1:
        raise ValueError("econ_clone takes a single-qudit state")
    d = check_dim(psi.dims[0])
    out = StateVector((d, d), phi_basis_matrix(d) @ psi.amplitudes)
    clones = (partial_trace(out, [0]), partial_trace(out, [1]))
    return CloneOutput(out, clones, fidelity(psi, clones[0]))


def econ_fidelity_analytic(d: int) -> float:
    """Closed-form clone fidelity of the ancilla-free cloner."""
    d = check_dim(d)
    return ((d - 1) ** 2 + (1 + 2 * sqrt(2)) * (d - 1) + 2) / (2 * d * d)


def opt_fidelity_analytic(d: int) -> float:
    """Optimal 1->2 phase-covariant clone fidelity (ancilla allowed)."""
    d = check_dim(d)
    return (d + 2 + sqrt(d * d + 4 * d - 4)) / (4 * d)


def reduced_clones_equal(out: CloneOutput, tol: float = 1e-10) -> bool:
    a, b = (c.matrix for c in out.clones)
    return bool(np.max(np.abs(a - b)) <= tol)

