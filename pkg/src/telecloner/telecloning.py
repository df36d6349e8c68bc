"""Ancilla-free 1->2 phase-covariant telecloning of a qudit.

Alice holds the input qudit A1 and channel qudit A2; Bob and Charlie hold B
and C. The shared channel is ``sum_j x_j |j>_A2 |phi^0_j>_BC``. Alice
measures (A1, A2) in the generalized Bell basis, announces ``(l, k)``, and
Bob and Charlie each apply ``U^{lk}`` to their qudit.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import sqrt
from typing import Iterator

import numpy as np

from .cloning import phase_state, phase_vector, phi_basis_matrix
from .core import (
    TOL,
    StateVector,
    check_dim,
    fidelity,
    partial_trace,
    tensor_product,
)


class DegenerateOutcome(ValueError):
    """Raised when a Bell outcome has (numerically) zero probability."""


@dataclass(frozen=True)
class ChannelAmplitudes:
    """Real non-negative channel amplitudes ``x_0 .. x_{d-1}`` with unit norm."""

    x: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=float).reshape(-1)
        check_dim(x.size)
        if not np.all(np.isfinite(x)):
            raise ValueError("channel amplitudes must be finite")
        if np.any(x < 0):
            raise ValueError(f"channel amplitudes must be non-negative, got {x}")
        if abs(float(x @ x) - 1.0) > TOL.norm:
            raise ValueError(f"channel amplitudes must have unit norm, got |x|^2 = {x @ x!r}")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)

    @classmethod
    def normalize(cls, values) -> "ChannelAmplitudes":
        """Build from any non-negative, nonzero vector by rescaling to unit norm."""
        v = np.asarray(values, dtype=float).reshape(-1)
        if np.any(v < 0):
            raise ValueError(f"channel amplitudes must be non-negative, got {v}")
        n = np.linalg.norm(v)
        if n == 0:
            raise ValueError("channel amplitudes cannot all be zero")
        return cls(v / n)

    @classmethod
    def uniform(cls, d: int) -> "ChannelAmplitudes":
        d = check_dim(d)
        return cls(np.full(d, 1.0 / sqrt(d)))

    @classmethod
    def symmetric(cls, d: int, x0: float) -> "ChannelAmplitudes":
        """``x_0`` given, remaining weight spread evenly over ``x_1 .. x_{d-1}``."""
        d = check_dim(d)
        if not 0.0 <= x0 <= 1.0:
            raise ValueError(f"x0 must lie in [0, 1], got {x0}")
        rest = sqrt(max(1.0 - x0 * x0, 0.0) / (d - 1))
        return cls(np.array([x0] + [rest] * (d - 1)))

    @property
    def d(self) -> int:
        return self.x.size


@dataclass(frozen=True)
class BellOutcome:
    l: int
    k: int

    def check(self, d: int) -> "BellOutcome":
        if not (0 <= self.l < d and 0 <= self.k < d):
            raise ValueError(f"outcome ({self.l}, {self.k}) out of range for d={d}")
        return self


def all_outcomes(d: int) -> Iterator[BellOutcome]:
    """Every ``(l, k)`` in lexicographic order."""
    d = check_dim(d)
    for l in range(d):
        for k in range(d):
            yield BellOutcome(l, k)


@dataclass(frozen=True)
class OutcomeRecord:
    outcome: BellOutcome
    probability: float
    corrected_state: StateVector
    fidelity_B: float
    fidelity_C: float


@dataclass(frozen=True)
class ProtocolRun:
    d: int
    theta: np.ndarray
    x: ChannelAmplitudes
    records: tuple
    mean_fidelity: float

    @property
    def total_probability(self) -> float:
        return float(sum(r.probability for r in self.records))

    def fidelities(self) -> np.ndarray:
        """Array of shape (d*d, 2) holding (fidelity_B, fidelity_C) per outcome."""
        return np.array([(r.fidelity_B, r.fidelity_C) for r in self.records])


def channel_state(x: ChannelAmplitudes) -> StateVector:
    """Tripartite channel state on (A2, B, C)."""
    d = x.d
    bc = phi_basis_matrix(d)  # (d*d, d), column j is |phi^0_j>
    amps = (bc * x.x).T  # row j: x_j |phi^0_j>
    return StateVector((d, d, d), amps.reshape(-1))


def _xlogx(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def channel_entropy(x: ChannelAmplitudes) -> float:
    """Entropy in bits of Alice's channel qudit, from the squared amplitudes."""
    return max(0.0, _xlogx(x.x ** 2))


def channel_entanglement(x: ChannelAmplitudes) -> float:
    """Entanglement (bits) of the channel across the cut A2 | (B, C).

    Computed from the Schmidt coefficients of the simulated channel, so it
    serves as an independent check on :func:`channel_entropy`.
    """
    d = x.d
    schmidt = np.linalg.svd(channel_state(x).amplitudes.reshape(d, d * d), compute_uv=False)
    return max(0.0, _xlogx(schmidt ** 2))


def bell_state(d: int, l: int, k: int) -> StateVector:
    """Generalized Bell state ``(1/sqrt d) sum_j e^{2 pi i j k/d} |j>|j+l mod d>``."""
    d = check_dim(d)
    BellOutcome(l, k).check(d)
    j = np.arange(d)
    amps = np.zeros((d, d), dtype=complex)
    amps[j, (j + l) % d] = np.exp(2j * np.pi * j * k / d) / sqrt(d)
    return StateVector((d, d), amps)


@lru_cache(maxsize=64)
def bell_basis(d: int) -> np.ndarray:
    """Columns are ``bell_state(d, l, k)`` in lexicographic ``(l, k)`` order."""
    basis = np.stack([bell_state(d, o.l, o.k).amplitudes for o in all_outcomes(d)], axis=1)
    basis.setflags(write=False)
    return basis


def total_state(theta, x: ChannelAmplitudes) -> StateVector:
    """Input phase state on A1 joined with the channel on (A2, B, C)."""
    return tensor_product(phase_state(x.d, theta), channel_state(x))


def measure(total: StateVector, outcome: BellOutcome, tol: float = TOL.norm):
    """Project (A1, A2) of ``total`` onto a Bell state.

    Returns ``(probability, collapsed)`` where ``collapsed`` is the
    renormalized state of (B, C).
    """
    if len(total.dims) != 4 or len(set(total.dims)) != 1:
        raise ValueError(f"expected a four-qudit register, got dims {total.dims}")
    d = total.dims[0]
    outcome.check(d)
    bell = bell_state(d, outcome.l, outcome.k).amplitudes
    rest = bell.conj() @ total.amplitudes.reshape(d * d, d * d)
    probability = float(np.real(np.vdot(rest, rest)))
    if probability < tol:
        raise DegenerateOutcome(f"outcome ({outcome.l}, {outcome.k}) has probability {probability:.3e}")
    return probability, StateVector((d, d), rest / sqrt(probability))


def correction_unitary(d: int, outcome: BellOutcome) -> np.ndarray:
    """Receiver correction ``U^{lk} = sum_j e^{2 pi i j k/d} |j><j+l mod d|``."""
    d = check_dim(d)
    outcome.check(d)
    j = np.arange(d)
    u = np.zeros((d, d), dtype=complex)
    u[j, (j + outcome.l) % d] = np.exp(2j * np.pi * j * outcome.k / d)
    return u


def apply_local(state: StateVector, u: np.ndarray) -> StateVector:
    """Apply ``u`` to each of the two qudits of ``state``."""
    d = state.dims[0]
    m = state.amplitudes.reshape(d, d)
    return StateVector(state.dims, (u @ m @ u.T).reshape(-1))


def expected_collapsed_state(theta, x: ChannelAmplitudes, outcome: BellOutcome) -> StateVector:
    """Post-measurement (B, C) state written out directly, before correction."""
    d = x.d
    outcome.check(d)
    theta = phase_vector(theta, d)
    j = np.arange(d)
    shifted = (j + outcome.l) % d
    coeff = np.exp(-2j * np.pi * j * outcome.k / d) * x.x[shifted] * np.exp(1j * theta)
    phi = phi_basis_matrix(d)
    return StateVector((d, d), phi[:, shifted] @ coeff).normalized()


def expected_corrected_state(theta, x: ChannelAmplitudes, l: int) -> StateVector:
    """Corrected (B, C) state written out directly, global phase dropped.

    ``sum_j x_{j+l} e^{i theta_j} |phi^{d-l}_j>``; for ``l = 0`` this is
    ``sum_j x_j e^{i theta_j} |phi^0_j>``.
    """
    d = x.d
    theta = phase_vector(theta, d)
    j = np.arange(d)
    coeff = x.x[(j + l) % d] * np.exp(1j * theta)
    phi = phi_basis_matrix(d, (d - l) % d)
    return StateVector((d, d), phi @ coeff).normalized()


@lru_cache(maxsize=64)
def _corrections(d: int) -> tuple:
    return tuple(correction_unitary(d, o) for o in all_outcomes(d))


def measure_all(total: StateVector, tol: float = TOL.norm) -> list:
    """:func:`measure` for every outcome at once, in lexicographic ``(l, k)`` order."""
    if len(total.dims) != 4 or len(set(total.dims)) != 1:
        raise ValueError(f"expected a four-qudit register, got dims {total.dims}")
    d = total.dims[0]
    # row (l, k): <Phi^{lk}|_{A1 A2} |total>
    rest = bell_basis(d).conj().T @ total.amplitudes.reshape(d * d, d * d)
    probs = np.real(np.einsum("ij,ij->i", rest.conj(), rest))
    out = []
    for outcome, p, v in zip(all_outcomes(d), probs, rest):
        if p < tol:
            raise DegenerateOutcome(f"outcome ({outcome.l}, {outcome.k}) has probability {p:.3e}")
        out.append((outcome, float(p), StateVector((d, d), v / sqrt(p))))
    return out


def run_protocol(theta, x: ChannelAmplitudes, tol: float = TOL.norm) -> ProtocolRun:
    """Simulate every Bell outcome, correct, and score both clones."""
    d = x.d
    theta = phase_vector(theta, d)
    target = phase_state(d, theta)
    total = total_state(theta, x)
    records = []
    for (outcome, p, collapsed), u in zip(measure_all(total, tol), _corrections(d)):
        corrected = apply_local(collapsed, u)
        records.append(
            OutcomeRecord(
                outcome,
                p,
                corrected,
                fidelity(target, partial_trace(corrected, [0])),
                fidelity(target, partial_trace(corrected, [1])),
            )
        )
    mean = sum(r.probability * 0.5 * (r.fidelity_B + r.fidelity_C) for r in records)
    return ProtocolRun(d, theta, x, tuple(records), float(mean))


def sample_protocol(theta, x: ChannelAmplitudes, rng: np.random.Generator) -> OutcomeRecord:
    """One seeded run with a randomly drawn measurement outcome (demonstrations only)."""
    run = run_protocol(theta, x)
    probs = np.array([r.probability for r in run.records])
    return run.records[rng.choice(len(probs), p=probs / probs.sum())]


def fidelity_formula(x: np.ndarray) -> float:
    """Closed-form clone fidelity on a raw amplitude vector (no validation)."""
    x = np.asarray(x, dtype=float)
    d = x.size
    rest = x[1:]
    s = rest.sum()
    pairs = 0.5 * (s * s - rest @ rest)
    return float((1.0 + sqrt(2.0) * x[0] * s + pairs) / d)


def fidelity_analytic(x: ChannelAmplitudes) -> float:
    """Clone fidelity of the telecloner for channel ``x``, identical for every outcome."""
    return fidelity_formula(x.x)


def optimal_x0_y(d: int) -> tuple:
    """The pair ``(X(d), Y(d))`` of optimal channel amplitudes."""
    d = check_dim(d)
    big_d = sqrt(d * d + 4 * d - 4)
    denom = big_d * (big_d + d - 2)
    return sqrt(4 * (d - 1) / denom), sqrt((d * d + (d - 2) * big_d) / (denom * (d - 1)))


def optimal_amplitudes(d: int) -> ChannelAmplitudes:
    """Channel amplitudes whose clones reach the optimal phase-covariant fidelity."""
    x0, y = optimal_x0_y(d)
    return ChannelAmplitudes(np.array([x0] + [y] * (d - 1)))
