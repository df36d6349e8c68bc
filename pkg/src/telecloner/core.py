"""Dense state-vector and density-matrix algebra for registers of qudits.

Subsystems are ordered big-endian: the leftmost subsystem is the most
significant digit of the composite index, so for four qudits
``index = ((a1 * d + a2) * d + b) * d + c``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances shared by the library and its checks."""

    norm: float = 1e-10
    cross: float = 1e-9
    opt: float = 1e-9

    def __post_init__(self):
        for name in ("norm", "cross", "opt"):
            if not getattr(self, name) > 0:
                raise ValueError(f"tolerance {name!r} must be strictly positive")


TOL = Tolerances()


def check_dim(d) -> int:
    """Validate a qudit dimension and return it as an int."""
    if isinstance(d, bool) or int(d) != d:
        raise TypeError(f"qudit dimension must be an integer, got {d!r}")
    d = int(d)
    if d < 2:
        raise ValueError(f"qudit dimension must be >= 2, got {d}")
    return d


def _frozen(array, dtype=complex) -> np.ndarray:
    out = np.array(array, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class StateVector:
    """Pure state on a register with subsystem dimensions ``dims``."""

    dims: tuple
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        if not dims or any(n < 1 for n in dims):
            raise ValueError(f"invalid register dims {self.dims!r}")
        amps = _frozen(self.amplitudes).reshape(-1)
        if amps.size != prod(dims):
            raise ValueError(
                f"{amps.size} amplitudes do not fit register of dims {dims}"
            )
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def total_dim(self) -> int:
        return self.amplitudes.size

    @property
    def n_subsystems(self) -> int:
        return len(self.dims)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = TOL.norm) -> bool:
        return abs(self.norm() ** 2 - 1.0) <= tol

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n == 0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.dims, self.amplitudes / n)

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per subsystem."""
        return self.amplitudes.reshape(self.dims)

    def projector(self) -> "DensityMatrix":
        return DensityMatrix(self.dims, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """Operator on a register; physical states are Hermitian, unit trace, PSD."""

    dims: tuple
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        n = prod(dims) if dims else 1
        mat = _frozen(self.matrix)
        if mat.shape != (n, n):
            raise ValueError(f"matrix of shape {mat.shape} does not fit dims {dims}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", mat)

    @property
    def total_dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def is_hermitian(self, tol: float = TOL.norm) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0) <= tol)

    def is_valid(self, tol: float = TOL.norm) -> bool:
        if not self.is_hermitian(tol) or abs(self.trace() - 1) > tol:
            return False
        return bool(np.linalg.eigvalsh(self.matrix).min() >= -tol)


def basis_state(dims: Sequence[int], digits: Sequence[int]) -> StateVector:
    """Computational basis ket ``|digits>`` on a register of ``dims``."""
    dims = tuple(dims)
    if len(digits) != len(dims):
        raise ValueError("need one digit per subsystem")
    for digit, n in zip(digits, dims):
        if not 0 <= digit < n:
            raise ValueError(f"digit {digit} out of range for dimension {n}")
    amps = np.zeros(prod(dims), dtype=complex)
    amps[np.ravel_multi_index(tuple(digits), dims)] = 1.0
    return StateVector(dims, amps)


def tensor_product(a: StateVector, b: StateVector) -> StateVector:
    """Composite state ``a ⊗ b`` with ``a``'s subsystems first."""
    return StateVector(a.dims + b.dims, np.kron(a.amplitudes, b.amplitudes))


def _keep_positions(keep: Iterable[int], n: int) -> list:
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep must name at least one subsystem")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"subsystem positions {keep} out of range for {n} subsystems")
    return keep


def partial_trace(state, keep: Iterable[int]) -> DensityMatrix:
    """Reduce ``state`` to the subsystems listed in ``keep``.

    ``state`` may be a :class:`StateVector` or a :class:`DensityMatrix`. Kept
    subsystems stay in register order regardless of the order given.
    """
    n = len(state.dims)
    keep = _keep_positions(keep, n)
    drop = [i for i in range(n) if i not in keep]
    kept_dims = tuple(state.dims[i] for i in keep)
    dk = prod(kept_dims)

    if isinstance(state, StateVector):
        # rho_keep = M M^dagger with M the (kept x dropped) amplitude matrix
        m = np.transpose(state.tensor(), keep + drop).reshape(dk, -1)
        return DensityMatrix(kept_dims, m @ m.conj().T)

    if isinstance(state, DensityMatrix):
        t = state.matrix.reshape(state.dims + state.dims)
        perm = keep + drop + [n + i for i in keep] + [n + i for i in drop]
        dd = prod([state.dims[i] for i in drop]) if drop else 1
        t = np.transpose(t, perm).reshape(dk, dd, dk, dd)
        return DensityMatrix(kept_dims, np.einsum("ajbj->ab", t))

    raise TypeError(f"cannot take partial trace of {type(state).__name__}")


def fidelity(psi: StateVector, rho: DensityMatrix) -> float:
    """Overlap ``<psi|rho|psi>`` of a pure target with a (reduced) state.

    The result is clamped to ``[0, 1]``.
    """
    if psi.dims != rho.dims:
        raise ValueError(f"dimension mismatch: {psi.dims} vs {rho.dims}")
    v = psi.amplitudes
    f = float(np.real(np.vdot(v, rho.matrix @ v)))
    return min(max(f, 0.0), 1.0)


def von_neumann_entropy(rho: DensityMatrix, tol: float = TOL.norm) -> float:
    """Entropy ``-Tr(rho log2 rho)`` in bits."""
    if not rho.is_hermitian(tol):
        raise ValueError("von Neumann entropy needs a Hermitian matrix")
    evals = np.linalg.eigvalsh(rho.matrix)
    # clamp eigensolver noise so the log stays finite
    evals = evals[evals > 0]
    return max(0.0, float(-np.sum(evals * np.log2(evals))))


def global_phase_equal(a: StateVector, b: StateVector, tol: float = TOL.cross) -> bool:
    """True iff ``a`` and ``b`` agree up to a global phase, ``|<a|b>| >= 1 - tol``."""
    if a.dims != b.dims:
        return False
    return abs(np.vdot(a.amplitudes, b.amplitudes)) >= 1.0 - tol
