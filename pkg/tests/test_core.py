import itertools
from math import log2, sqrt

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from telecloner.cloning import phase_state
from telecloner.core import (
    DensityMatrix,
    StateVector,
    Tolerances,
    basis_state,
    check_dim,
    fidelity,
    global_phase_equal,
    partial_trace,
    tensor_product,
    von_neumann_entropy,
)


def ket(*amps, dims=None):
    amps = np.asarray(amps, dtype=complex)
    return StateVector(dims or (amps.size,), amps)


def random_state(dims, seed):
    rng = np.random.default_rng(seed)
    n = int(np.prod(dims))
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return StateVector(dims, v / np.linalg.norm(v))


def brute_partial_trace(psi, dims, keep):
    """Sum |psi><psi| over every assignment of the traced-out digits."""
    n = len(dims)
    drop = [i for i in range(n) if i not in keep]
    kept_shape = [dims[i] for i in keep]
    dk = int(np.prod(kept_shape))
    rho = np.zeros((dk, dk), dtype=complex)
    amp = psi.reshape(dims)
    for a in itertools.product(*[range(dims[i]) for i in keep]):
        for b in itertools.product(*[range(dims[i]) for i in keep]):
            total = 0
            for r in itertools.product(*[range(dims[i]) for i in drop]):
                ia, ib = [0] * n, [0] * n
                for pos, v in zip(keep, a):
                    ia[pos] = v
                for pos, v in zip(keep, b):
                    ib[pos] = v
                for pos, v in zip(drop, r):
                    ia[pos] = ib[pos] = v
                total += amp[tuple(ia)] * np.conj(amp[tuple(ib)])
            rho[np.ravel_multi_index(a, kept_shape), np.ravel_multi_index(b, kept_shape)] = total
    return rho


class TestConstruction:
    @pytest.mark.parametrize("d", [0, 1, -3])
    def test_rejects_small_dimension(self, d):
        with pytest.raises(ValueError):
            check_dim(d)

    def test_rejects_non_integer_dimension(self):
        with pytest.raises(TypeError):
            check_dim(2.5)

    def test_amplitude_count_must_match_register(self):
        with pytest.raises(ValueError):
            StateVector((2, 2), np.ones(3))

    def test_states_are_immutable(self):
        s = ket(1, 0)
        with pytest.raises(ValueError):
            s.amplitudes[0] = 0

    def test_tolerances_positive(self):
        assert Tolerances().norm == 1e-10
        with pytest.raises(ValueError):
            Tolerances(cross=0.0)


class TestTensorProduct:
    def test_zero_zero(self):
        out = tensor_product(basis_state((2,), (0,)), basis_state((2,), (0,)))
        assert out.dims == (2, 2)
        np.testing.assert_allclose(out.amplitudes, [1, 0, 0, 0])

    def test_plus_one(self):
        plus = ket(1 / sqrt(2), 1 / sqrt(2))
        out = tensor_product(plus, basis_state((2,), (1,)))
        np.testing.assert_allclose(out.amplitudes, [0, 1 / sqrt(2), 0, 1 / sqrt(2)], atol=1e-15)

    def test_phase_state_with_blank_d3(self):
        # mixed-radix enumeration: index of |j, 0> is j * 3 + 0
        expected = np.zeros(9)
        for j in range(3):
            expected[j * 3 + 0] = 1 / sqrt(3)
        out = tensor_product(phase_state(3, [0, 0, 0]), basis_state((3,), (0,)))
        np.testing.assert_allclose(out.amplitudes, expected, atol=1e-15)
        assert np.flatnonzero(np.abs(out.amplitudes) > 0).tolist() == [0, 3, 6]

    def test_big_endian_four_qudits(self):
        d = 3
        digits = (2, 0, 1, 2)
        state = basis_state((d,) * 4, digits)
        a1, a2, b, c = digits
        assert np.argmax(np.abs(state.amplitudes)) == ((a1 * d + a2) * d + b) * d + c

    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 5), st.integers(2, 5), st.integers(0, 2**32 - 1))
    def test_preserves_norm(self, da, db, seed):
        out = tensor_product(random_state((da,), seed), random_state((db,), seed + 1))
        assert abs(out.norm() - 1) < 1e-10


class TestPartialTrace:
    def test_product_state(self):
        rho = partial_trace(basis_state((2, 2), (0, 0)).projector(), [0])
        np.testing.assert_allclose(rho.matrix, [[1, 0], [0, 0]])

    @pytest.mark.parametrize("keep", [[0], [1]])
    def test_bell_pair_is_maximally_mixed(self, keep):
        bell = ket(1 / sqrt(2), 0, 0, 1 / sqrt(2), dims=(2, 2))
        np.testing.assert_allclose(partial_trace(bell, keep).matrix, np.eye(2) / 2, atol=1e-15)

    def test_empty_keep_rejected(self):
        with pytest.raises(ValueError):
            partial_trace(ket(1, 0, 0, 0, dims=(2, 2)), [])

    def test_out_of_range_keep_rejected(self):
        with pytest.raises(ValueError):
            partial_trace(ket(1, 0, 0, 0, dims=(2, 2)), [2])

    @pytest.mark.parametrize(
        "dims,keep", [((2, 3), [0]), ((2, 3), [1]), ((3, 3, 3), [0, 2]), ((2, 3, 2, 2), [1, 3]), ((3, 3, 3), [1])]
    )
    def test_matches_brute_force(self, dims, keep):
        psi = random_state(dims, 7)
        expected = brute_partial_trace(psi.amplitudes, dims, keep)
        np.testing.assert_allclose(partial_trace(psi, keep).matrix, expected, atol=1e-13)
        np.testing.assert_allclose(partial_trace(psi.projector(), keep).matrix, expected, atol=1e-13)

    def test_keep_order_is_register_order(self):
        psi = random_state((2, 3), 3)
        assert partial_trace(psi, [1, 0]).dims == (2, 3)
        np.testing.assert_allclose(partial_trace(psi, [1, 0]).matrix, psi.projector().matrix, atol=1e-15)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 4), st.integers(0, 2**32 - 1))
    def test_staged_trace_consistent(self, d, seed):
        psi = random_state((d, d, d), seed)
        direct = partial_trace(psi, [0])
        staged = partial_trace(partial_trace(psi, [0, 1]), [0])
        np.testing.assert_allclose(direct.matrix, staged.matrix, atol=1e-12)
        assert abs(direct.trace() - 1) < 1e-10
        assert abs(partial_trace(psi, [0, 1, 2]).trace() - 1) < 1e-10
        assert direct.is_valid()


class TestFidelity:
    def test_identical(self):
        assert fidelity(ket(1, 0), ket(1, 0).projector()) == 1.0

    def test_orthogonal(self):
        assert fidelity(ket(1, 0), ket(0, 1).projector()) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            fidelity(ket(1, 0), ket(1, 0, 0).projector())

    def test_clone_of_qubit_phase_state(self):
        # the ancilla-free cloner output for d=2 written out by hand
        out = ket(1 / sqrt(2), 0.5, 0.5, 0, dims=(2, 2))
        f = fidelity(phase_state(2, [0, 0]), partial_trace(out, [0]))
        assert f == pytest.approx((4 + 2 * sqrt(2)) / 8, abs=1e-12)
        assert f == pytest.approx(0.8535534, abs=1e-7)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 6), st.floats(0, 2 * np.pi), st.integers(0, 2**32 - 1))
    def test_global_phase_invariance(self, d, phase, seed):
        psi, rho = random_state((d,), seed), random_state((d,), seed + 1).projector()
        shifted = StateVector(psi.dims, np.exp(1j * phase) * psi.amplitudes)
        assert abs(fidelity(psi, rho) - fidelity(shifted, rho)) < 1e-12


class TestEntropy:
    def test_pure_state(self):
        assert von_neumann_entropy(random_state((4,), 0).projector()) == pytest.approx(0, abs=1e-10)

    @pytest.mark.parametrize("d", [2, 3, 5, 9])
    def test_maximally_mixed(self, d):
        rho = DensityMatrix((d,), np.eye(d) / d)
        assert von_neumann_entropy(rho) == pytest.approx(log2(d), abs=1e-12)

    def test_diagonal_matches_direct_formula(self):
        x = np.array([0.6, 0.48, 0.64])
        x = x / np.linalg.norm(x)
        p = x**2
        direct = -sum(q * log2(q) for q in p)
        assert von_neumann_entropy(DensityMatrix((3,), np.diag(p))) == pytest.approx(direct, abs=1e-12)

    def test_small_negative_eigenvalues_clamped(self):
        rho = DensityMatrix((2,), np.diag([1 + 1e-12, -1e-12]))
        assert von_neumann_entropy(rho) == pytest.approx(0, abs=1e-10)

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValueError):
            von_neumann_entropy(DensityMatrix((2,), [[0.5, 0.1], [0.3, 0.5]]))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 5), st.integers(2, 5), st.integers(0, 2**32 - 1))
    def test_schmidt_symmetry_and_bounds(self, da, db, seed):
        psi = random_state((da, db), seed)
        sa = von_neumann_entropy(partial_trace(psi, [0]))
        sb = von_neumann_entropy(partial_trace(psi, [1]))
        assert abs(sa - sb) < 1e-9
        assert -1e-12 <= sa <= log2(min(da, db)) + 1e-12


class TestGlobalPhaseEqual:
    def test_phase_multiple(self):
        assert global_phase_equal(ket(1, 0), ket(np.exp(1j * np.pi / 3), 0))

    def test_orthogonal(self):
        assert not global_phase_equal(ket(1, 0), ket(0, 1))

    def test_register_mismatch(self):
        assert not global_phase_equal(ket(1, 0, 0, 0, dims=(2, 2)), ket(1, 0, 0, 0, dims=(4,)))
