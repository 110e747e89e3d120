"""
Test suite for the dense linear-algebra kernel.

Run with: pytest tests/test_linalg.py
"""

import numpy as np
import pytest

from quantum.linalg import (
    MAX_QUBITS,
    basis_projector,
    dagger,
    draw_seed,
    eigh,
    kron,
    kron_all,
    make_rng,
    mat_func,
    n_qubits_of,
    partial_trace,
    random_density,
    random_pure,
    random_unitary,
    spawn_rngs,
    sqrtm_psd,
)

ZERO = np.array([[1, 0], [0, 0]], dtype=complex)
ONE = np.array([[0, 0], [0, 1]], dtype=complex)
PLUS = 0.5 * np.ones((2, 2), dtype=complex)


class TestRandomness:
    """Seeded generators are reproducible."""

    def test_same_seed_same_stream(self):
        assert np.array_equal(make_rng(7).random(5), make_rng(7).random(5))

    def test_sequence_seeds_differ(self):
        assert not np.array_equal(make_rng([3, 0]).random(3), make_rng([3, 1]).random(3))

    def test_spawned_streams_are_independent(self):
        a, b = spawn_rngs(0, 2)
        assert not np.array_equal(a.random(4), b.random(4))

    def test_draw_seed_is_int(self):
        seed = draw_seed(make_rng(0))
        assert isinstance(seed, int) and 0 <= seed < 2**31


class TestKron:
    """Tensor products and the qubit-ordering convention."""

    def test_qubit_zero_is_most_significant(self):
        state = kron(ONE, ZERO)
        # |10⟩ has basis index 2
        assert state[2, 2] == 1
        assert np.trace(state) == 1

    def test_matches_numpy(self, rng):
        a = rng.standard_normal((2, 2))
        b = rng.standard_normal((4, 4))
        assert np.allclose(kron(a, b), np.kron(a, b))

    def test_batched(self, rng):
        a = rng.standard_normal((3, 2, 2))
        b = rng.standard_normal((3, 2, 2))
        out = kron(a, b)
        assert out.shape == (3, 4, 4)
        assert np.allclose(out[1], np.kron(a[1], b[1]))

    def test_kron_all_empty_is_scalar_one(self):
        assert kron_all([]).shape == (1, 1)

    def test_rejects_oversized_product(self):
        big = np.eye(2 ** (MAX_QUBITS - 1))
        with pytest.raises(ValueError, match="limit"):
            kron(big, np.eye(4))


class TestPartialTrace:
    """Partial trace over selected qubits."""

    def test_product_state_marginals(self):
        rho = kron(ZERO, PLUS)
        assert np.allclose(partial_trace(rho, 2, [1]), ZERO)
        assert np.allclose(partial_trace(rho, 2, [0]), PLUS)

    def test_bell_state_marginal_is_mixed(self):
        psi = np.array([1, 0, 0, 1]) / np.sqrt(2)
        bell = np.outer(psi, psi)
        assert np.allclose(partial_trace(bell, 2, [1]), np.eye(2) / 2)

    def test_trace_everything(self, rng):
        rho = random_density(rng, 3)
        out = partial_trace(rho, 3, [0, 1, 2])
        assert out.shape == (1, 1)
        assert np.isclose(out[0, 0], 1.0)

    def test_middle_qubit_keeps_order(self):
        rho = kron_all([ZERO, PLUS, ONE])
        assert np.allclose(partial_trace(rho, 3, [1]), kron(ZERO, ONE))

    def test_matches_index_summation(self, rng):
        rho = random_density(rng, 3)
        t = rho.reshape(2, 2, 2, 2, 2, 2)
        expected = np.zeros((2, 2), dtype=complex)
        for i in range(2):
            for j in range(2):
                for b in range(2):
                    for c in range(2):
                        expected[i, j] += t[i, b, c, j, b, c]
        assert np.allclose(partial_trace(rho, 3, [1, 2]), expected, atol=1e-12, rtol=0)

    def test_batch(self, rng):
        stack = np.stack([random_density(rng, 2) for _ in range(4)])
        out = partial_trace(stack, 2, [0])
        assert out.shape == (4, 2, 2)
        assert np.allclose(out[2], partial_trace(stack[2], 2, [0]))

    def test_out_of_range(self):
        with pytest.raises(ValueError, match="out of range"):
            partial_trace(np.eye(4) / 4, 2, [2])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            partial_trace(np.eye(4) / 4, 3, [0])


class TestSpectral:
    """eigh, mat_func and the PSD square root."""

    def test_eigh_ascending_and_gauge(self, rng):
        rho = random_density(rng, 2)
        vals, vecs = eigh(rho)
        assert np.all(np.diff(vals) >= 0)
        first = vecs[0]
        assert np.allclose(first.imag, 0.0)
        assert np.all(first.real >= 0)

    def test_eigh_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            eigh(np.array([[0, 1], [0, 0]], dtype=complex))

    def test_mat_func_log_requires_floor(self):
        with pytest.raises(ValueError, match="eigenvalue_floor"):
            mat_func(ZERO, np.log)
        out = mat_func(ZERO, np.log, eigenvalue_floor=1e-12)
        assert np.isclose(out[1, 1].real, np.log(1e-12))

    def test_mat_func_rejects_non_psd(self):
        with pytest.raises(ValueError, match="positive semidefinite"):
            mat_func(np.diag([1.0, -0.5]), np.sqrt)

    def test_sqrtm_squares_back(self, rng):
        rho = random_density(rng, 2)
        root = sqrtm_psd(rho)
        assert np.allclose(root @ root, rho, atol=1e-12)


class TestRandomStates:
    """Random states and unitaries."""

    def test_random_pure_is_pure(self, rng):
        psi = random_pure(rng, 2)
        assert np.isclose(np.trace(psi @ psi).real, 1.0)

    def test_random_density_rank(self, rng):
        rho = random_density(rng, 2, rank=2)
        vals = np.linalg.eigvalsh(rho)
        assert np.sum(vals > 1e-10) == 2
        assert np.isclose(np.trace(rho).real, 1.0)

    def test_random_density_bad_rank(self, rng):
        with pytest.raises(ValueError, match="rank"):
            random_density(rng, 1, rank=3)

    def test_random_unitary(self, rng):
        u = random_unitary(rng, 4)
        assert np.allclose(u @ dagger(u), np.eye(4))

    def test_random_unitary_dim_one(self, rng):
        u = random_unitary(rng, 1)
        assert np.isclose(abs(u[0, 0]), 1.0)


class TestHelpers:
    def test_n_qubits_of(self):
        assert n_qubits_of(8) == 3
        with pytest.raises(ValueError, match="power of two"):
            n_qubits_of(6)

    def test_basis_projector(self):
        p = basis_projector(2, 3)
        assert p[3, 3] == 1 and np.trace(p) == 1
