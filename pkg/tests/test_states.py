"""
Test suite for density matrices, embeddings and Bloch coordinates.

Run with: pytest tests/test_states.py
"""

import numpy as np
import pytest

from quantum.linalg import random_density, random_pure
from quantum.states import (
    DensityMatrix,
    amplitude_embed,
    amplitude_embed_many,
    angle_embed,
    as_batch,
    bloch_coords,
    bloch_vectors,
    check_states,
    global_state,
    marginal,
    maximally_mixed,
    pure_state,
    repurify,
    von_neumann_entropy,
    zero_state,
)


class TestDensityMatrix:
    """Construction and validation."""

    def test_basic_properties(self):
        rho = maximally_mixed(2)
        assert rho.dim == 4
        assert rho.n_qubits == 2
        assert np.isclose(rho.trace, 1.0)
        assert np.isclose(rho.purity(), 0.25)
        assert not rho.is_pure()

    def test_zero_state_is_pure(self):
        assert zero_state(3).is_pure()

    def test_rejects_non_square(self):
        with pytest.raises(ValueError, match="square"):
            DensityMatrix(np.zeros((2, 4)))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError, match="finite"):
            DensityMatrix(np.array([[np.nan, 0], [0, 1]]))

    def test_validate_trace(self):
        with pytest.raises(ValueError, match="trace"):
            DensityMatrix(np.eye(2)).validate()

    def test_validate_negative_eigenvalue(self):
        with pytest.raises(ValueError, match="negative eigenvalue"):
            DensityMatrix(np.diag([1.5, -0.5])).validate()

    def test_validate_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            DensityMatrix(np.array([[0.5, 0.3], [0.0, 0.5]])).validate()

    def test_validate_returns_self(self, rng):
        rho = DensityMatrix(random_density(rng, 2))
        assert rho.validate() is rho


class TestEntropy:
    def test_pure_state_has_zero_entropy(self, rng):
        assert von_neumann_entropy(random_pure(rng, 2)) == pytest.approx(0.0, abs=1e-12)

    def test_maximally_mixed(self):
        assert von_neumann_entropy(maximally_mixed(2)) == pytest.approx(2 * np.log(2))

    def test_stack_returns_array(self, rng):
        stack = np.stack([random_density(rng, 1) for _ in range(3)])
        out = von_neumann_entropy(stack)
        assert out.shape == (3,)


class TestEmbeddings:
    """Amplitude and angle embeddings."""

    def test_amplitude_embed_pads_and_normalizes(self):
        rho = amplitude_embed([3.0, 4.0, 0.0], 2)
        assert rho.is_pure()
        assert np.allclose(np.diag(rho.mat).real, [0.36, 0.64, 0.0, 0.0])

    def test_amplitude_embed_many(self, rng):
        feats = rng.standard_normal((5, 3))
        out = amplitude_embed_many(feats, 2)
        assert out.shape == (5, 4, 4)
        check_states(out, require_pure=True)

    def test_amplitude_embed_too_many_features(self):
        with pytest.raises(ValueError, match="do not fit"):
            amplitude_embed(np.ones(5), 2)

    def test_amplitude_embed_zero_row(self):
        with pytest.raises(ValueError, match="row 1"):
            amplitude_embed_many(np.array([[1.0, 0.0], [0.0, 0.0]]), 1)

    def test_angle_embed_pi_flips_qubit(self):
        rho = angle_embed([np.pi, 0.0], 2)
        assert np.isclose(rho.mat[2, 2].real, 1.0)

    def test_angle_embed_half_pi_is_plus(self):
        assert np.allclose(bloch_coords(angle_embed([np.pi / 2], 1)), (1.0, 0.0, 0.0))

    def test_angle_embed_too_many_angles(self):
        with pytest.raises(ValueError, match="angles"):
            angle_embed([0.1, 0.2, 0.3], 2)

    def test_pure_state_zero_vector(self):
        with pytest.raises(ValueError, match="zero vector"):
            pure_state(np.zeros(2))


class TestGlobalState:
    """Uniform mixtures of point states."""

    def test_basis_mixture_is_maximally_mixed(self):
        points = [pure_state(np.eye(4)[i]) for i in range(4)]
        glob = global_state(points)
        assert glob.n_points == 4
        assert glob.n_qubits == 2
        assert np.allclose(glob.rho_glob.mat, np.eye(4) / 4)
        assert glob.components.shape == (4, 4, 4)

    def test_accepts_stacked_array(self, rng):
        stack = np.stack([random_density(rng, 1) for _ in range(6)])
        glob = global_state(stack)
        assert np.allclose(glob.rho_glob.mat, stack.mean(axis=0))

    def test_empty(self):
        with pytest.raises(ValueError, match="at least one"):
            global_state([])

    def test_mismatched_dimensions(self):
        with pytest.raises(ValueError, match="mismatched"):
            global_state([zero_state(1), zero_state(2)])


class TestBloch:
    """Bloch coordinates and marginals."""

    def test_zero_state_points_north(self):
        assert np.allclose(bloch_coords(zero_state(1)), (0.0, 0.0, 1.0))

    def test_y_eigenstate(self):
        rho = pure_state(np.array([1.0, 1.0j]))
        assert np.allclose(bloch_coords(rho), (0.0, 1.0, 0.0))

    def test_second_qubit_of_product(self):
        rho = angle_embed([0.0, np.pi], 2)
        vecs = bloch_vectors(rho.mat, qubit=1)
        assert np.allclose(vecs, [[0.0, 0.0, -1.0]])

    def test_qubit_out_of_range(self):
        with pytest.raises(ValueError, match="out of range"):
            bloch_vectors(zero_state(1).mat, qubit=1)

    def test_marginal_keeps_qubit(self):
        rho = angle_embed([np.pi, 0.0], 2)
        assert np.allclose(marginal(rho, [0]).mat, np.diag([0.0, 1.0]))


class TestCheckStates:
    """Batch validation names the offending state."""

    def test_valid_stack(self, rng):
        check_states(np.stack([random_density(rng, 2) for _ in range(3)]))

    def test_names_bad_trace_index(self, rng):
        stack = np.stack([random_density(rng, 1) for _ in range(3)])
        stack[2] *= 2
        with pytest.raises(ValueError, match="State 2"):
            check_states(stack)

    def test_require_pure(self):
        stack = np.stack([zero_state(1).mat, maximally_mixed(1).mat])
        with pytest.raises(ValueError, match="State 1 is not pure"):
            check_states(stack, require_pure=True)

    def test_repurify(self):
        mixed = np.diag([0.9, 0.1]).astype(complex)
        out = repurify(mixed)
        assert np.allclose(out[0], np.diag([1.0, 0.0]))

    def test_as_batch_shapes(self):
        assert as_batch(zero_state(1)).shape == (1, 2, 2)
        assert as_batch(np.eye(2) / 2).shape == (1, 2, 2)
        with pytest.raises(ValueError, match="square"):
            as_batch(np.zeros((2, 3)))
