"""
Dataset Generators

Synthetic quantum dataset:
    Qubit 0 is a mixed state with Bloch vector r·n, r ~ U[r_min, r_max]
    and n uniform on the sphere; qubit 1 starts in |0⟩. A controlled
    Ry(θ), θ ~ N(theta_mean, theta_sd), with qubit 0 as control, then
    correlates the two. The second qubit is a function of the first, so
    the data compress to one latent qubit. Inputs are mixed.

Swiss roll:
    scikit-learn's make_swiss_roll (t = 1.5π(1 + 2u), height in [0, 21)),
    plus `noise_dims` Gaussian coordinates, per-point L2 normalization
    and amplitude embedding. Labels are +1 where t exceeds its median, so
    the classes are separable along the manifold.
"""

import logging
import math

import numpy as np
from sklearn.datasets import make_swiss_roll

from data.dataset import Dataset
from quantum.channel import ry
from quantum.linalg import dagger, draw_seed, make_rng
from quantum.states import PAULI_X, PAULI_Y, PAULI_Z, amplitude_embed_many

logger = logging.getLogger(__name__)


def sample_bloch_shell(rng: np.random.Generator, n: int, r_min: float = 0.6, r_max: float = 0.7) -> np.ndarray:
    """
    Bloch vectors with radius uniform in [r_min, r_max] and isotropic direction.

    Returns:
        (n, 3) array
    """
    if not 0.0 <= r_min <= r_max <= 1.0:
        raise ValueError(f"Shell bounds must satisfy 0 <= r_min <= r_max <= 1, got [{r_min}, {r_max}]")
    radii = rng.uniform(r_min, r_max, n)
    directions = rng.standard_normal((n, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    return radii[:, None] * directions


def controlled_ry(thetas: np.ndarray) -> np.ndarray:
    """Stack of CRY(θ) gates, control on qubit 0, target on qubit 1."""
    gates = np.zeros((len(thetas), 4, 4), dtype=complex)
    gates[:, 0, 0] = gates[:, 1, 1] = 1.0
    for k, theta in enumerate(thetas):
        gates[k, 2:, 2:] = ry(theta)
    return gates


def gen_synthetic_quantum(
    n: int = 1000,
    rng: np.random.Generator = None,
    r_min: float = 0.6,
    r_max: float = 0.7,
    theta_mean: float = math.pi / 2,
    theta_sd: float = math.pi / 20,
    seed: int = None,
) -> Dataset:
    """
    Two-qubit compressible dataset (unlabeled, mixed inputs).

    Args:
        n: Number of states
        rng: Random generator; built from `seed` when omitted
        r_min, r_max: Bloch-shell bounds of the first qubit
        theta_mean, theta_sd: Controlled-rotation angle distribution
        seed: Recorded in the provenance

    Returns:
        Dataset with allows_mixed=True and no labels
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if theta_sd < 0:
        raise ValueError(f"theta_sd must be >= 0, got {theta_sd}")
    if rng is None:
        seed = 0 if seed is None else seed
        rng = make_rng(seed)
    bloch = sample_bloch_shell(rng, n, r_min, r_max)
    thetas = rng.normal(theta_mean, theta_sd, n) if theta_sd > 0 else np.full(n, float(theta_mean))

    first = 0.5 * (
        np.eye(2, dtype=complex)[None]
        + np.einsum("nk,kij->nij", bloch, np.stack([PAULI_X, PAULI_Y, PAULI_Z]))
    )
    zero = np.array([[1, 0], [0, 0]], dtype=complex)
    joint = np.einsum("nij,kl->nikjl", first, zero).reshape(n, 4, 4)
    gates = controlled_ry(thetas)
    states = gates @ joint @ dagger(gates)

    provenance = {
        "generator": "synthetic-quantum",
        "seed": seed,
        "n": n,
        "r_min": r_min,
        "r_max": r_max,
        "theta_mean": theta_mean,
        "theta_sd": theta_sd,
    }
    logger.info("Generated %d synthetic two-qubit states", n)
    return Dataset(states=0.5 * (states + dagger(states)), provenance=provenance, allows_mixed=True)


def swiss_roll_features(
    n: int, noise_dims: int, noise_sd: float, rng: np.random.Generator
):
    """
    Raw Swiss-roll feature matrix and manifold coordinate.

    Returns:
        (features of shape (n, 3 + noise_dims), t of shape (n,))
    """
    points, t = make_swiss_roll(n_samples=n, noise=0.0, random_state=draw_seed(rng))
    noise = rng.normal(0.0, noise_sd, (n, noise_dims)) if noise_sd > 0 else np.zeros((n, noise_dims))
    return np.hstack([points, noise]), t


def gen_swiss_roll(
    n: int = 1000,
    noise_dims: int = 5,
    noise_sd: float = 0.2,
    rng: np.random.Generator = None,
    seed: int = None,
) -> Dataset:
    """
    Labeled Swiss-roll dataset amplitude-embedded into qubits.

    Args:
        n: Number of points
        noise_dims: Extra Gaussian coordinates appended to the 3-D roll
        noise_sd: Standard deviation of the extra coordinates
        rng: Random generator; built from `seed` when omitted
        seed: Recorded in the provenance

    Returns:
        Labeled Dataset of pure states on ceil(log2(3 + noise_dims)) qubits
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if noise_dims < 0 or noise_sd < 0:
        raise ValueError("noise_dims and noise_sd must be non-negative")
    if rng is None:
        seed = 0 if seed is None else seed
        rng = make_rng(seed)
    features, t = swiss_roll_features(n, noise_dims, noise_sd, rng)
    n_qubits = max(1, math.ceil(math.log2(features.shape[1])))
    normalized = features / np.linalg.norm(features, axis=1, keepdims=True)
    labels = np.where(t > np.median(t), 1, -1)
    provenance = {
        "generator": "swiss-roll",
        "seed": seed,
        "n": n,
        "noise_dims": noise_dims,
        "noise_sd": noise_sd,
        "n_qubits": n_qubits,
    }
    logger.info("Generated %d Swiss-roll points on %d qubits", n, n_qubits)
    return Dataset(
        states=amplitude_embed_many(normalized, n_qubits),
        labels=labels,
        provenance=provenance,
        features=features,
        coordinates=t,
    )


def threshold_labels_consistent(dataset: Dataset) -> bool:
    """True if the labels are exactly sign(t - median(t)) on the manifold coordinate."""
    if dataset.coordinates is None or dataset.labels is None:
        raise ValueError("Dataset has no manifold coordinate or labels to check")
    t = np.asarray(dataset.coordinates)
    return bool(np.array_equal(np.where(t > np.median(t), 1, -1), dataset.labels))
