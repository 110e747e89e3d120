"""
Quantum States

Density-matrix types, classical-to-quantum embeddings, Bloch readout and
the global (dataset-mixture) state.

A DensityMatrix wraps one matrix. Hot paths (channels, losses, metrics)
work on stacked arrays of shape (N, d, d); `as_batch` converts whatever
the caller holds into that form.
"""

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from quantum.linalg import (
    EIGENVALUE_FLOOR,
    HERMITIAN_TOL,
    basis_projector,
    eigh,
    hermiticity_error,
    hermitianize,
    n_qubits_of,
    partial_trace,
)

logger = logging.getLogger(__name__)

STATE_TOL = 1e-10
PURE_TOL = 1e-9

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class DensityMatrix:
    """
    Density matrix over n qubits.

    Construction checks shape and finiteness only; `validate` checks the
    full Hermitian / unit-trace / PSD contract.

    Attributes:
        mat: Complex matrix of dimension 2^n_qubits
    """

    mat: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"DensityMatrix needs a square matrix, got {mat.shape}")
        n_qubits_of(mat.shape[0])
        if not np.all(np.isfinite(mat)):
            raise ValueError("DensityMatrix entries must be finite")
        object.__setattr__(self, "mat", mat)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def n_qubits(self) -> int:
        return n_qubits_of(self.dim)

    @property
    def trace(self) -> float:
        return float(np.trace(self.mat).real)

    def purity(self) -> float:
        """Tr(ρ²)."""
        return float(purity(self.mat))

    def is_pure(self, tol: float = PURE_TOL) -> bool:
        return self.purity() > 1.0 - tol

    def eigenvalues(self) -> np.ndarray:
        return eigh(self.mat)[0]

    def validate(self, tol: float = STATE_TOL) -> "DensityMatrix":
        """
        Check the density-matrix invariants.

        Raises:
            ValueError: If the matrix is not Hermitian, unit-trace and PSD
        """
        err = hermiticity_error(self.mat)
        if err > tol:
            raise ValueError(f"State is not Hermitian (error {err:.3e})")
        if abs(self.trace - 1.0) > tol:
            raise ValueError(f"State trace is {self.trace!r}, expected 1")
        smallest = float(self.eigenvalues()[0])
        if smallest < -tol:
            raise ValueError(f"State has negative eigenvalue {smallest:.3e}")
        return self


@dataclass(frozen=True)
class GlobalState:
    """
    Uniform mixture of a dataset's states.

    The component states are kept alongside the mixture so that
    ensemble-linear quantities (the Wasserstein coupling) can be evaluated
    over the decomposition that defines rho_glob.

    Attributes:
        rho_glob: (1/N) Σ_i ρ_i
        n_points: N
        components: Stack of the N component matrices
    """

    rho_glob: DensityMatrix
    n_points: int
    components: np.ndarray

    @property
    def n_qubits(self) -> int:
        return self.rho_glob.n_qubits


StateLike = Union[DensityMatrix, np.ndarray]
StatesLike = Union[Sequence[DensityMatrix], np.ndarray]


def as_matrix(state: StateLike) -> np.ndarray:
    """Underlying complex matrix of a state."""
    if isinstance(state, DensityMatrix):
        return state.mat
    return np.asarray(state, dtype=complex)


def as_batch(states) -> np.ndarray:
    """
    Stack states into an (N, d, d) complex array.

    Accepts a sequence of DensityMatrix, a single DensityMatrix, an
    (N, d, d) or (d, d) array, or any object with a `states` array
    attribute (a Dataset).
    """
    if hasattr(states, "states") and not isinstance(states, np.ndarray):
        states = states.states
    if isinstance(states, DensityMatrix):
        return states.mat[None]
    if isinstance(states, np.ndarray):
        arr = np.asarray(states, dtype=complex)
    else:
        arr = np.stack([as_matrix(s) for s in states]) if len(states) else np.empty((0, 1, 1))
        arr = arr.astype(complex)
    if arr.ndim == 2:
        arr = arr[None]
    if arr.ndim != 3 or arr.shape[-1] != arr.shape[-2]:
        raise ValueError(f"Expected a stack of square matrices, got shape {arr.shape}")
    return arr


def to_states(mats: np.ndarray) -> list:
    """Wrap a stack of matrices as DensityMatrix objects."""
    return [DensityMatrix(m) for m in as_batch(mats)]


def purity(mats: np.ndarray) -> np.ndarray:
    """Tr(ρ²) for a matrix or stack (Hermitian input assumed)."""
    mats = np.asarray(mats)
    return np.sum(np.abs(mats) ** 2, axis=(-2, -1))


def von_neumann_entropy(rho: StateLike) -> Union[float, np.ndarray]:
    """
    S(ρ) = -Tr(ρ ln ρ) in nats.

    Eigenvalues are clipped at 0 as weights and floored at EIGENVALUE_FLOOR
    inside the logarithm, so pure states have entropy exactly 0.
    """
    single = isinstance(rho, DensityMatrix) or np.asarray(as_matrix(rho)).ndim == 2
    vals = eigh(as_matrix(rho))[0]
    weights = np.clip(vals, 0.0, None)
    out = -np.sum(weights * np.log(np.maximum(vals, EIGENVALUE_FLOOR)), axis=-1)
    return float(out) if single else out


def pure_state(psi: np.ndarray) -> DensityMatrix:
    """|ψ⟩⟨ψ| for a state vector (normalized here)."""
    psi = np.asarray(psi, dtype=complex).ravel()
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValueError("Cannot build a state from the zero vector")
    psi = psi / norm
    return DensityMatrix(np.outer(psi, np.conj(psi)))


def top_eigenvector(mats: np.ndarray) -> np.ndarray:
    """Eigenvector of the largest eigenvalue for each matrix in a stack."""
    _, vecs = eigh(as_batch(mats), check=False)
    return vecs[..., :, -1]


def amplitude_embed_many(features: np.ndarray, n_qubits: int) -> np.ndarray:
    """
    Amplitude-embed each row of a feature matrix.

    Rows are zero-padded at the tail to 2^n_qubits entries and normalized
    to unit L2 norm.

    Returns:
        (N, d, d) stack of pure density matrices

    Raises:
        ValueError: On too many features or an all-zero row
    """
    features = np.atleast_2d(np.asarray(features, dtype=float))
    dim = 2**n_qubits
    if features.shape[1] > dim:
        raise ValueError(
            f"{features.shape[1]} features do not fit in {n_qubits} qubits (max {dim})"
        )
    norms = np.linalg.norm(features, axis=1)
    zero_rows = np.flatnonzero(norms == 0)
    if zero_rows.size:
        raise ValueError(f"Cannot amplitude-embed a zero vector (row {int(zero_rows[0])})")
    amps = np.zeros((features.shape[0], dim))
    amps[:, : features.shape[1]] = features / norms[:, None]
    return np.einsum("ni,nj->nij", amps, amps).astype(complex)


def amplitude_embed(features: Sequence[float], n_qubits: int) -> DensityMatrix:
    """Amplitude-embed one real feature vector as a pure state."""
    return DensityMatrix(amplitude_embed_many(np.asarray(features)[None], n_qubits)[0])


def angle_embed(features: Sequence[float], n_qubits: int) -> DensityMatrix:
    """
    Angle embedding: Ry(x_q) on qubit q applied to |0…0⟩.

    Missing features leave their qubit in |0⟩.
    """
    features = np.asarray(features, dtype=float).ravel()
    if features.size > n_qubits:
        raise ValueError(f"{features.size} angles for only {n_qubits} qubits")
    angles = np.zeros(n_qubits)
    angles[: features.size] = features
    psi = np.ones(1, dtype=complex)
    for theta in angles:
        psi = np.kron(psi, np.array([np.cos(theta / 2), np.sin(theta / 2)], dtype=complex))
    return pure_state(psi)


def maximally_mixed(n_qubits: int) -> DensityMatrix:
    """(1/2^n) I."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    dim = 2**n_qubits
    return DensityMatrix(np.eye(dim, dtype=complex) / dim)


def zero_state(n_qubits: int) -> DensityMatrix:
    """|0…0⟩⟨0…0|."""
    return DensityMatrix(basis_projector(n_qubits, 0))


def global_state(points: StatesLike) -> GlobalState:
    """
    Uniform mixture of a list of states.

    Raises:
        ValueError: On an empty list or mixed qubit counts
    """
    if isinstance(points, np.ndarray):
        mats = as_batch(points)
    else:
        if len(points) == 0:
            raise ValueError("global_state needs at least one point")
        dims = {as_matrix(p).shape[-1] for p in points}
        if len(dims) > 1:
            raise ValueError(f"Points have mismatched dimensions: {sorted(dims)}")
        mats = as_batch(points)
    if mats.shape[0] == 0:
        raise ValueError("global_state needs at least one point")
    rho = hermitianize(np.mean(mats, axis=0))
    return GlobalState(rho_glob=DensityMatrix(rho), n_points=mats.shape[0], components=mats)


def bloch_vectors(mats: np.ndarray, qubit: int = 0) -> np.ndarray:
    """
    Bloch vectors (⟨X⟩, ⟨Y⟩, ⟨Z⟩) of one qubit for a stack of states.

    Returns:
        (N, 3) real array
    """
    mats = as_batch(mats)
    n = n_qubits_of(mats.shape[-1])
    if not 0 <= qubit < n:
        raise ValueError(f"Qubit index {qubit} out of range for {n} qubits")
    marginal = partial_trace(mats, n, [q for q in range(n) if q != qubit])
    coords = np.stack(
        [np.einsum("nij,ji->n", marginal, p) for p in (PAULI_X, PAULI_Y, PAULI_Z)],
        axis=-1,
    )
    imag = float(np.max(np.abs(coords.imag))) if coords.size else 0.0
    if imag > HERMITIAN_TOL:
        logger.debug("Discarding imaginary Bloch component of size %.3e", imag)
    return coords.real


def bloch_coords(rho: StateLike, qubit: int = 0) -> Tuple[float, float, float]:
    """Bloch coordinates of a single qubit of one state."""
    x, y, z = bloch_vectors(as_matrix(rho), qubit)[0]
    return float(x), float(y), float(z)


def repurify(mats: np.ndarray) -> np.ndarray:
    """Project each state onto its dominant eigenvector."""
    psi = top_eigenvector(mats)
    return np.einsum("ni,nj->nij", psi, np.conj(psi))


def check_states(mats: np.ndarray, require_pure: bool = False, tol: float = STATE_TOL) -> None:
    """
    Validate a stack of density matrices.

    Raises:
        ValueError: Naming the first offending index
    """
    mats = as_batch(mats)
    if not np.all(np.isfinite(mats)):
        raise ValueError("States contain non-finite entries")
    herm = np.max(np.abs(mats - np.conj(np.swapaxes(mats, -1, -2))), axis=(-2, -1))
    traces = np.trace(mats, axis1=-2, axis2=-1).real
    vals = eigh(hermitianize(mats), check=False)[0]
    for i in range(mats.shape[0]):
        if herm[i] > tol:
            raise ValueError(f"State {i} is not Hermitian (error {herm[i]:.3e})")
        if abs(traces[i] - 1.0) > tol:
            raise ValueError(f"State {i} has trace {traces[i]!r}")
        if vals[i, 0] < -tol:
            raise ValueError(f"State {i} has negative eigenvalue {vals[i, 0]:.3e}")
    if require_pure:
        p = purity(mats)
        bad = np.flatnonzero(p < 1.0 - PURE_TOL)
        if bad.size:
            raise ValueError(f"State {int(bad[0])} is not pure (purity {p[bad[0]]:.12f})")


def marginal(rho: StateLike, keep: Sequence[int]) -> DensityMatrix:
    """Reduced state on the `keep` qubits."""
    mat = as_matrix(rho)
    n = n_qubits_of(mat.shape[-1])
    keep = set(keep)
    traced = [q for q in range(n) if q not in keep]
    return DensityMatrix(partial_trace(mat, n, traced))
