"""
Dense Complex Linear Algebra

Matrix kernel shared by every other module: tensor products, partial
traces, Hermitian eigendecomposition, spectral matrix functions and the
seeded generators for random states and unitaries.

Conventions:
- Qubit 0 is the MOST significant bit of a computational-basis index, so
  an operator G on qubit q of an n-qubit register is
  kron(I_{2^q}, G, I_{2^(n-q-1)}).
- Every function accepts a stack of matrices with leading batch axes
  (..., d, d) and maps over it. Channels and losses rely on this to
  process a whole dataset with one numpy call.
- Storage is dense; registers are capped at MAX_QUBITS qubits.

Randomness:
    All random draws go through numpy's Philox bit generator, a
    counter-based generator whose stream depends only on the seed.
    Independent sub-streams come from SeedSequence spawning.
"""

import logging
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.stats import unitary_group

logger = logging.getLogger(__name__)

MAX_QUBITS = 12
MAX_DIM = 2**MAX_QUBITS

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
EIGENVALUE_FLOOR = 1e-12

SeedLike = Union[int, Sequence[int], np.random.SeedSequence]


def make_rng(seed: SeedLike) -> np.random.Generator:
    """
    Create the project's deterministic random generator.

    Args:
        seed: Integer seed, sequence of integers, or a SeedSequence

    Returns:
        numpy Generator backed by Philox
    """
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(seed))


def spawn_rngs(seed: SeedLike, count: int) -> List[np.random.Generator]:
    """Spawn `count` independent generators from one seed."""
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return [make_rng(child) for child in seed.spawn(count)]


def draw_seed(rng: np.random.Generator) -> int:
    """Draw an int seed for libraries that only accept integer random_state."""
    return int(rng.integers(0, 2**31 - 1))


def n_qubits_of(dim: int) -> int:
    """
    Number of qubits for a matrix dimension.

    Raises:
        ValueError: If dim is not a power of two
    """
    n = int(dim).bit_length() - 1
    if dim < 1 or 2**n != dim:
        raise ValueError(f"Dimension {dim} is not a power of two")
    return n


def _check_square(m: np.ndarray) -> None:
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise ValueError(f"Expected square matrices, got shape {m.shape}")
    if m.shape[-1] < 1:
        raise ValueError("Matrix dimension must be at least 1")


def dagger(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose over the last two axes."""
    return np.conj(np.swapaxes(m, -1, -2))


def hermitianize(m: np.ndarray) -> np.ndarray:
    """Return (m + m†) / 2."""
    return 0.5 * (m + dagger(m))


def hermiticity_error(m: np.ndarray) -> float:
    """Largest entry of |m - m†| over the whole stack."""
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(m - dagger(m))))


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Kronecker product of two (stacks of) matrices.

    (a⊗b)[i·db + k, j·db + l] = a[i, j]·b[k, l]. Leading batch axes
    broadcast.

    Raises:
        ValueError: If the product exceeds MAX_DIM
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    rows = a.shape[-2] * b.shape[-2]
    cols = a.shape[-1] * b.shape[-1]
    if max(rows, cols) > MAX_DIM:
        raise ValueError(
            f"Tensor product of dimension {rows}x{cols} exceeds the "
            f"{MAX_QUBITS}-qubit limit"
        )
    out = np.einsum("...ij,...kl->...ikjl", a, b)
    return out.reshape(out.shape[:-4] + (rows, cols))


def kron_all(mats: Iterable[np.ndarray]) -> np.ndarray:
    """Kronecker product of a sequence of matrices, left to right."""
    result = None
    for m in mats:
        result = np.asarray(m, dtype=complex) if result is None else kron(result, m)
    if result is None:
        return np.ones((1, 1), dtype=complex)
    return result


def basis_projector(n_qubits: int, index: int = 0) -> np.ndarray:
    """|index⟩⟨index| on n_qubits qubits (|0…0⟩⟨0…0| by default)."""
    dim = 2**n_qubits
    if not 0 <= index < dim:
        raise ValueError(f"Basis index {index} out of range for {n_qubits} qubits")
    p = np.zeros((dim, dim), dtype=complex)
    p[index, index] = 1.0
    return p


def partial_trace(m: np.ndarray, n_qubits: int, traced: Iterable[int]) -> np.ndarray:
    """
    Trace out a set of qubits.

    Args:
        m: Matrix (or stack) of dimension 2^n_qubits
        n_qubits: Number of qubits m acts on
        traced: Qubit indices to remove

    Returns:
        Reduced matrix over the remaining qubits, in their original order

    Raises:
        ValueError: On dimension mismatch or out-of-range indices
    """
    m = np.asarray(m, dtype=complex)
    _check_square(m)
    dim = 2**n_qubits
    if m.shape[-1] != dim:
        raise ValueError(
            f"Matrix dimension {m.shape[-1]} does not match {n_qubits} qubits"
        )
    traced = sorted(set(int(q) for q in traced))
    for q in traced:
        if not 0 <= q < n_qubits:
            raise ValueError(f"Qubit index {q} out of range for {n_qubits} qubits")
    if not traced:
        return m.copy()

    batch = m.shape[:-2]
    nb = len(batch)
    t = m.reshape(batch + (2,) * (2 * n_qubits))
    remaining = n_qubits
    # highest index first so lower axes keep their positions
    for q in reversed(traced):
        t = np.trace(t, axis1=nb + q, axis2=nb + remaining + q)
        remaining -= 1
    kept = 2**remaining
    return t.reshape(batch + (kept, kept))


def eigh(m: np.ndarray, check: bool = True) -> Tuple[np.ndarray, np.ndarray]:
    """
    Hermitian eigendecomposition with a deterministic eigenvector gauge.

    Eigenvalues are ascending. Each eigenvector column is rotated so its
    first nonzero component is real and positive.

    Args:
        m: Hermitian matrix or stack
        check: Verify Hermiticity within HERMITIAN_TOL

    Returns:
        (eigenvalues, eigenvectors as columns)

    Raises:
        ValueError: If m is not Hermitian
    """
    m = np.asarray(m, dtype=complex)
    _check_square(m)
    if check:
        err = hermiticity_error(m)
        if err > HERMITIAN_TOL:
            raise ValueError(f"Matrix is not Hermitian (max |m - m†| = {err:.3e})")
    vals, vecs = np.linalg.eigh(hermitianize(m))
    magnitudes = np.abs(vecs)
    pivot_rows = np.argmax(magnitudes > 1e-12, axis=-2)
    pivots = np.take_along_axis(vecs, pivot_rows[..., None, :], axis=-2)
    phases = pivots / np.abs(pivots)
    return vals, vecs * np.conj(phases)


def mat_func(
    m: np.ndarray,
    f: Callable[[np.ndarray], np.ndarray],
    eigenvalue_floor: Optional[float] = None,
) -> np.ndarray:
    """
    Apply a scalar function to a PSD Hermitian matrix through its spectrum.

    Args:
        m: Hermitian PSD matrix or stack
        f: Vectorized real function of the eigenvalues
        eigenvalue_floor: Clamp eigenvalues from below before applying f

    Returns:
        Hermitian matrix Q·diag(f(λ))·Q†

    Raises:
        ValueError: If m is not PSD, or f is not finite on the clamped spectrum
    """
    vals, vecs = eigh(m)
    smallest = float(np.min(vals)) if vals.size else 0.0
    if smallest < -PSD_TOL:
        raise ValueError(f"Matrix is not positive semidefinite (min eigenvalue {smallest:.3e})")
    if eigenvalue_floor is not None:
        vals = np.maximum(vals, eigenvalue_floor)
    with np.errstate(divide="ignore", invalid="ignore"):
        fvals = np.asarray(f(vals), dtype=float)
    if not np.all(np.isfinite(fvals)):
        raise ValueError(
            "Function is undefined on the clamped spectrum; "
            f"raise eigenvalue_floor (currently {eigenvalue_floor})"
        )
    out = np.einsum("...ij,...j,...kj->...ik", vecs, fvals, np.conj(vecs))
    return hermitianize(out)


def sqrtm_psd(m: np.ndarray, cutoff: float = 0.0) -> np.ndarray:
    """Square root of a PSD matrix; eigenvalues below `cutoff` become 0."""
    vals, vecs = eigh(m)
    vals = np.where(vals < cutoff, 0.0, vals)
    roots = np.sqrt(np.maximum(vals, 0.0))
    return hermitianize(np.einsum("...ij,...j,...kj->...ik", vecs, roots, np.conj(vecs)))


def random_pure(rng: np.random.Generator, n_qubits: int) -> np.ndarray:
    """Haar-random pure state |ψ⟩⟨ψ| on n_qubits qubits."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    dim = 2**n_qubits
    psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    psi /= np.linalg.norm(psi)
    return np.outer(psi, np.conj(psi))


def random_density(
    rng: np.random.Generator, n_qubits: int, rank: Optional[int] = None
) -> np.ndarray:
    """
    Random density matrix from the Ginibre ensemble.

    Args:
        rng: Random generator
        n_qubits: Register size
        rank: Rank of the Ginibre factor (full rank by default)

    Returns:
        G·G† / Tr(G·G†)
    """
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    dim = 2**n_qubits
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must be in [1, {dim}], got {rank}")
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ dagger(g)
    rho = hermitianize(rho)
    return rho / np.trace(rho).real


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-random unitary of the given dimension."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if dim == 1:
        return np.exp(2j * np.pi * rng.random()) * np.ones((1, 1), dtype=complex)
    return np.asarray(unitary_group.rvs(dim, random_state=rng), dtype=complex)
