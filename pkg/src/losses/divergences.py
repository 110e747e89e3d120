"""
Quantum Divergences

Reconstruction and regularization losses for the autoencoder objective.

Reconstruction (L1): fidelity, KLD, JSD, Wasserstein (auxiliary form)
Regularization (L2): fidelity, KLD, JSD against the maximally mixed prior

Every function takes single states (DensityMatrix or (d, d) array) or
stacks of shape (N, d, d). Single inputs return a float; stacks return
one value per state. Logarithms are natural (nats) and spectra are
floored at EIGENVALUE_FLOOR inside logs.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Union

import numpy as np

from quantum.linalg import (
    EIGENVALUE_FLOOR,
    HERMITIAN_TOL,
    PSD_TOL,
    eigh,
    hermiticity_error,
    hermitianize,
    n_qubits_of,
    sqrtm_psd,
)
from quantum.states import PURE_TOL, DensityMatrix, as_batch, purity, von_neumann_entropy

logger = logging.getLogger(__name__)

# eigenvalues below this are treated as exact zeros inside square roots
SQRT_CUTOFF = 1e-13
WASSERSTEIN_WEIGHT_CUTOFF = 1e-12

Value = Union[float, np.ndarray]


class LossKind(Enum):
    """Divergence families used by the objective."""

    FIDELITY = "fidelity"
    KLD = "kld"
    JSD = "jsd"
    WASSERSTEIN = "wasserstein"

    @classmethod
    def parse(cls, value: Union[str, "LossKind"]) -> "LossKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            names = ", ".join(k.value for k in cls)
            raise ValueError(f"Unknown loss kind '{value}' (expected one of: {names})") from None


class LossRole(Enum):
    RECONSTRUCTION = "reconstruction"
    REGULARIZATION = "regularization"


def check_role(kind: LossKind, role: LossRole) -> LossKind:
    """
    Raises:
        ValueError: If a Wasserstein loss is requested for regularization
    """
    if role is LossRole.REGULARIZATION and kind is LossKind.WASSERSTEIN:
        raise ValueError("The Wasserstein loss is only available for reconstruction")
    return kind


@dataclass(frozen=True)
class CostObservable:
    """
    Hermitian PSD cost operator over two N_X-qubit registers.

    Attributes:
        mat: Matrix of dimension 4^n_x
        n_x: Qubits per register
    """

    mat: np.ndarray
    n_x: int

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=complex)
        dim = 4**self.n_x
        if mat.shape != (dim, dim):
            raise ValueError(f"Cost observable for n_x={self.n_x} must be {dim}x{dim}, got {mat.shape}")
        if hermiticity_error(mat) > HERMITIAN_TOL:
            raise ValueError("Cost observable is not Hermitian")
        smallest = float(np.linalg.eigvalsh(hermitianize(mat))[0])
        if smallest < -PSD_TOL:
            raise ValueError(f"Cost observable is not PSD (min eigenvalue {smallest:.3e})")
        object.__setattr__(self, "mat", mat)


def default_cost(n_x: int) -> CostObservable:
    """
    C = (I - SWAP) / 2, the projector onto the antisymmetric subspace of
    two N_X-qubit registers. Tr[(ρ⊗σ)C] = (1 - Tr ρσ) / 2.
    """
    if n_x < 1:
        raise ValueError("n_x must be >= 1")
    d = 2**n_x
    identity = np.eye(d * d).reshape(d, d, d, d)
    swap = identity.transpose(0, 1, 3, 2)
    return CostObservable(mat=((identity - swap) / 2).reshape(d * d, d * d), n_x=n_x)


def _pair(rho, sigma):
    single = _is_single(rho) and _is_single(sigma)
    a, b = as_batch(rho), as_batch(sigma)
    if a.shape[-1] != b.shape[-1]:
        raise ValueError(f"Dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}")
    if a.shape[0] != b.shape[0] and 1 not in (a.shape[0], b.shape[0]):
        raise ValueError(f"Batch size mismatch: {a.shape[0]} vs {b.shape[0]}")
    a, b = np.broadcast_arrays(a, b)
    return a, b, single


def _is_single(x) -> bool:
    return isinstance(x, DensityMatrix) or (isinstance(x, np.ndarray) and x.ndim == 2)


def _finish(values: np.ndarray, single: bool) -> Value:
    return float(values[0]) if single else values


def _general_fidelity(a: np.ndarray, b: np.ndarray, root: Optional[np.ndarray] = None) -> np.ndarray:
    """(Tr √(√a b √a))² for stacks of mixed states."""
    if root is None:
        root = sqrtm_psd(a, cutoff=SQRT_CUTOFF)
    inner = hermitianize(root @ b @ root)
    mu = np.linalg.eigvalsh(inner)
    mu = np.where(mu < SQRT_CUTOFF, 0.0, mu)
    return np.sum(np.sqrt(mu), axis=-1) ** 2


def fidelity(rho, sigma) -> Value:
    """
    Uhlmann fidelity F(ρ, σ) = (Tr √(√σ ρ √σ))², clipped to [0, 1].

    When either argument is pure the overlap Tr(ρσ) is used directly.
    """
    a, b, single = _pair(rho, sigma)
    out = np.empty(a.shape[0])
    pure = (purity(a) > 1.0 - PURE_TOL) | (purity(b) > 1.0 - PURE_TOL)
    if np.any(pure):
        out[pure] = np.einsum("nij,nji->n", a[pure], b[pure]).real
    if np.any(~pure):
        out[~pure] = _general_fidelity(a[~pure], b[~pure])
    return _finish(np.clip(out, 0.0, 1.0), single)


def pairwise_fidelity(states_a, states_b=None) -> np.ndarray:
    """
    Matrix of fidelities F(a_i, b_j).

    With one argument the matrix is computed over that set and
    symmetrized.
    """
    a = as_batch(states_a)
    b = a if states_b is None else as_batch(states_b)
    if a.shape[-1] != b.shape[-1]:
        raise ValueError(f"Dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}")
    out = np.empty((a.shape[0], b.shape[0]))
    pure_a = purity(a) > 1.0 - PURE_TOL
    pure_b = purity(b) > 1.0 - PURE_TOL
    _, vecs_a = eigh(a, check=False)
    _, vecs_b = eigh(b, check=False)
    psi_a = vecs_a[..., :, -1]
    psi_b = vecs_b[..., :, -1]
    for i in range(a.shape[0]):
        if pure_a[i]:
            out[i] = np.einsum("k,jkl,l->j", np.conj(psi_a[i]), b, psi_a[i]).real
            continue
        row = np.empty(b.shape[0])
        if np.any(pure_b):
            phi = psi_b[pure_b]
            row[pure_b] = np.einsum("jk,kl,jl->j", np.conj(phi), a[i], phi).real
        if np.any(~pure_b):
            root = sqrtm_psd(a[i], cutoff=SQRT_CUTOFF)
            row[~pure_b] = _general_fidelity(a[i], b[~pure_b], root=root)
        out[i] = row
    out = np.clip(out, 0.0, 1.0)
    if states_b is None:
        out = 0.5 * (out + out.T)
    return out


def _log_weights(rho: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Tr(ρ ln σ) with σ's spectrum floored."""
    mu, vecs = eigh(sigma, check=False)
    weights = np.einsum("nki,nkl,nli->ni", np.conj(vecs), rho, vecs).real
    return np.sum(weights * np.log(np.maximum(mu, EIGENVALUE_FLOOR)), axis=-1)


def _neg_entropy(rho: np.ndarray) -> np.ndarray:
    """Tr(ρ ln ρ)."""
    return -np.asarray(von_neumann_entropy(rho))


def kld(rho, sigma) -> Value:
    """Quantum relative entropy S(ρ|σ) = Tr ρ ln ρ - Tr ρ ln σ."""
    a, b, single = _pair(rho, sigma)
    return _finish(_neg_entropy(a) - _log_weights(a, b), single)


def jsd(rho, sigma) -> Value:
    """S(ρ | m) + S(σ | m) with m = (ρ + σ) / 2 (unnormalized sum)."""
    a, b, single = _pair(rho, sigma)
    m = 0.5 * (a + b)
    left = _neg_entropy(a) - _log_weights(a, m)
    right = _neg_entropy(b) - _log_weights(b, m)
    return _finish(left + right, single)


def _coupling_values(
    projectors: np.ndarray, channel: Callable[[np.ndarray], np.ndarray], cost: CostObservable
) -> np.ndarray:
    """Tr[(T(P)⊗P)·C] for a stack of projectors P."""
    d = projectors.shape[-1]
    c4 = cost.mat.reshape(d, d, d, d)
    images = np.asarray(channel(projectors))
    if images.shape[-1] != d:
        raise ValueError(f"Channel output dimension {images.shape[-1]} does not match input {d}")
    return np.einsum("ica,ieb,abce->i", images, projectors, c4).real


def wasserstein_aux_terms(
    states, channel: Callable[[np.ndarray], np.ndarray], cost: CostObservable
) -> np.ndarray:
    """
    Auxiliary-form Wasserstein loss for each state of a stack.

    For each ρ = Σ_i p_i |e_i⟩⟨e_i| (from eigh) the value is
    Σ_i p_i Tr[(T(|e_i⟩⟨e_i|)⊗|e_i⟩⟨e_i|)·C]; weights below 1e-12 are skipped.
    """
    mats = as_batch(states)
    d = mats.shape[-1]
    if cost.mat.shape[-1] != d * d:
        raise ValueError(f"Cost observable acts on dimension {cost.mat.shape[-1]}, expected {d * d}")
    p, vecs = eigh(mats)
    keep = p >= WASSERSTEIN_WEIGHT_CUTOFF
    point_idx, eig_idx = np.nonzero(keep)
    e = vecs[point_idx, :, eig_idx]
    projectors = np.einsum("ni,nj->nij", e, np.conj(e))
    values = _coupling_values(projectors, channel, cost) if len(e) else np.empty(0)
    weighted = p[point_idx, eig_idx] * values
    chunks = np.split(weighted, np.cumsum(keep.sum(axis=1))[:-1])
    return np.array([math.fsum(chunk) for chunk in chunks])


def wasserstein_aux(
    rho, channel: Callable[[np.ndarray], np.ndarray], cost: Optional[CostObservable] = None
) -> Value:
    """Auxiliary-form Wasserstein loss Tr(π(ρ, T)·C) of one state or a stack."""
    single = _is_single(rho)
    mats = as_batch(rho)
    if cost is None:
        cost = default_cost(n_qubits_of(mats.shape[-1]))
    return _finish(wasserstein_aux_terms(mats, channel, cost), single)


def reconstruction(rho, sigma, kind: Union[str, LossKind]) -> Value:
    """
    Reconstruction loss L1(ρ, σ).

    Raises:
        ValueError: For the Wasserstein kind, which needs the channel
            (use wasserstein_aux)
    """
    kind = LossKind.parse(kind)
    if kind is LossKind.FIDELITY:
        f = fidelity(rho, sigma)
        return 1.0 - f
    if kind is LossKind.KLD:
        return kld(rho, sigma)
    if kind is LossKind.JSD:
        return jsd(rho, sigma)
    raise ValueError("Wasserstein reconstruction is evaluated through wasserstein_aux")


def regularization(zeta, kind: Union[str, LossKind]) -> Value:
    """
    Regularization loss L2(ζ, ζ_gen) against the maximally mixed prior.

    Fidelity: 1 - (Σ √λ)² / d.  KLD: n ln 2 - S(ζ).  JSD: jsd(ζ, I/d).

    Raises:
        ValueError: If the Wasserstein kind is requested
    """
    kind = check_role(LossKind.parse(kind), LossRole.REGULARIZATION)
    single = _is_single(zeta)
    mats = as_batch(zeta)
    d = mats.shape[-1]
    if kind is LossKind.FIDELITY:
        lam = np.clip(eigh(mats)[0], 0.0, None)
        lam = np.where(lam < SQRT_CUTOFF, 0.0, lam)
        out = 1.0 - np.sum(np.sqrt(lam), axis=-1) ** 2 / d
    elif kind is LossKind.KLD:
        out = math.log(d) - np.asarray(von_neumann_entropy(mats))
    else:
        prior = np.broadcast_to(np.eye(d, dtype=complex) / d, mats.shape)
        out = jsd(mats, prior)
    return _finish(np.asarray(out, dtype=float), single)
