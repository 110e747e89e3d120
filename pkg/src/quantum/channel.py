"""
Ansatz Circuits and Encoder/Decoder Channels

Layout of one ansatz layer on n qubits:
    Rzz on ring pairs (0,1), (1,2), ..., (n-1,0), in that order
    Ry on qubit 0, 1, ..., n-1

A single-qubit ansatz has no entangling ring, so each layer is one Ry.
Gate conventions: Rzz(θ) = exp(-i θ/2 Z⊗Z), Ry(θ) = exp(-i θ/2 Y).

Channels are dilations: pad the input with |0⟩ qubits, conjugate by a
unitary M as M†(·)M, then trace out a qubit set. The encoder pads
auxiliary qubits at the end and traces the leading trash qubits plus the
auxiliaries. The decoder appends fresh trash and auxiliary qubits and
traces the auxiliaries.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from quantum.linalg import (
    MAX_QUBITS,
    dagger,
    eigh,
    hermitianize,
    make_rng,
    partial_trace,
    random_density,
)
from quantum.states import DensityMatrix

logger = logging.getLogger(__name__)

CPTP_TOL = 1e-9


@dataclass(frozen=True)
class AnsatzSpec:
    """
    Layered Rzz-ring / Ry circuit.

    Attributes:
        n_qubits: Register size
        n_layers: Number of repeated layers (0 gives the identity)
    """

    n_qubits: int
    n_layers: int

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError(f"Ansatz needs at least one qubit, got {self.n_qubits}")
        if self.n_qubits > MAX_QUBITS:
            raise ValueError(f"Ansatz on {self.n_qubits} qubits exceeds the {MAX_QUBITS}-qubit limit")
        if self.n_layers < 0:
            raise ValueError(f"n_layers must be >= 0, got {self.n_layers}")

    @property
    def params_per_layer(self) -> int:
        return 1 if self.n_qubits == 1 else 2 * self.n_qubits

    @property
    def n_params(self) -> int:
        return self.n_layers * self.params_per_layer

    @property
    def ring_pairs(self) -> Tuple[Tuple[int, int], ...]:
        if self.n_qubits == 1:
            return ()
        n = self.n_qubits
        return tuple((q, (q + 1) % n) for q in range(n))


def ry(theta: float) -> np.ndarray:
    """Single-qubit Ry rotation."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rzz(theta: float) -> np.ndarray:
    """Two-qubit Rzz rotation (diagonal)."""
    phase = np.exp(-0.5j * theta)
    return np.diag([phase, np.conj(phase), np.conj(phase), phase])


def z_signs(n_qubits: int) -> np.ndarray:
    """z_signs[q, i] = +1 if qubit q of basis index i is 0, else -1."""
    index = np.arange(2**n_qubits)
    bits = (index[None, :] >> (n_qubits - 1 - np.arange(n_qubits)[:, None])) & 1
    return 1 - 2 * bits


def apply_single_qubit(gate: np.ndarray, u: np.ndarray, qubit: int, n_qubits: int) -> np.ndarray:
    """Left-multiply u by `gate` acting on `qubit`."""
    cols = u.shape[-1]
    t = u.reshape(2**qubit, 2, 2 ** (n_qubits - qubit - 1), cols)
    return np.einsum("ab,ibjk->iajk", gate, t).reshape(u.shape)


def build_unitary(spec: AnsatzSpec, params: np.ndarray) -> np.ndarray:
    """
    Unitary of the ansatz for a flat parameter vector.

    Parameters are consumed per layer: the ring Rzz angles first, then
    one Ry angle per qubit. Gates compose as U ← G·U.

    Raises:
        ValueError: On a parameter-count mismatch
    """
    params = np.asarray(params, dtype=float).ravel()
    if params.size != spec.n_params:
        raise ValueError(
            f"Ansatz on {spec.n_qubits} qubits with {spec.n_layers} layers expects "
            f"{spec.n_params} parameters, got {params.size}"
        )
    n = spec.n_qubits
    u = np.eye(2**n, dtype=complex)
    signs = z_signs(n)
    pairs = spec.ring_pairs
    k = 0
    for _ in range(spec.n_layers):
        for a, b in pairs:
            diagonal = np.exp(-0.5j * params[k] * signs[a] * signs[b])
            u = diagonal[:, None] * u
            k += 1
        for q in range(n):
            u = apply_single_qubit(ry(params[k]), u, q, n)
            k += 1
    return u


@dataclass(frozen=True)
class QuantumChannel:
    """
    Dilated channel X ↦ Tr_traced( M† (|0⟩⟨0|_front ⊗ X ⊗ |0⟩⟨0|_back) M ).

    Attributes:
        unitary: M over pad_front + n_in + pad_back qubits
        n_in: Input qubit count
        pad_front: Fresh |0⟩ qubits placed before the input
        pad_back: Fresh |0⟩ qubits placed after the input
        traced: Qubits of the padded register that are traced out
    """

    unitary: np.ndarray
    n_in: int
    pad_front: int = 0
    pad_back: int = 0
    traced: Tuple[int, ...] = ()

    @property
    def n_total(self) -> int:
        return self.pad_front + self.n_in + self.pad_back

    @property
    def n_out(self) -> int:
        return self.n_total - len(self.traced)

    def __post_init__(self):
        dim = 2**self.n_total
        if self.unitary.shape != (dim, dim):
            raise ValueError(
                f"Channel unitary has shape {self.unitary.shape}, expected ({dim}, {dim})"
            )
        if any(not 0 <= q < self.n_total for q in self.traced):
            raise ValueError(f"Traced qubits {self.traced} out of range for {self.n_total} qubits")

    def apply(self, mats: np.ndarray) -> np.ndarray:
        """
        Apply the channel to a matrix or a stack of matrices.

        Raises:
            ValueError: If the input dimension is not 2^n_in
        """
        mats = np.asarray(mats, dtype=complex)
        d_in = 2**self.n_in
        if mats.shape[-1] != d_in or mats.shape[-2] != d_in:
            raise ValueError(
                f"Channel expects {self.n_in}-qubit inputs (dim {d_in}), got shape {mats.shape}"
            )
        # rows of M where every padded qubit is |0⟩, ordered by input index
        rows = np.arange(d_in) * 2**self.pad_back
        r = self.unitary[rows, :]
        full = np.einsum("ia,...ij,jb->...ab", np.conj(r), mats, r)
        return hermitianize(partial_trace(full, self.n_total, self.traced))

    def __call__(self, state):
        if isinstance(state, DensityMatrix):
            return DensityMatrix(self.apply(state.mat))
        return self.apply(state)

    def then(self, other: "QuantumChannel") -> Callable[[np.ndarray], np.ndarray]:
        """Composition other ∘ self as a plain array function."""
        if other.n_in != self.n_out:
            raise ValueError(f"Cannot compose {self.n_out}-qubit output with {other.n_in}-qubit input")
        return lambda mats: other.apply(self.apply(mats))


def identity_channel(n_qubits: int) -> QuantumChannel:
    return QuantumChannel(unitary=np.eye(2**n_qubits, dtype=complex), n_in=n_qubits)


@dataclass(frozen=True)
class EncoderSpec:
    """
    Encoder architecture: N_X inputs, N_Z kept, N_A auxiliary qubits.

    The first N_T = N_X - N_Z qubits are trash; auxiliaries are appended last.
    """

    n_x: int
    n_z: int
    n_aux: int = 0
    n_layers: int = 1

    def __post_init__(self):
        _check_dims(self.n_x, self.n_z, self.n_aux)

    @property
    def n_trash(self) -> int:
        return self.n_x - self.n_z

    @property
    def ansatz(self) -> AnsatzSpec:
        return AnsatzSpec(self.n_x + self.n_aux, self.n_layers)

    def channel(self, params: np.ndarray) -> QuantumChannel:
        traced = tuple(range(self.n_trash)) + tuple(range(self.n_x, self.n_x + self.n_aux))
        return QuantumChannel(
            unitary=build_unitary(self.ansatz, params),
            n_in=self.n_x,
            pad_back=self.n_aux,
            traced=traced,
        )


@dataclass(frozen=True)
class DecoderSpec:
    """
    Decoder architecture: N_Z inputs, N_T fresh trash and N_B auxiliary
    qubits appended, N_B auxiliaries traced at the end.
    """

    n_x: int
    n_z: int
    n_aux: int = 0
    n_layers: int = 1

    def __post_init__(self):
        _check_dims(self.n_x, self.n_z, self.n_aux)

    @property
    def n_trash(self) -> int:
        return self.n_x - self.n_z

    @property
    def ansatz(self) -> AnsatzSpec:
        return AnsatzSpec(self.n_x + self.n_aux, self.n_layers)

    def channel(self, params: np.ndarray) -> QuantumChannel:
        return QuantumChannel(
            unitary=build_unitary(self.ansatz, params),
            n_in=self.n_z,
            pad_back=self.n_trash + self.n_aux,
            traced=tuple(range(self.n_x, self.n_x + self.n_aux)),
        )


def _check_dims(n_x: int, n_z: int, n_aux: int) -> None:
    if n_z < 1:
        raise ValueError(f"Latent register needs at least one qubit, got n_z={n_z}")
    if n_z > n_x:
        raise ValueError(f"n_z ({n_z}) must not exceed n_x ({n_x})")
    if n_aux < 0:
        raise ValueError(f"Auxiliary qubit count must be >= 0, got {n_aux}")
    if n_x + n_aux > MAX_QUBITS:
        raise ValueError(f"{n_x + n_aux} circuit qubits exceed the {MAX_QUBITS}-qubit limit")


def tied_decoder_channel(enc: EncoderSpec, params: np.ndarray) -> QuantumChannel:
    """
    Decoder that inverts the encoder circuit (V = U†).

    Fresh trash qubits are restored in front, where the encoder traced
    them, and N_B = N_A auxiliaries are appended and traced at the end.
    """
    u = build_unitary(enc.ansatz, params)
    return QuantumChannel(
        unitary=dagger(u),
        n_in=enc.n_z,
        pad_front=enc.n_trash,
        pad_back=enc.n_aux,
        traced=tuple(range(enc.n_x, enc.n_x + enc.n_aux)),
    )


def encode(enc: EncoderSpec, params: np.ndarray, rho):
    """Encoder map of one state or a stack of N_X-qubit states."""
    return enc.channel(params)(rho)


def decode(dec: DecoderSpec, params: np.ndarray, zeta):
    """Decoder map of one state or a stack of N_Z-qubit states."""
    return dec.channel(params)(zeta)


def default_aux_count(n_x: int, n_z: int) -> int:
    """Auxiliary qubit count that makes the dilation fully expressive."""
    if n_z > n_x:
        raise ValueError(f"n_z ({n_z}) must not exceed n_x ({n_x})")
    return n_x + 2 * n_z


@dataclass
class CptpReport:
    """Residuals collected by verify_cptp."""

    trials: int
    max_trace_error: float
    min_eigenvalue: float
    max_linearity_error: float
    tolerance: float = CPTP_TOL

    @property
    def passed(self) -> bool:
        return (
            self.max_trace_error <= self.tolerance
            and self.min_eigenvalue >= -self.tolerance
            and self.max_linearity_error <= self.tolerance
        )

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "max_trace_error": self.max_trace_error,
            "min_eigenvalue": self.min_eigenvalue,
            "max_linearity_error": self.max_linearity_error,
            "passed": self.passed,
        }


def verify_cptp(
    channel: Callable[[np.ndarray], np.ndarray],
    n_in: int,
    trials: int,
    rng: np.random.Generator,
    tolerance: float = CPTP_TOL,
) -> CptpReport:
    """
    Randomized check that a map behaves as a CPTP channel.

    Each trial draws three random input states and mixture weights, then
    records the output trace error, the smallest output eigenvalue and
    the gap between channel(Σ p_i ρ_i) and Σ p_i channel(ρ_i).

    Args:
        channel: Function on (k, d, d) stacks of input matrices
        n_in: Input qubit count
        trials: Number of random mixtures
        rng: Random generator
        tolerance: Pass threshold for every residual

    Returns:
        CptpReport (failures are reported, never raised)
    """
    max_trace = 0.0
    min_eig = np.inf
    max_lin = 0.0
    for _ in range(trials):
        ranks = rng.integers(1, 2**n_in + 1, size=3)
        inputs = np.stack([random_density(rng, n_in, rank=int(r)) for r in ranks])
        weights = rng.dirichlet(np.ones(3))
        outputs = np.asarray(channel(inputs))
        mixed_out = np.asarray(channel(np.einsum("k,kij->ij", weights, inputs)[None]))[0]

        traces = np.trace(outputs, axis1=-2, axis2=-1).real
        max_trace = max(max_trace, float(np.max(np.abs(traces - 1.0))))
        min_eig = min(min_eig, float(np.min(eigh(outputs, check=False)[0])))
        lin = np.max(np.abs(mixed_out - np.einsum("k,kij->ij", weights, outputs)))
        max_lin = max(max_lin, float(lin))

    report = CptpReport(
        trials=trials,
        max_trace_error=max_trace,
        min_eigenvalue=float(min_eig) if trials else 0.0,
        max_linearity_error=max_lin,
        tolerance=tolerance,
    )
    logger.debug("CPTP check over %d trials: %s", trials, report.to_dict())
    return report


def random_encoder_decoder(
    seed, n_x: int, n_z: int, n_aux_enc: int, n_aux_dec: int, n_layers: int
) -> Tuple[QuantumChannel, QuantumChannel]:
    """Encoder/decoder pair with uniform random angles in [-π, π)."""
    rng = make_rng(seed)
    enc = EncoderSpec(n_x, n_z, n_aux_enc, n_layers)
    dec = DecoderSpec(n_x, n_z, n_aux_dec, n_layers)
    theta_e = rng.uniform(-np.pi, np.pi, enc.ansatz.n_params)
    theta_d = rng.uniform(-np.pi, np.pi, dec.ansatz.n_params)
    return enc.channel(theta_e), dec.channel(theta_d)

