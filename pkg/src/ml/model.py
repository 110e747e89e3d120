"""
Autoencoder Model

Architecture (ModelSpec) plus trained angles (ModelParams) for the
quantum variational autoencoder.

    encoder  ρ (N_X qubits) → ζ (N_Z qubits)
    decoder  ζ (N_Z qubits) → σ (N_X qubits)

With `tied=True` the decoder is the inverse encoder circuit and has no
parameters of its own; this is the QAE-style baseline.
"""

from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np

from quantum.channel import DecoderSpec, EncoderSpec, QuantumChannel, tied_decoder_channel
from quantum.states import as_batch


@dataclass(frozen=True)
class ModelSpec:
    """
    Autoencoder architecture.

    Attributes:
        n_x: Input qubits
        n_z: Latent qubits
        n_aux_encoder: Encoder auxiliary qubits (N_A)
        n_aux_decoder: Decoder auxiliary qubits (N_B)
        n_layers: Ansatz layers in both circuits
        tied: Decoder is the inverse encoder (requires N_B = N_A)
    """

    n_x: int
    n_z: int
    n_aux_encoder: int = 0
    n_aux_decoder: int = 0
    n_layers: int = 1
    tied: bool = False

    def __post_init__(self):
        if self.tied and self.n_aux_decoder != self.n_aux_encoder:
            raise ValueError(
                "A tied decoder reuses the encoder circuit, so n_aux_decoder "
                f"({self.n_aux_decoder}) must equal n_aux_encoder ({self.n_aux_encoder})"
            )
        # constructing the specs validates the qubit counts
        _ = (self.encoder, self.decoder)

    @property
    def encoder(self) -> EncoderSpec:
        return EncoderSpec(self.n_x, self.n_z, self.n_aux_encoder, self.n_layers)

    @property
    def decoder(self) -> DecoderSpec:
        return DecoderSpec(self.n_x, self.n_z, self.n_aux_decoder, self.n_layers)

    @property
    def n_trash(self) -> int:
        return self.n_x - self.n_z

    @property
    def n_params_encoder(self) -> int:
        return self.encoder.ansatz.n_params

    @property
    def n_params_decoder(self) -> int:
        return 0 if self.tied else self.decoder.ansatz.n_params

    @property
    def n_params(self) -> int:
        return self.n_params_encoder + self.n_params_decoder

    def split(self, flat: np.ndarray) -> "ModelParams":
        """Split a flat optimizer vector into (θ_e, θ_d)."""
        flat = np.asarray(flat, dtype=float).ravel()
        if flat.size != self.n_params:
            raise ValueError(f"Model expects {self.n_params} parameters, got {flat.size}")
        k = self.n_params_encoder
        return ModelParams(theta_e=flat[:k].copy(), theta_d=flat[k:].copy())

    def to_dict(self) -> Dict:
        return {
            "n_x": self.n_x,
            "n_z": self.n_z,
            "n_aux_encoder": self.n_aux_encoder,
            "n_aux_decoder": self.n_aux_decoder,
            "n_layers": self.n_layers,
            "tied": self.tied,
        }


@dataclass(frozen=True)
class ModelParams:
    """Encoder and decoder angles in radians."""

    theta_e: np.ndarray
    theta_d: np.ndarray

    @property
    def flat(self) -> np.ndarray:
        return np.concatenate([np.ravel(self.theta_e), np.ravel(self.theta_d)]).astype(float)

    def to_dict(self) -> Dict:
        return {
            "theta_e": [float(v) for v in np.ravel(self.theta_e)],
            "theta_d": [float(v) for v in np.ravel(self.theta_d)],
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "ModelParams":
        return cls(
            theta_e=np.asarray(data.get("theta_e", []), dtype=float),
            theta_d=np.asarray(data.get("theta_d", []), dtype=float),
        )


class QVAEModel:
    """
    Autoencoder with fixed parameters.

    Usage:
        model = QVAEModel(ModelSpec(n_x=2, n_z=1, n_layers=3), params)
        latents = model.encode(states)
        recon = model.decode(latents)
    """

    def __init__(self, spec: ModelSpec, params: Optional[ModelParams] = None):
        self.spec = spec
        if params is None:
            params = spec.split(np.zeros(spec.n_params))
        if len(np.ravel(params.theta_e)) != spec.n_params_encoder:
            raise ValueError(
                f"theta_e has {len(np.ravel(params.theta_e))} entries, "
                f"expected {spec.n_params_encoder}"
            )
        if len(np.ravel(params.theta_d)) != spec.n_params_decoder:
            raise ValueError(
                f"theta_d has {len(np.ravel(params.theta_d))} entries, "
                f"expected {spec.n_params_decoder}"
            )
        self.params = params
        self.encoder_channel: QuantumChannel = spec.encoder.channel(params.theta_e)
        if spec.tied:
            self.decoder_channel = tied_decoder_channel(spec.encoder, params.theta_e)
        else:
            self.decoder_channel = spec.decoder.channel(params.theta_d)

    @classmethod
    def from_flat(cls, spec: ModelSpec, flat: np.ndarray) -> "QVAEModel":
        return cls(spec, spec.split(flat))

    def encode(self, states) -> np.ndarray:
        """Latent states ζ for a stack of inputs."""
        return self.encoder_channel.apply(as_batch(states))

    def decode(self, latents) -> np.ndarray:
        """Reconstructions σ for a stack of latent states."""
        return self.decoder_channel.apply(as_batch(latents))

    def reconstruct(self, states) -> np.ndarray:
        return self.decode(self.encode(states))

    @property
    def autoencoder(self) -> Callable[[np.ndarray], np.ndarray]:
        """decode ∘ encode as an array function."""
        return self.encoder_channel.then(self.decoder_channel)
