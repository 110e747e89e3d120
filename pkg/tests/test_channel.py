"""
Test suite for the ansatz circuit and the encoder/decoder channels.

Run with: pytest tests/test_channel.py
"""

import numpy as np
import pytest
from scipy.linalg import expm

from quantum.channel import (
    AnsatzSpec,
    DecoderSpec,
    EncoderSpec,
    QuantumChannel,
    build_unitary,
    decode,
    default_aux_count,
    encode,
    identity_channel,
    random_encoder_decoder,
    ry,
    rzz,
    tied_decoder_channel,
    verify_cptp,
)
from quantum.linalg import MAX_QUBITS, dagger, kron, make_rng, random_density
from quantum.states import DensityMatrix, angle_embed, bloch_coords, zero_state


class TestAnsatz:
    """Gate layout and parameter counts."""

    def test_parameter_counts(self):
        assert AnsatzSpec(1, 3).n_params == 3
        assert AnsatzSpec(2, 3).n_params == 12
        assert AnsatzSpec(4, 2).n_params == 16

    def test_ring_pairs(self):
        assert AnsatzSpec(3, 1).ring_pairs == ((0, 1), (1, 2), (2, 0))
        assert AnsatzSpec(1, 1).ring_pairs == ()

    def test_zero_layers_is_identity(self):
        assert np.allclose(build_unitary(AnsatzSpec(3, 0), []), np.eye(8))

    def test_single_rzz(self):
        u = build_unitary(AnsatzSpec(2, 1), [0.7, 0.0, 0.0, 0.0])
        assert np.allclose(u, rzz(0.7))

    def test_ry_on_first_qubit(self):
        u = build_unitary(AnsatzSpec(2, 1), [0.0, 0.0, 1.1, 0.0])
        assert np.allclose(u, kron(ry(1.1), np.eye(2)))

    def test_matches_gate_by_gate_product(self):
        a, b, c, d = 0.7, -1.3, 0.4, 2.2
        z = np.diag([1.0, -1.0]).astype(complex)
        y = np.array([[0, -1j], [1j, 0]])
        zz = np.kron(z, z)
        expected = (
            np.kron(np.eye(2), expm(-0.5j * d * y))
            @ np.kron(expm(-0.5j * c * y), np.eye(2))
            @ expm(-0.5j * b * zz)
            @ expm(-0.5j * a * zz)
        )
        u = build_unitary(AnsatzSpec(2, 1), [a, b, c, d])
        assert np.allclose(u, expected, atol=1e-12, rtol=0)

    def test_unitarity(self, rng):
        spec = AnsatzSpec(3, 2)
        u = build_unitary(spec, rng.uniform(-np.pi, np.pi, spec.n_params))
        assert np.allclose(u @ dagger(u), np.eye(8))

    def test_parameter_mismatch(self):
        with pytest.raises(ValueError, match="expects 12 parameters"):
            build_unitary(AnsatzSpec(2, 3), np.zeros(5))

    def test_rejects_too_many_qubits(self):
        with pytest.raises(ValueError, match="limit"):
            AnsatzSpec(MAX_QUBITS + 1, 1)


class TestChannels:
    """Encoder and decoder dilations."""

    def test_identity_channel(self, rng):
        rho = random_density(rng, 2)
        assert np.allclose(identity_channel(2).apply(rho), rho)

    def test_encoder_traces_leading_trash(self):
        enc = EncoderSpec(n_x=2, n_z=1, n_aux=0, n_layers=0)
        rho = angle_embed([np.pi, np.pi / 2], 2)
        zeta = encode(enc, [], rho)
        assert isinstance(zeta, DensityMatrix)
        assert np.allclose(bloch_coords(zeta), (1.0, 0.0, 0.0))

    def test_decoder_appends_fresh_trash(self):
        dec = DecoderSpec(n_x=2, n_z=1, n_aux=0, n_layers=0)
        out = decode(dec, [], zero_state(1))
        assert out.n_qubits == 2
        assert np.isclose(out.mat[0, 0].real, 1.0)

    def test_decoder_without_aux_keeps_spectrum(self, rng):
        dec = DecoderSpec(n_x=2, n_z=1, n_aux=0, n_layers=2)
        for _ in range(5):
            zeta = random_density(rng, 1)
            out = decode(dec, rng.uniform(-np.pi, np.pi, dec.ansatz.n_params), zeta)
            expected = np.sort(np.concatenate([np.linalg.eigvalsh(zeta), np.zeros(2)]))
            assert np.allclose(np.linalg.eigvalsh(out), expected, atol=1e-9, rtol=0)

    def test_aux_qubits_are_traced(self, rng):
        enc = EncoderSpec(n_x=2, n_z=1, n_aux=2, n_layers=2)
        ch = enc.channel(rng.uniform(-np.pi, np.pi, enc.ansatz.n_params))
        assert ch.n_total == 4
        assert ch.n_out == 1

    def test_tied_decoder_inverts_full_rank_encoder(self, rng):
        enc = EncoderSpec(n_x=2, n_z=2, n_aux=0, n_layers=3)
        params = rng.uniform(-np.pi, np.pi, enc.ansatz.n_params)
        rho = random_density(rng, 2)
        out = enc.channel(params).then(tied_decoder_channel(enc, params))(rho)
        assert np.allclose(out, rho)

    def test_batch_apply(self, rng):
        ch, _ = random_encoder_decoder(0, 2, 1, 1, 1, 2)
        stack = np.stack([random_density(rng, 2) for _ in range(5)])
        out = ch.apply(stack)
        assert out.shape == (5, 2, 2)
        assert np.allclose(out[3], ch.apply(stack[3]))

    def test_wrong_input_dimension(self):
        with pytest.raises(ValueError, match="expects 1-qubit"):
            identity_channel(1).apply(np.eye(4) / 4)

    def test_bad_composition(self):
        with pytest.raises(ValueError, match="compose"):
            identity_channel(1).then(identity_channel(2))

    def test_bad_unitary_shape(self):
        with pytest.raises(ValueError, match="shape"):
            QuantumChannel(unitary=np.eye(2), n_in=2)

    def test_latent_larger_than_input(self):
        with pytest.raises(ValueError, match="must not exceed"):
            EncoderSpec(n_x=1, n_z=2)

    def test_default_aux_count(self):
        assert default_aux_count(2, 1) == 4


class TestCptp:
    """Randomized CPTP verification."""

    @pytest.mark.parametrize("n_aux_enc,n_aux_dec", [(0, 0), (1, 0), (0, 2), (2, 1)])
    def test_random_channels_are_cptp(self, n_aux_enc, n_aux_dec):
        enc, dec = random_encoder_decoder(7, 2, 1, n_aux_enc, n_aux_dec, 2)
        rng = make_rng(11)
        assert verify_cptp(enc.apply, 2, 20, rng).passed
        assert verify_cptp(dec.apply, 1, 20, rng).passed
        assert verify_cptp(enc.then(dec), 2, 20, rng).passed

    def test_detects_trace_scaling(self, rng):
        report = verify_cptp(lambda m: 1.01 * np.asarray(m), 1, 3, rng)
        assert not report.passed
        assert report.max_trace_error == pytest.approx(0.01)

    def test_report_dict(self, rng):
        report = verify_cptp(identity_channel(1).apply, 1, 2, rng)
        assert report.to_dict()["passed"] is True
        assert report.to_dict()["trials"] == 2
