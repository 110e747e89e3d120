"""
Test suite for evaluation metrics.

Run with: pytest tests/test_metrics.py
"""

import numpy as np
import pytest

from data.dataset import split
from data.generators import gen_swiss_roll, gen_synthetic_quantum
from losses.divergences import pairwise_fidelity
from ml.model import ModelSpec, QVAEModel
from quantum.linalg import make_rng, random_pure
from quantum.states import angle_embed, zero_state
from scoring.metrics import (
    QsvcSettings,
    SeedMetrics,
    TripleReport,
    input_baseline,
    latent_volume,
    mean_std,
    pairwise_fidelity_pcc,
    pairwise_fidelity_pcc_test,
    reconstruction_rate,
    report_triple,
    seed_metrics,
)


class MixingModel:
    """Decoder output is always maximally mixed."""

    def reconstruct(self, states):
        return np.broadcast_to(np.eye(4, dtype=complex) / 4, states.shape).copy()


@pytest.fixture(scope="module")
def labeled():
    return split(gen_swiss_roll(30, rng=make_rng(2)), ratio=0.7, rng=make_rng(2))


@pytest.fixture(scope="module")
def model():
    spec = ModelSpec(n_x=3, n_z=1, n_layers=1)
    return QVAEModel.from_flat(spec, make_rng(8).uniform(-np.pi, np.pi, spec.n_params))


class TestReconstructionRate:
    """Mean reconstruction fidelity."""

    def test_maximally_mixed_output(self, rng):
        states = np.stack([random_pure(rng, 2) for _ in range(6)])
        assert reconstruction_rate(MixingModel(), states) == pytest.approx(0.25)

    def test_identity_model(self, rng):
        states = np.stack([random_pure(rng, 1) for _ in range(4)])
        assert reconstruction_rate(QVAEModel(ModelSpec(n_x=1, n_z=1)), states) == pytest.approx(1.0)

    def test_uses_test_side(self, labeled, model):
        rate = reconstruction_rate(model, labeled, side="test")
        assert 0.0 <= rate <= 1.0
        assert rate != reconstruction_rate(model, labeled, side="train")


class TestLatentGeometry:
    """Latent volume and input-latent correlation."""

    def test_volume_of_identical_states(self):
        assert latent_volume(np.stack([zero_state(1).mat] * 4)) == pytest.approx(0.0)

    def test_volume_of_poles(self):
        poles = np.stack([angle_embed([0.0], 1).mat, angle_embed([np.pi], 1).mat] * 2)
        assert latent_volume(poles) == pytest.approx(1.0)

    def test_volume_rejects_multi_qubit(self):
        with pytest.raises(ValueError, match="single-qubit"):
            latent_volume(np.stack([zero_state(2).mat] * 3))

    def test_volume_needs_two_states(self):
        with pytest.raises(ValueError, match="at least 2"):
            latent_volume(zero_state(1).mat[None])

    def test_pcc_of_identical_sets(self, rng):
        states = np.stack([random_pure(rng, 2) for _ in range(6)])
        assert pairwise_fidelity_pcc(states, states) == pytest.approx(1.0)

    def test_pcc_reports_p_value(self, rng):
        states = np.stack([random_pure(rng, 1) for _ in range(8)])
        r, p = pairwise_fidelity_pcc_test(states, states)
        assert r == pytest.approx(1.0)
        assert p < 1e-6

    def test_pcc_needs_three_states(self, rng):
        states = np.stack([random_pure(rng, 1) for _ in range(2)])
        with pytest.raises(ValueError, match="at least 3"):
            pairwise_fidelity_pcc(states, states)

    def test_pcc_zero_variance(self, rng):
        same = np.stack([zero_state(1).mat] * 4)
        other = np.stack([random_pure(rng, 1) for _ in range(4)])
        with pytest.raises(ValueError, match="zero variance"):
            pairwise_fidelity_pcc(same, other)

    def test_pcc_size_mismatch(self, rng):
        with pytest.raises(ValueError, match="differ in size"):
            pairwise_fidelity_pcc(
                np.stack([random_pure(rng, 1) for _ in range(3)]),
                np.stack([random_pure(rng, 1) for _ in range(4)]),
            )


class TestSeedMetrics:
    """Per-seed f / l / r and kernels."""

    def test_full_record(self, labeled, model):
        metrics = seed_metrics(model, labeled, QsvcSettings(n_layers=1), seed=4, keep_kernels=True)
        assert metrics.seed == 4
        assert 0.0 <= metrics.l <= 1.0 and 0.0 <= metrics.r <= 1.0
        assert metrics.vol_latent is not None
        assert set(metrics.kernels) == {"latent_train", "latent_test", "recon_train", "recon_test"}
        assert metrics.kernels["latent_test"].shape == (9, 21)
        assert set(metrics.to_dict()) == {"seed", "f", "l", "r", "l_auc", "r_auc", "vol_latent", "pcc", "pcc_p"}

    def test_isometric_decoder_preserves_kernel(self, labeled, model):
        latents = model.encode(labeled.states)
        recon = model.decode(latents)
        assert np.allclose(pairwise_fidelity(latents), pairwise_fidelity(recon), atol=1e-8)
        metrics = seed_metrics(model, labeled, QsvcSettings(n_layers=1))
        assert abs(metrics.l - metrics.r) <= 0.01

    def test_unlabeled_dataset(self):
        ds = split(gen_synthetic_quantum(12, make_rng(0)), stratify=False, rng=make_rng(0))
        spec = ModelSpec(n_x=2, n_z=1, n_layers=1)
        metrics = seed_metrics(QVAEModel(spec), ds)
        assert metrics.l is None and metrics.r is None
        assert metrics.kernels == {}
        assert input_baseline(ds) is None


class TestAggregation:
    """Seed aggregation."""

    def test_mean_std_population(self):
        assert mean_std([1.0, 3.0]) == {"mean": 2.0, "std": 1.0}
        assert mean_std([1.0, None]) is None
        assert mean_std([]) is None

    def test_summary_keys(self):
        report = TripleReport(seeds=[SeedMetrics(seed=0, f=0.9), SeedMetrics(seed=1, f=0.7)], i=0.8)
        summary = report.summary()
        assert summary["f"]["mean"] == pytest.approx(0.8)
        assert summary["l"] is None
        assert summary["i"] == 0.8
        assert set(summary) == {"f", "l", "r", "l_auc", "r_auc", "vol_latent", "pcc", "i", "i_auc"}

    def test_report_triple(self, labeled, model):
        report = report_triple([model, model], labeled, QsvcSettings(n_layers=1), seeds=[5, 6])
        assert [s.seed for s in report.seeds] == [5, 6]
        assert report.summary()["f"]["std"] == pytest.approx(0.0)
        assert report.i is not None

    def test_report_triple_needs_models(self, labeled):
        with pytest.raises(ValueError, match="at least one"):
            report_triple([], labeled)
