"""
Test suite for datasets, generators and CSV ingestion.

Run with: pytest tests/test_data.py
"""

import json

import numpy as np
import pandas as pd
import pytest

from data.dataset import Dataset, Split, load_bundle, save_bundle, split
from data.dataset_loader import encode_labels, export_csv, ingest_csv, normalize_features
from data.generators import (
    gen_swiss_roll,
    gen_synthetic_quantum,
    sample_bloch_shell,
    threshold_labels_consistent,
)
from quantum.linalg import make_rng
from quantum.states import check_states, marginal, purity


@pytest.fixture
def roll():
    return gen_swiss_roll(60, rng=make_rng(3), seed=3)


@pytest.fixture
def gene_csv(tmp_path):
    rng = make_rng(9)
    frame = pd.DataFrame(rng.normal(size=(30, 5)), columns=[f"g{i}" for i in range(5)])
    frame["status"] = ["case"] * 12 + ["control"] * 18
    path = tmp_path / "genes.csv"
    frame.to_csv(path, index=False)
    return path


class TestDataset:
    """Container validation and split sides."""

    def test_label_count_mismatch(self):
        with pytest.raises(ValueError, match="labels for"):
            Dataset(states=np.eye(2)[None] * 0.5 + 0, labels=[1, -1])

    def test_labels_must_be_signed(self):
        with pytest.raises(ValueError, match="-1 or \\+1"):
            Dataset(states=np.stack([np.eye(2) / 2] * 2), labels=[0, 1])

    def test_empty(self):
        with pytest.raises(ValueError, match="at least one"):
            Dataset(states=np.empty((0, 2, 2)))

    def test_split_must_cover_points(self):
        with pytest.raises(ValueError, match="disjoint"):
            Dataset(
                states=np.stack([np.eye(2) / 2] * 3),
                split=Split(train=np.array([0, 1]), test=np.array([1])),
            )

    def test_sides(self, roll):
        ds = split(roll, ratio=0.7, rng=make_rng(0))
        assert ds.side_states("train").shape[0] == 42
        assert ds.side_labels("test").size == 18
        assert ds.indices("all").size == 60
        with pytest.raises(ValueError, match="Unknown split side"):
            ds.indices("validation")

    def test_missing_split(self, roll):
        with pytest.raises(ValueError, match="no train/test split"):
            roll.indices("train")

    def test_validate_rejects_mixed(self):
        ds = Dataset(states=np.stack([np.eye(2) / 2]))
        with pytest.raises(ValueError, match="not pure"):
            ds.validate()


class TestSplit:
    """Seeded, optionally stratified train/test split."""

    def test_disjoint_and_exhaustive(self, roll):
        ds = split(roll, ratio=0.7, rng=make_rng(1))
        joined = np.concatenate([ds.split.train, ds.split.test])
        assert np.array_equal(np.sort(joined), np.arange(60))

    def test_stratified_balance(self, roll):
        ds = split(roll, ratio=0.5, stratify=True, rng=make_rng(1))
        assert np.sum(ds.side_labels("train") == 1) == 15

    def test_reproducible(self, roll):
        a = split(roll, rng=make_rng(5))
        b = split(roll, rng=make_rng(5))
        assert np.array_equal(a.split.train, b.split.train)

    @pytest.mark.parametrize("ratio", [0.0, 1.0, 1.5])
    def test_bad_ratio(self, roll, ratio):
        with pytest.raises(ValueError, match="ratio"):
            split(roll, ratio=ratio)

    def test_single_point(self):
        with pytest.raises(ValueError, match="1 point"):
            split(Dataset(states=np.eye(2)[None] * np.array([[1, 0], [0, 0]])))

    def test_tiny_class(self):
        ds = Dataset(states=np.stack([np.diag([1.0, 0.0])] * 4), labels=[1, 1, 1, -1])
        with pytest.raises(ValueError, match="fewer than 2 members"):
            split(ds, ratio=0.5)


class TestBundle:
    """On-disk dataset bundles."""

    def test_round_trip(self, roll, tmp_path):
        ds = split(roll, rng=make_rng(0))
        save_bundle(ds, tmp_path / "roll")
        loaded = load_bundle(tmp_path / "roll")
        assert np.allclose(loaded.states, ds.states, atol=1e-6)
        assert np.array_equal(loaded.labels, ds.labels)
        assert np.array_equal(loaded.split.test, ds.split.test)
        assert np.allclose(loaded.coordinates, ds.coordinates)
        assert loaded.provenance["generator"] == "swiss-roll"
        check_states(loaded.states, require_pure=True)

    def test_mixed_bundle_keeps_mixedness(self, tmp_path):
        ds = gen_synthetic_quantum(10, make_rng(2))
        save_bundle(ds, tmp_path / "sq")
        loaded = load_bundle(tmp_path / "sq")
        assert loaded.allows_mixed
        assert loaded.labels is None
        assert np.allclose(purity(loaded.states), purity(ds.states), atol=1e-6)

    def test_binary_layout(self, roll, tmp_path):
        save_bundle(roll, tmp_path / "b")
        raw = (tmp_path / "b" / "states.bin").read_bytes()
        assert tuple(np.frombuffer(raw[:8], dtype="<u4")) == (60, 8)
        assert len(raw) == 8 + 60 * 64 * 8

    def test_truncated_states(self, roll, tmp_path):
        save_bundle(roll, tmp_path / "b")
        path = tmp_path / "b" / "states.bin"
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(ValueError, match="expected"):
            load_bundle(tmp_path / "b")

    def test_missing_meta(self, tmp_path):
        with pytest.raises(FileNotFoundError, match="meta.json"):
            load_bundle(tmp_path)

    def test_unsupported_version(self, roll, tmp_path):
        save_bundle(roll, tmp_path / "b")
        meta_path = tmp_path / "b" / "meta.json"
        meta = json.loads(meta_path.read_text())
        meta["format_version"] = 99
        meta_path.write_text(json.dumps(meta))
        with pytest.raises(ValueError, match="format version"):
            load_bundle(tmp_path / "b")


class TestGenerators:
    """Swiss roll and synthetic quantum data."""

    def test_swiss_roll_shape_and_labels(self, roll):
        assert roll.n_qubits == 3
        assert roll.features.shape == (60, 8)
        assert np.sum(roll.labels == 1) == 30
        assert threshold_labels_consistent(roll)
        roll.validate()

    def test_swiss_roll_reproducible(self):
        a = gen_swiss_roll(20, rng=make_rng(4))
        b = gen_swiss_roll(20, rng=make_rng(4))
        assert np.array_equal(a.states, b.states)

    def test_swiss_roll_without_noise(self):
        ds = gen_swiss_roll(10, noise_dims=0, rng=make_rng(0))
        assert ds.n_qubits == 2

    def test_swiss_roll_zero_noise_leaves_padding_empty(self):
        ds = gen_swiss_roll(25, noise_dims=5, noise_sd=0.0, rng=make_rng(2))
        assert ds.n_qubits == 3
        amplitudes = np.stack([np.diag(rho).real for rho in ds.states])
        assert np.all(amplitudes[:, 3:] == 0.0)
        assert np.all(ds.states[:, 3:, :] == 0.0)

    def test_synthetic_quantum_without_rotation(self):
        ds = gen_synthetic_quantum(40, make_rng(6), theta_mean=0.0, theta_sd=0.0)
        zero = np.array([[1, 0], [0, 0]], dtype=complex)
        for rho in ds.states:
            assert np.allclose(marginal(rho, [1]).mat, zero, atol=1e-12)

    def test_default_generator_follows_seed(self):
        a = gen_synthetic_quantum(10, seed=11)
        b = gen_synthetic_quantum(10, rng=make_rng(11), seed=11)
        c = gen_synthetic_quantum(10, seed=12)
        assert np.array_equal(a.states, b.states)
        assert not np.array_equal(a.states, c.states)
        assert a.provenance["seed"] == 11

        roll = gen_swiss_roll(12, seed=5)
        assert np.array_equal(roll.states, gen_swiss_roll(12, rng=make_rng(5)).states)
        assert gen_swiss_roll(12).provenance["seed"] == 0

    def test_synthetic_quantum_states(self):
        ds = gen_synthetic_quantum(50, make_rng(1))
        assert ds.n_qubits == 2
        assert ds.allows_mixed
        ds.validate()
        p = purity(ds.states)
        assert np.all((p >= (1 + 0.6**2) / 2 - 1e-9) & (p <= (1 + 0.7**2) / 2 + 1e-9))

    def test_bloch_shell_radii(self, rng):
        r = np.linalg.norm(sample_bloch_shell(rng, 200, 0.6, 0.7), axis=1)
        assert np.all((r >= 0.6) & (r <= 0.7))

    def test_bad_shell(self, rng):
        with pytest.raises(ValueError, match="Shell bounds"):
            sample_bloch_shell(rng, 3, 0.8, 0.7)

    def test_bad_sizes(self):
        with pytest.raises(ValueError, match="n must be"):
            gen_swiss_roll(0)
        with pytest.raises(ValueError, match="theta_sd"):
            gen_synthetic_quantum(5, theta_sd=-1.0)


class TestCsvIngest:
    """CSV to labeled quantum dataset."""

    def test_balanced_and_split(self, gene_csv):
        ds = ingest_csv(gene_csv, label_column="status", rng=make_rng(0))
        assert ds.n_points == 24
        assert np.sum(ds.labels == 1) == 12
        assert ds.n_qubits == 3
        assert ds.split is not None
        ds.validate()

    def test_export_round_trip(self, gene_csv, tmp_path):
        ds = ingest_csv(gene_csv, label_column="status", rng=make_rng(0))
        out = export_csv(ds, tmp_path / "export.csv", label_column="status")
        again = ingest_csv(out, label_column="status", rng=make_rng(1))
        assert np.allclose(again.states, ds.states)
        assert np.array_equal(again.labels, ds.labels)

    def test_non_numeric_cell(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1,2\n3,x\n")
        with pytest.raises(ValueError, match="row 1, column 'b'"):
            ingest_csv(path)

    def test_missing_label_column(self, gene_csv):
        with pytest.raises(ValueError, match="not found"):
            ingest_csv(gene_csv, label_column="outcome")

    def test_degenerate_normalization(self):
        with pytest.raises(ValueError, match="degenerate"):
            normalize_features(np.ones((3, 2)))

    def test_label_encoding(self):
        assert list(encode_labels(pd.Series([0, 1, 1]))) == [-1, 1, 1]
        assert list(encode_labels(pd.Series(["a", "b"]))) == [-1, 1]
        with pytest.raises(ValueError, match="exactly two"):
            encode_labels(pd.Series([1, 2, 3]))

    def test_export_requires_features(self, tmp_path):
        ds = gen_synthetic_quantum(3, make_rng(0))
        with pytest.raises(ValueError, match="raw features"):
            export_csv(ds, tmp_path / "x.csv")
