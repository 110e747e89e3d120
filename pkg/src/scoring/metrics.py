"""
Evaluation Metrics

Quantities reported for a trained autoencoder:

- f: fidelity reconstruction rate, mean F(ρ_i, decode(encode(ρ_i)))
- l: QSVC test accuracy on latent states
- r: QSVC test accuracy on reconstructed states
- i: QSVC test accuracy on the input states (baseline)
- Vol_latent: norm of the per-axis standard deviations of the latent
  Bloch coordinates (single-qubit latents only)
- input-latent PCC: Pearson correlation between the pairwise-fidelity
  matrices of inputs and latents

Every classifier is trained on the train side and scored on the test
side. Standard deviations over seeds and over points are population
standard deviations (ddof=0).
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import pearsonr

from data.dataset import Dataset
from losses.divergences import fidelity, pairwise_fidelity
from ml.model import QVAEModel
from ml.qsvc import QSVC, KernelSpec
from quantum.linalg import n_qubits_of
from quantum.states import as_batch, bloch_vectors

logger = logging.getLogger(__name__)


def reconstruction_fidelities(model: QVAEModel, dataset, side: str = "test") -> np.ndarray:
    """F(ρ_i, σ_i) for every point on one side of the split."""
    states = dataset.side_states(side) if isinstance(dataset, Dataset) else as_batch(dataset)
    if states.shape[0] == 0:
        raise ValueError(f"The '{side}' split is empty")
    return np.asarray(fidelity(states, model.reconstruct(states)), dtype=float)


def reconstruction_rate(model: QVAEModel, dataset, side: str = "test") -> float:
    """
    Mean reconstruction fidelity over one side of the split.

    Args:
        model: Trained autoencoder
        dataset: Dataset (or plain states, which are used whole)
        side: "train", "test" or "all"

    Raises:
        ValueError: If the chosen side is empty
    """
    return float(np.mean(reconstruction_fidelities(model, dataset, side)))


def _upper_triangles(states_a, states_b) -> Tuple[np.ndarray, np.ndarray]:
    a, b = as_batch(states_a), as_batch(states_b)
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"State sets differ in size: {a.shape[0]} vs {b.shape[0]}")
    if a.shape[0] < 3:
        raise ValueError("Pairwise-fidelity correlation needs at least 3 states")
    rows, cols = np.triu_indices(a.shape[0], k=1)
    tri_a = pairwise_fidelity(a)[rows, cols]
    tri_b = pairwise_fidelity(b)[rows, cols]
    for name, tri in (("first", tri_a), ("second", tri_b)):
        if np.ptp(tri) == 0:
            raise ValueError(f"Pairwise fidelities of the {name} state set have zero variance")
    return tri_a, tri_b


def pairwise_fidelity_pcc_test(states_a, states_b) -> Tuple[float, float]:
    """Pearson r and two-sided p-value between pairwise-fidelity triangles."""
    tri_a, tri_b = _upper_triangles(states_a, states_b)
    result = pearsonr(tri_a, tri_b)
    return float(result[0]), float(result[1])


def pairwise_fidelity_pcc(states_a, states_b) -> float:
    """
    Pearson correlation between the strictly upper-triangular entries of
    the two pairwise-fidelity matrices.

    Raises:
        ValueError: On fewer than 3 states, unequal counts or zero variance
    """
    return pairwise_fidelity_pcc_test(states_a, states_b)[0]


def latent_volume(latents) -> float:
    """
    √(σ_x² + σ_y² + σ_z²) of the Bloch coordinates of single-qubit latents.

    Raises:
        ValueError: For multi-qubit latents or fewer than 2 states
    """
    mats = as_batch(latents)
    if n_qubits_of(mats.shape[-1]) != 1:
        raise ValueError("Latent volume is defined for single-qubit latent states only")
    if mats.shape[0] < 2:
        raise ValueError("Latent volume needs at least 2 states")
    coords = bloch_vectors(mats, 0)
    return float(np.sqrt(np.sum(np.var(coords, axis=0))))


@dataclass
class QsvcSettings:
    """Classifier settings used by report_triple."""

    n_layers: int = 3
    scaling: str = "none"
    c_reg: float = 1.0
    seed: int = 0


@dataclass
class SeedMetrics:
    """Metrics of one trained seed."""

    seed: int
    f: float
    l: Optional[float] = None
    r: Optional[float] = None
    l_auc: Optional[float] = None
    r_auc: Optional[float] = None
    vol_latent: Optional[float] = None
    pcc: Optional[float] = None
    pcc_p: Optional[float] = None
    kernels: Dict[str, np.ndarray] = field(default_factory=dict, repr=False)

    def to_dict(self) -> Dict:
        return {
            "seed": self.seed,
            "f": self.f,
            "l": self.l,
            "r": self.r,
            "l_auc": self.l_auc,
            "r_auc": self.r_auc,
            "vol_latent": self.vol_latent,
            "pcc": self.pcc,
            "pcc_p": self.pcc_p,
        }


def mean_std(values: Sequence[Optional[float]]) -> Optional[Dict[str, float]]:
    """Mean and population std, or None if any value is missing."""
    if not values or any(v is None for v in values):
        return None
    arr = np.asarray(values, dtype=float)
    return {"mean": float(np.mean(arr)), "std": float(np.std(arr))}


@dataclass
class TripleReport:
    """
    Seed-aggregated f / l / r (plus the input baseline i).

    Attributes:
        seeds: Per-seed metrics
        i: Input-state QSVC accuracy (seed independent)
        i_auc: Input-state QSVC AUC
    """

    seeds: List[SeedMetrics]
    i: Optional[float] = None
    i_auc: Optional[float] = None

    def summary(self) -> Dict:
        out = {
            key: mean_std([getattr(s, key) for s in self.seeds])
            for key in ("f", "l", "r", "l_auc", "r_auc", "vol_latent", "pcc")
        }
        out["i"] = self.i
        out["i_auc"] = self.i_auc
        return out

    def to_dict(self) -> Dict:
        return {"summary": self.summary(), "seeds": [s.to_dict() for s in self.seeds]}


def _classify(states_train, y_train, states_test, y_test, settings: QsvcSettings, keep_kernels: bool):
    spec = KernelSpec(
        n_qubits=n_qubits_of(as_batch(states_train).shape[-1]),
        n_layers=settings.n_layers,
        scaling=settings.scaling,
    )
    clf = QSVC(spec, seed=settings.seed, c_reg=settings.c_reg).train(states_train, y_train)
    score, k_test = clf.evaluate(states_test, y_test)
    kernels = {"train": clf.train_kernel, "test": k_test} if keep_kernels else {}
    return score, kernels


def seed_metrics(
    model: QVAEModel,
    dataset: Dataset,
    settings: Optional[QsvcSettings] = None,
    seed: int = 0,
    keep_kernels: bool = False,
) -> SeedMetrics:
    """
    Metrics of one trained model.

    f uses the test side. l and r need labels and a split. Latent-geometry
    metrics use every point of the dataset.
    """
    settings = settings or QsvcSettings()
    metrics = SeedMetrics(seed=seed, f=reconstruction_rate(model, dataset, "test"))

    all_states = dataset.states
    latents = model.encode(all_states)
    if model.spec.n_z == 1 and all_states.shape[0] >= 2:
        metrics.vol_latent = latent_volume(latents)
    if all_states.shape[0] >= 3:
        try:
            metrics.pcc, metrics.pcc_p = pairwise_fidelity_pcc_test(all_states, latents)
        except ValueError as exc:
            logger.warning("Input-latent PCC unavailable: %s", exc)

    if dataset.has_labels and dataset.split is not None:
        train_idx, test_idx = dataset.indices("train"), dataset.indices("test")
        y_train, y_test = dataset.labels[train_idx], dataset.labels[test_idx]
        recon = model.decode(latents)
        latent_score, latent_k = _classify(
            latents[train_idx], y_train, latents[test_idx], y_test, settings, keep_kernels
        )
        recon_score, recon_k = _classify(
            recon[train_idx], y_train, recon[test_idx], y_test, settings, keep_kernels
        )
        metrics.l, metrics.l_auc = latent_score.accuracy, latent_score.auc
        metrics.r, metrics.r_auc = recon_score.accuracy, recon_score.auc
        metrics.kernels = {f"latent_{k}": v for k, v in latent_k.items()}
        metrics.kernels.update({f"recon_{k}": v for k, v in recon_k.items()})
    return metrics


def input_baseline(dataset: Dataset, settings: Optional[QsvcSettings] = None):
    """QSVC score on the input states, or None without labels and split."""
    if not dataset.has_labels or dataset.split is None:
        return None
    settings = settings or QsvcSettings()
    train_idx, test_idx = dataset.indices("train"), dataset.indices("test")
    score, _ = _classify(
        dataset.states[train_idx],
        dataset.labels[train_idx],
        dataset.states[test_idx],
        dataset.labels[test_idx],
        settings,
        keep_kernels=False,
    )
    return score


def report_triple(
    models: Sequence[QVAEModel],
    dataset: Dataset,
    settings: Optional[QsvcSettings] = None,
    seeds: Optional[Sequence[int]] = None,
) -> TripleReport:
    """
    Aggregate f / l / r over trained seeds.

    Args:
        models: One trained model per seed
        dataset: Split dataset (labels needed for l, r, i)
        settings: QSVC settings
        seeds: Seed ids for the per-seed records

    Raises:
        ValueError: If no models are given
    """
    if not models:
        raise ValueError("report_triple needs at least one trained model")
    seeds = list(seeds) if seeds is not None else list(range(len(models)))
    per_seed = [seed_metrics(m, dataset, settings, s) for m, s in zip(models, seeds)]
    baseline = input_baseline(dataset, settings)
    return TripleReport(
        seeds=per_seed,
        i=baseline.accuracy if baseline is not None else None,
        i_auc=baseline.auc if baseline is not None else None,
    )
