"""
Dataset Container

Ordered density-matrix dataset with optional ±1 labels, a train/test
split and the provenance needed to regenerate it.

Bundle layout on disk:
    <bundle>/
        meta.json      <- provenance, split, flags, format version
        states.bin     <- uint32 count, uint32 dim, then complex64 matrices
        labels.csv     <- index,label (only when labels are present)
        features.csv   <- raw feature matrix (CSV-ingested datasets only)

All binary values are little-endian. States are stored in single
precision; on load they are upcast, re-symmetrized and, for pure-state
datasets, projected back onto their dominant eigenvector.
"""

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from sklearn.model_selection import train_test_split

from quantum.linalg import draw_seed, hermitianize, n_qubits_of
from quantum.states import DensityMatrix, as_batch, check_states, repurify

logger = logging.getLogger(__name__)

BUNDLE_FORMAT_VERSION = 1
SIDES = ("train", "test", "all")


@dataclass(frozen=True)
class Split:
    """Disjoint, exhaustive train/test index sets (sorted)."""

    train: np.ndarray
    test: np.ndarray

    def to_dict(self) -> Dict[str, List[int]]:
        return {"train": [int(i) for i in self.train], "test": [int(i) for i in self.test]}

    @classmethod
    def from_dict(cls, data: Dict) -> "Split":
        return cls(
            train=np.asarray(data["train"], dtype=int),
            test=np.asarray(data["test"], dtype=int),
        )


@dataclass
class Dataset:
    """
    Collection of density matrices.

    Attributes:
        states: (N, d, d) complex stack
        labels: Optional ±1 labels
        split: Optional train/test split
        provenance: Generator name, seed and parameters
        allows_mixed: Whether inputs may be mixed (synthetic quantum data)
        features: Raw feature matrix the states were embedded from
        coordinates: Generator-side manifold coordinate (Swiss-roll t)
    """

    states: np.ndarray
    labels: Optional[np.ndarray] = None
    split: Optional[Split] = None
    provenance: Dict = field(default_factory=dict)
    allows_mixed: bool = False
    features: Optional[np.ndarray] = None
    coordinates: Optional[np.ndarray] = None

    def __post_init__(self):
        self.states = as_batch(self.states)
        n = self.states.shape[0]
        if n == 0:
            raise ValueError("Dataset must contain at least one state")
        n_qubits_of(self.states.shape[-1])
        if self.labels is not None:
            self.labels = np.asarray(self.labels).astype(int).ravel()
            if self.labels.size != n:
                raise ValueError(f"{self.labels.size} labels for {n} states")
            if not np.all(np.isin(self.labels, (-1, 1))):
                raise ValueError("Labels must be -1 or +1")
        if self.split is not None:
            _check_split(self.split, n)

    def validate(self) -> "Dataset":
        """Check every state (and purity unless mixed inputs are allowed)."""
        check_states(self.states, require_pure=not self.allows_mixed)
        return self

    @property
    def n_points(self) -> int:
        return self.states.shape[0]

    @property
    def n_qubits(self) -> int:
        return n_qubits_of(self.states.shape[-1])

    @property
    def points(self) -> List[DensityMatrix]:
        return [DensityMatrix(m) for m in self.states]

    @property
    def has_labels(self) -> bool:
        return self.labels is not None

    def indices(self, side: str = "all") -> np.ndarray:
        """
        Point indices for a split side.

        Raises:
            ValueError: On an unknown side or a missing split
        """
        if side not in SIDES:
            raise ValueError(f"Unknown split side '{side}' (expected one of {SIDES})")
        if side == "all":
            return np.arange(self.n_points)
        if self.split is None:
            raise ValueError("Dataset has no train/test split")
        return getattr(self.split, side)

    def side_states(self, side: str = "all") -> np.ndarray:
        return self.states[self.indices(side)]

    def side_labels(self, side: str = "all") -> Optional[np.ndarray]:
        if self.labels is None:
            return None
        return self.labels[self.indices(side)]


def _check_split(split: Split, n: int) -> None:
    joined = np.concatenate([split.train, split.test])
    if joined.size != n or not np.array_equal(np.sort(joined), np.arange(n)):
        raise ValueError("Split indices must be disjoint and cover every point exactly once")


def split(
    dataset: Dataset, ratio: float = 0.7, stratify: bool = True, rng: Optional[np.random.Generator] = None
) -> Dataset:
    """
    Random train/test split.

    Args:
        dataset: Dataset to split
        ratio: Training fraction, in (0, 1)
        stratify: Preserve the label balance (needs labels)
        rng: Random generator (seed 0 if omitted)

    Returns:
        Copy of the dataset with `split` populated

    Raises:
        ValueError: On a bad ratio, too few points, or a class with fewer
            than two members under stratification
    """
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"Split ratio must be in (0, 1), got {ratio}")
    n = dataset.n_points
    if n < 2:
        raise ValueError(f"Cannot split a dataset of {n} point(s) into train and test sets")
    n_train = int(np.floor(ratio * n + 1e-9))
    if n_train < 1 or n_train >= n:
        raise ValueError(f"Ratio {ratio} leaves an empty side for {n} points")
    strata = None
    if stratify and dataset.labels is not None:
        values, counts = np.unique(dataset.labels, return_counts=True)
        small = values[counts < 2]
        if small.size:
            raise ValueError(f"Class {int(small[0])} has fewer than 2 members; cannot stratify")
        strata = dataset.labels
    rng = rng if rng is not None else np.random.Generator(np.random.Philox(0))
    train_idx, test_idx = train_test_split(
        np.arange(n), train_size=n_train, stratify=strata, random_state=draw_seed(rng)
    )
    return replace(dataset, split=Split(train=np.sort(train_idx), test=np.sort(test_idx)))


def save_bundle(dataset: Dataset, out_dir: Union[str, Path]) -> Path:
    """
    Write a dataset bundle directory.

    Returns:
        The bundle path
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    count, dim = dataset.states.shape[0], dataset.states.shape[-1]
    with open(out_dir / "states.bin", "wb") as f:
        f.write(np.array([count, dim], dtype="<u4").tobytes())
        f.write(dataset.states.astype("<c8").tobytes())
    if dataset.labels is not None:
        pd.DataFrame({"index": np.arange(count), "label": dataset.labels}).to_csv(
            out_dir / "labels.csv", index=False
        )
    if dataset.features is not None:
        pd.DataFrame(dataset.features).to_csv(out_dir / "features.csv", index=False)
    meta = {
        "format_version": BUNDLE_FORMAT_VERSION,
        "n_points": int(count),
        "n_qubits": dataset.n_qubits,
        "allows_mixed": dataset.allows_mixed,
        "has_labels": dataset.labels is not None,
        "provenance": dataset.provenance,
        "split": dataset.split.to_dict() if dataset.split is not None else None,
    }
    if dataset.coordinates is not None:
        meta["coordinates"] = [float(v) for v in dataset.coordinates]
    with open(out_dir / "meta.json", "w", encoding="utf-8") as f:
        json.dump(meta, f, indent=2, sort_keys=True)
        f.write("\n")
    logger.info("Wrote %d-state bundle to %s", count, out_dir)
    return out_dir


def _read_states(path: Path) -> Tuple[np.ndarray, int]:
    raw = path.read_bytes()
    if len(raw) < 8:
        raise ValueError(f"{path} is too short to hold a states header")
    count, dim = (int(v) for v in np.frombuffer(raw[:8], dtype="<u4"))
    expected = 8 + count * dim * dim * 8
    if len(raw) != expected:
        raise ValueError(f"{path} has {len(raw)} bytes, expected {expected} for {count} {dim}x{dim} states")
    states = np.frombuffer(raw[8:], dtype="<c8").reshape(count, dim, dim)
    return states.astype(np.complex128), count


def load_bundle(bundle_dir: Union[str, Path]) -> Dataset:
    """
    Read a dataset bundle directory.

    Raises:
        FileNotFoundError: If meta.json or states.bin is missing
        ValueError: On a malformed bundle
    """
    bundle_dir = Path(bundle_dir)
    meta_path = bundle_dir / "meta.json"
    if not meta_path.exists():
        raise FileNotFoundError(f"No meta.json in dataset bundle {bundle_dir}")
    with open(meta_path, "r", encoding="utf-8") as f:
        meta = json.load(f)
    if meta.get("format_version") != BUNDLE_FORMAT_VERSION:
        raise ValueError(f"Unsupported bundle format version {meta.get('format_version')!r}")

    states, count = _read_states(bundle_dir / "states.bin")
    states = hermitianize(states)
    states = states / np.trace(states, axis1=-2, axis2=-1).real[:, None, None]
    allows_mixed = bool(meta.get("allows_mixed", False))
    if not allows_mixed:
        logger.debug("Restoring purity of %d single-precision states", count)
        states = repurify(states)

    labels = None
    if meta.get("has_labels"):
        frame = pd.read_csv(bundle_dir / "labels.csv")
        labels = frame.sort_values("index")["label"].to_numpy()
    features = None
    if (bundle_dir / "features.csv").exists():
        features = pd.read_csv(bundle_dir / "features.csv").to_numpy(dtype=float)
    coordinates = meta.get("coordinates")
    return Dataset(
        states=states,
        labels=labels,
        split=Split.from_dict(meta["split"]) if meta.get("split") else None,
        provenance=meta.get("provenance", {}),
        allows_mixed=allows_mixed,
        features=features,
        coordinates=np.asarray(coordinates) if coordinates is not None else None,
    )
