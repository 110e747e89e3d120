"""
CSV Dataset Loader

Turns a rectangular numeric CSV (e.g. gene-expression profiles, one row
per sample) into a labeled quantum dataset.

Pipeline:
1. Read with pandas; reject non-numeric cells
2. Map the label column to ±1
3. Balance the classes by downsampling the majority class
4. Global min-max normalization of the whole matrix, scaled to [0, π]
5. Per-row L2 normalization
6. Amplitude embedding
7. Stratified train/test split (70/30 by default)

Balancing happens before normalization, so exporting the retained rows
with export_csv and ingesting them again reproduces the same states.

CSV Format:
    UTF-8, header row, comma-separated. Every non-label column is a
    feature.
"""

import logging
import math
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from data.dataset import Dataset, split
from quantum.states import amplitude_embed_many

logger = logging.getLogger(__name__)


def _numeric_frame(frame: pd.DataFrame, source: Path) -> np.ndarray:
    for column in frame.columns:
        bad = pd.to_numeric(frame[column], errors="coerce").isna()
        if bad.any():
            row = int(np.flatnonzero(bad.to_numpy())[0])
            raise ValueError(
                f"Non-numeric cell in {source} at row {row}, column '{column}': {frame[column].iloc[row]!r}"
            )
    return frame.apply(pd.to_numeric).to_numpy(dtype=float)


def encode_labels(values: pd.Series) -> np.ndarray:
    """
    Map a two-valued label column to ±1.

    {-1, 1} is kept, {0, 1} maps 0 → -1; any other pair maps the first
    value in sorted order to -1.

    Raises:
        ValueError: Unless there are exactly two distinct values
    """
    unique = sorted(values.dropna().unique().tolist(), key=str)
    if values.isna().any():
        raise ValueError("Label column contains missing values")
    if len(unique) != 2:
        raise ValueError(f"Expected exactly two label values, found {len(unique)}: {unique[:5]}")
    as_set = set(unique)
    if as_set == {-1, 1}:
        return values.to_numpy().astype(int)
    if as_set == {0, 1}:
        return np.where(values.to_numpy().astype(int) == 1, 1, -1)
    negative, positive = unique
    logger.info("Label mapping: %r -> -1, %r -> +1", negative, positive)
    return np.where(values.to_numpy() == positive, 1, -1)


def balance_classes(labels: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Sorted indices keeping an equal number of cases and controls."""
    pos = np.flatnonzero(labels == 1)
    neg = np.flatnonzero(labels == -1)
    keep = min(pos.size, neg.size)
    if pos.size > keep:
        pos = rng.choice(pos, size=keep, replace=False)
    if neg.size > keep:
        neg = rng.choice(neg, size=keep, replace=False)
    return np.sort(np.concatenate([pos, neg]))


def normalize_features(features: np.ndarray) -> np.ndarray:
    """
    Global min-max to [0, π], then per-row L2.

    Raises:
        ValueError: If the matrix is constant
    """
    lo, hi = float(np.min(features)), float(np.max(features))
    if hi == lo:
        raise ValueError("degenerate normalization: every feature value is identical")
    scaled = math.pi * (features - lo) / (hi - lo)
    norms = np.linalg.norm(scaled, axis=1, keepdims=True)
    zero = np.flatnonzero(norms[:, 0] == 0)
    if zero.size:
        raise ValueError(f"Row {int(zero[0])} is all zeros after normalization and cannot be embedded")
    return scaled / norms


def ingest_csv(
    path: Union[str, Path],
    label_column: Optional[str] = None,
    n_qubits: Optional[int] = None,
    ratio: float = 0.7,
    balance: bool = True,
    rng: Optional[np.random.Generator] = None,
    seed: Optional[int] = None,
) -> Dataset:
    """
    Load a CSV file as a split quantum dataset.

    Args:
        path: CSV file
        label_column: Name of the ±1 / 0-1 / two-valued label column
        n_qubits: Register size (smallest that fits the features by default)
        ratio: Training fraction of the split
        balance: Downsample the majority class
        rng: Random generator for balancing and splitting
        seed: Recorded in the provenance

    Raises:
        ValueError: On non-numeric cells, a constant matrix, a missing
            label column, or too few rows to split
    """
    path = Path(path)
    rng = rng if rng is not None else np.random.Generator(np.random.Philox(0 if seed is None else seed))
    frame = pd.read_csv(path, encoding="utf-8")
    labels = None
    if label_column is not None:
        if label_column not in frame.columns:
            raise ValueError(f"Label column '{label_column}' not found in {path}")
        labels = encode_labels(frame[label_column])
        frame = frame.drop(columns=[label_column])
    if frame.shape[1] == 0:
        raise ValueError(f"{path} has no feature columns")
    features = _numeric_frame(frame, path)

    if labels is not None and balance:
        keep = balance_classes(labels, rng)
        if keep.size < features.shape[0]:
            logger.info("Balanced classes: kept %d of %d rows", keep.size, features.shape[0])
        features, labels = features[keep], labels[keep]

    width = features.shape[1]
    if n_qubits is None:
        n_qubits = max(1, math.ceil(math.log2(width)))
    embedded = amplitude_embed_many(normalize_features(features), n_qubits)
    dataset = Dataset(
        states=embedded,
        labels=labels,
        provenance={
            "generator": "csv",
            "source": path.name,
            "seed": seed,
            "columns": [str(c) for c in frame.columns],
            "label_column": label_column,
            "n_qubits": n_qubits,
            "ratio": ratio,
            "balance": balance,
        },
        features=features,
    )
    return split(dataset, ratio=ratio, stratify=labels is not None, rng=rng)


def export_csv(dataset: Dataset, path: Union[str, Path], label_column: str = "label") -> Path:
    """
    Write the raw feature matrix (and ±1 labels) of an ingested dataset.

    Raises:
        ValueError: If the dataset carries no raw features
    """
    if dataset.features is None:
        raise ValueError("Dataset has no raw features to export")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = dataset.provenance.get("columns") or [f"f{i}" for i in range(dataset.features.shape[1])]
    frame = pd.DataFrame(dataset.features, columns=columns)
    if dataset.labels is not None:
        frame[label_column] = dataset.labels
    frame.to_csv(path, index=False)
    return path
