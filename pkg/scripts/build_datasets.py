"""
Build Dataset Bundles

Generates the bundled datasets used by the experiments so that every run
trains on identical states.

Process:
1. Synthetic two-qubit dataset (1000 mixed states, compressible to one qubit)
2. Swiss roll with 5 noise coordinates (1000 labeled pure states, 3 qubits)
3. Optionally: a labeled numeric CSV (e.g. a gene-expression matrix)

Usage:
    python scripts/build_datasets.py
    python scripts/build_datasets.py --csv expression.csv --label-column case

Output:
    outputs/datasets/synthetic_quantum/
    outputs/datasets/swiss_roll/
    outputs/datasets/<csv stem>/         (with --csv)
"""

import argparse
import sys
from pathlib import Path

import numpy as np

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))

from data.dataset import save_bundle, split
from data.dataset_loader import ingest_csv
from data.generators import gen_swiss_roll, gen_synthetic_quantum, threshold_labels_consistent
from quantum.linalg import make_rng
from quantum.states import purity


def print_header(title, width=80):
    """Print section header."""
    print()
    print("=" * width)
    print(title.center(width))
    print("=" * width)
    print()


def describe(dataset, path: Path):
    p = purity(dataset.states)
    print(f"  States: {dataset.n_points} on {dataset.n_qubits} qubit(s)")
    print(f"  Purity: min {np.min(p):.4f}, max {np.max(p):.4f}")
    if dataset.has_labels:
        print(f"  Labels: {int(np.sum(dataset.labels == 1))} positive, {int(np.sum(dataset.labels == -1))} negative")
    if dataset.split is not None:
        print(f"  Split: {dataset.split.train.size} train / {dataset.split.test.size} test")
    print(f"  Saved: {path}")


def main():
    """Build every dataset bundle."""
    parser = argparse.ArgumentParser(description="Build zeta-qvae dataset bundles")
    parser.add_argument("--out", default="outputs/datasets", help="Output directory")
    parser.add_argument("--n", type=int, default=1000, help="Points per generated dataset")
    parser.add_argument("--seed", type=int, default=0, help="Generator seed")
    parser.add_argument("--csv", help="Optional labeled CSV to ingest")
    parser.add_argument("--label-column", help="Label column of --csv")
    args = parser.parse_args()

    print()
    print("*" * 80)
    print("ZETA-QVAE DATASET BUILDER".center(80))
    print("*" * 80)

    out = Path(args.out)

    print_header("Step 1: Synthetic Quantum Dataset")
    rng = make_rng(args.seed)
    synthetic = split(gen_synthetic_quantum(args.n, rng, seed=args.seed), ratio=0.7, stratify=False, rng=rng)
    describe(synthetic, save_bundle(synthetic, out / "synthetic_quantum"))

    print_header("Step 2: Swiss Roll Dataset")
    rng = make_rng(args.seed)
    roll = split(gen_swiss_roll(args.n, rng=rng, seed=args.seed), ratio=0.7, rng=rng)
    if not threshold_labels_consistent(roll):
        print("ERROR: Swiss-roll labels do not follow the manifold threshold")
        return 1
    describe(roll, save_bundle(roll, out / "swiss_roll"))

    if args.csv:
        print_header("Step 3: CSV Dataset")
        csv_path = Path(args.csv)
        if not csv_path.exists():
            print(f"\nERROR: CSV not found at {csv_path}")
            return 1
        ingested = ingest_csv(csv_path, label_column=args.label_column, seed=args.seed)
        describe(ingested, save_bundle(ingested, out / csv_path.stem))

    print()
    print("✓ Dataset building complete!")
    print()
    print("Next step: python scripts/beta_sweep.py")
    print()

    return 0


if __name__ == "__main__":
    sys.exit(main())
