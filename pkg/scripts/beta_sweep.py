"""
β Sweep Experiment

Trains the autoencoder over a range of regularization weights and
relates the latent geometry to β.

Process:
1. Load a run config (synthetic quantum dataset by default)
2. Train and evaluate once per β (one run directory per β)
3. Optionally repeat every β with the global objective
4. Aggregate the runs into summary tables
5. Correlate Vol_latent with the input-latent PCC across β

Usage:
    python scripts/beta_sweep.py
    python scripts/beta_sweep.py --config config/config.yaml --betas 0:3.5:0.5 --global

Output:
    outputs/beta_sweep/instance/beta=<β>/      (run directories)
    outputs/beta_sweep/global/beta=<β>/        (with --global)
    outputs/beta_sweep/report/summary.csv
    outputs/beta_sweep/report/bloch.csv
"""

import argparse
import sys
from pathlib import Path

import numpy as np
from scipy.stats import pearsonr

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))

from ml.pipeline import run_sweep
from scoring.report import write_report
from utils.config import RunConfig
from utils.logger import setup_logger


def print_header(title, width=80):
    """Print section header."""
    print()
    print("=" * width)
    print(title.center(width))
    print("=" * width)
    print()


def stat(summary: dict, key: str) -> str:
    value = summary.get(key)
    return f"{value['mean']:.3f} ± {value['std']:.3f}" if value else "-"


def main():
    """Run the β sweep."""
    parser = argparse.ArgumentParser(description="β sweep for zeta-qvae")
    parser.add_argument("--config", default="config/synthetic_quantum.yaml", help="Run config")
    parser.add_argument("--betas", default="0,0.1,0.2,0.3,0.5,1,1.5,2", help="start:stop:step or v1,v2,...")
    parser.add_argument("--out", default="outputs/beta_sweep", help="Output directory")
    parser.add_argument("--global", dest="with_global", action="store_true", help="Also train globally")
    args = parser.parse_args()

    setup_logger(None)
    print()
    print("*" * 80)
    print("ZETA-QVAE β SWEEP".center(80))
    print("*" * 80)

    cfg = RunConfig.from_yaml(args.config)
    out = Path(args.out)
    modes = ["instance", "global"] if args.with_global else ["instance"]
    results = {}
    for mode in modes:
        print_header(f"Training: {mode} objective")
        mode_cfg = cfg.apply_override("objective.mode", mode)
        results[mode] = run_sweep(mode_cfg, out / mode, [f"beta={args.betas}"])

    print_header("Results")
    print(f"{'mode':10s} {'point':14s} {'f':>16s} {'l':>16s} {'Vol_latent':>16s} {'PCC':>16s}")
    for mode, points in results.items():
        for name, payload in points.items():
            s = payload["summary"]
            print(
                f"{mode:10s} {name:14s} {stat(s, 'f'):>16s} {stat(s, 'l'):>16s} "
                f"{stat(s, 'vol_latent'):>16s} {stat(s, 'pcc'):>16s}"
            )

    print_header("Latent Geometry vs β")
    points = results["instance"]
    vol = [p["summary"]["vol_latent"] for p in points.values()]
    pcc = [p["summary"]["pcc"] for p in points.values()]
    if len(points) >= 3 and all(vol) and all(pcc):
        vol_means = np.array([v["mean"] for v in vol])
        pcc_means = np.array([v["mean"] for v in pcc])
        if np.ptp(vol_means) > 0 and np.ptp(pcc_means) > 0:
            r, p = pearsonr(vol_means, pcc_means)
            print(f"  PCC(Vol_latent, input-latent PCC) = {r:.3f} (p = {p:.4f})")
        peak = list(points)[int(np.argmax(vol_means))]
        print(f"  Largest latent volume at {peak}")
    else:
        print("  Needs single-qubit latents and at least 3 sweep points")

    paths = write_report([out / mode for mode in modes], out / "report")
    print()
    for name, path in paths.items():
        print(f"  Saved: {path}")
    print()
    print("✓ Sweep complete!")
    print()

    return 0


if __name__ == "__main__":
    sys.exit(main())
