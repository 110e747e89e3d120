"""
Run Report

Aggregates completed run directories into flat tables:

    summary.csv / summary.json
        One row per run keyed by (n_aux_encoder, n_aux_decoder, n_layers,
        n_z, beta, recon, reg, mode) with f / l / r mean and std, the
        input baseline i, AUCs, Vol_latent and the input-latent PCC.
    bloch.csv
        Latent Bloch coordinates of every seed (x, y, z, label, beta,
        run, seed) for external plotting.

Example row:
    run=beta=0.5  n_aux_encoder=0  n_layers=3  beta=0.5  f_mean=0.93  l_mean=0.74 ...
"""

import logging
from pathlib import Path
from typing import Dict, List, Sequence, Union

import pandas as pd

from utils.file_utils import ensure_dir, find_run_dirs, read_json, write_json

logger = logging.getLogger(__name__)

KEY_COLUMNS = ["n_aux_encoder", "n_aux_decoder", "n_layers", "n_z", "beta", "recon", "reg", "mode"]
STAT_METRICS = ["f", "l", "r", "l_auc", "r_auc", "vol_latent", "pcc"]
BLOCH_COLUMNS = ["x", "y", "z", "label", "beta", "run", "seed"]


def _run_row(run_dir: Path, base: Path) -> Dict:
    config = read_json(run_dir / "config.resolved.json")
    metrics = read_json(run_dir / "metrics.json")
    try:
        model, objective = config["model"], config["objective"]
        summary = metrics["summary"]
        row = {
            "run": str(run_dir.relative_to(base)) if run_dir != base else run_dir.name,
            "data": config["data"]["kind"],
            "n_x": model["n_x"],
            "n_z": model["n_z"],
            "n_aux_encoder": model["n_aux_encoder"],
            "n_aux_decoder": model["n_aux_decoder"],
            "n_layers": model["n_layers"],
            "beta": objective["beta"],
            "recon": objective["recon"],
            "reg": objective["reg"],
            "mode": objective["mode"],
            "n_seeds": len(metrics["seeds"]),
        }
        for name in STAT_METRICS:
            stat = summary[name]
            row[f"{name}_mean"] = stat["mean"] if stat else None
            row[f"{name}_std"] = stat["std"] if stat else None
        row["i"] = summary["i"]
        row["i_auc"] = summary["i_auc"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"Incompatible run schema in {run_dir}: missing {exc}") from None
    return row


def _bloch_rows(run_dir: Path, run_name: str, beta: float) -> List[pd.DataFrame]:
    frames = []
    for latents in sorted(run_dir.glob("seed_*/latents.csv")):
        frame = pd.read_csv(latents)
        missing = {"x", "y", "z", "label"} - set(frame.columns)
        if missing:
            raise ValueError(f"Incompatible run schema in {latents}: missing columns {sorted(missing)}")
        frame = frame[["x", "y", "z", "label"]].copy()
        frame["beta"] = beta
        frame["run"] = run_name
        frame["seed"] = int(latents.parent.name.split("_", 1)[1])
        frames.append(frame)
    return frames


def build_report(run_dirs: Sequence[Union[str, Path]]) -> Dict[str, pd.DataFrame]:
    """
    Collect every completed run under the given directories.

    Returns:
        {"summary": DataFrame, "bloch": DataFrame}

    Raises:
        ValueError: If no completed run is found or a run has an
            incompatible schema
    """
    rows = []
    bloch = []
    for base in (Path(p) for p in run_dirs):
        if not base.exists():
            raise ValueError(f"Run directory does not exist: {base}")
        found = find_run_dirs(base)
        if not found:
            raise ValueError(f"No completed runs under {base}")
        for run_dir in found:
            row = _run_row(run_dir, base)
            rows.append(row)
            bloch.extend(_bloch_rows(run_dir, row["run"], row["beta"]))
    if not rows:
        raise ValueError("No run directories given")

    summary = pd.DataFrame(rows).sort_values(KEY_COLUMNS + ["run"], kind="mergesort").reset_index(drop=True)
    bloch_frame = pd.concat(bloch, ignore_index=True) if bloch else pd.DataFrame(columns=BLOCH_COLUMNS)
    logger.info("Report over %d run(s), %d latent points", len(summary), len(bloch_frame))
    return {"summary": summary, "bloch": bloch_frame[BLOCH_COLUMNS]}


def save_report(tables: Dict[str, pd.DataFrame], out_dir: Union[str, Path]) -> Dict[str, Path]:
    """
    Write summary.csv, summary.json and bloch.csv.

    Returns:
        Artifact name -> written path
    """
    out_dir = ensure_dir(out_dir)
    summary = tables["summary"]
    paths = {
        "summary.csv": out_dir / "summary.csv",
        "summary.json": out_dir / "summary.json",
        "bloch.csv": out_dir / "bloch.csv",
    }
    summary.to_csv(paths["summary.csv"], index=False)
    records = summary.astype(object).where(summary.notna(), None).to_dict(orient="records")
    write_json(paths["summary.json"], records)
    tables["bloch"].to_csv(paths["bloch.csv"], index=False)
    return paths


def write_report(run_dirs: Sequence[Union[str, Path]], out_dir: Union[str, Path]) -> Dict[str, Path]:
    """Build and save the report of the given run directories."""
    return save_report(build_report(run_dirs), out_dir)
