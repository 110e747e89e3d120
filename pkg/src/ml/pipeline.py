"""
Experiment Pipeline

Runs one configured experiment end to end and writes its run directory:

    <run>/
        config.resolved.json   <- every applied default
        run.log                <- DEBUG log of the run
        metrics.json           <- seed-aggregated f / l / r / i, AUCs, Vol_latent, PCC
        seed_<s>/
            params.json        <- model spec and (θ_e, θ_d)
            trace.ndjson       <- optimizer trace with loss components
            metrics.json       <- metrics of this seed
            latents.csv        <- Bloch coordinates of the latents (N_Z = 1)
            kernel_*.csv       <- QSVC kernels (qsvc.export_kernels)

Global-mode runs train on ρ_glob of the training side and are evaluated
per instance, exactly like instance-mode runs.

Sweeps run the same pipeline once per point of the cartesian product of
the sweep values, each in a `<field>=<value>` subdirectory (several
sweep keys are joined with "__").
"""

import itertools
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from data.dataset import Dataset, load_bundle, split
from data.dataset_loader import ingest_csv
from data.generators import gen_swiss_roll, gen_synthetic_quantum
from ml.model import ModelSpec
from ml.objective import ObjectiveMode, ObjectiveSpec
from ml.qsvc import export_kernel_csv
from ml.train_model import SeedResult, train
from quantum.linalg import make_rng
from quantum.states import bloch_vectors, global_state
from scoring.metrics import QsvcSettings, TripleReport, input_baseline, seed_metrics
from utils.config import DataConfig, RunConfig, parse_sweep, sweep_label
from utils.file_utils import ensure_dir, write_json, write_text
from utils.logger import detach_file, setup_logger

logger = logging.getLogger(__name__)


def load_dataset(cfg: DataConfig) -> Dataset:
    """
    Build or load the dataset described by a data block, split included.

    Raises:
        ValueError: On an unknown kind or an unusable source
    """
    rng = make_rng(cfg.seed)
    if cfg.kind == "swiss-roll":
        dataset = gen_swiss_roll(cfg.n, cfg.noise_dims, cfg.noise_sd, rng=rng, seed=cfg.seed)
    elif cfg.kind == "synthetic-quantum":
        dataset = gen_synthetic_quantum(
            cfg.n, rng, cfg.r_min, cfg.r_max, cfg.theta_mean, cfg.theta_sd, seed=cfg.seed
        )
    elif cfg.kind == "csv":
        return ingest_csv(
            cfg.path,
            label_column=cfg.label_column,
            n_qubits=cfg.n_qubits,
            ratio=cfg.ratio,
            balance=cfg.balance,
            rng=rng,
            seed=cfg.seed,
        )
    elif cfg.kind == "bundle":
        dataset = load_bundle(cfg.path)
        if dataset.split is not None:
            return dataset
    else:
        raise ValueError(f"Unknown data kind: {cfg.kind}")
    return split(dataset, ratio=cfg.ratio, stratify=cfg.stratify, rng=rng)


def model_spec_for(cfg: RunConfig, dataset: Dataset) -> ModelSpec:
    n_x = cfg.model.n_x if cfg.model.n_x is not None else dataset.n_qubits
    if n_x != dataset.n_qubits:
        raise ValueError(f"model.n_x={n_x} but the dataset has {dataset.n_qubits}-qubit states")
    return ModelSpec(
        n_x=n_x,
        n_z=cfg.model.n_z,
        n_aux_encoder=cfg.model.n_aux_encoder,
        n_aux_decoder=cfg.model.n_aux_decoder,
        n_layers=cfg.model.n_layers,
        tied=cfg.model.tied,
    )


def objective_spec_for(cfg: RunConfig) -> ObjectiveSpec:
    return ObjectiveSpec(
        recon=cfg.objective.recon,
        reg=cfg.objective.reg,
        beta=cfg.objective.beta,
        mode=cfg.objective.mode,
    )


def _write_latents(path: Path, latents: np.ndarray, labels: Optional[np.ndarray]) -> None:
    coords = bloch_vectors(latents, 0)
    frame = pd.DataFrame(
        {
            "index": np.arange(len(coords)),
            "x": coords[:, 0],
            "y": coords[:, 1],
            "z": coords[:, 2],
            "label": labels if labels is not None else np.zeros(len(coords), dtype=int),
        }
    )
    frame.to_csv(path, index=False)


def _write_seed(
    seed_dir: Path, result: SeedResult, spec: ModelSpec, metrics, dataset: Dataset, cfg: RunConfig
) -> Dict:
    ensure_dir(seed_dir)
    write_json(seed_dir / "params.json", {"seed": result.seed, "model": spec.to_dict(), **result.params.to_dict()})
    write_text(seed_dir / "trace.ndjson", result.trace.to_ndjson())
    record = {
        **metrics.to_dict(),
        "best_objective": result.trace.best_value,
        "n_evaluations": result.trace.n_evaluations,
        "epochs_run": result.trace.epochs_run,
        "stop_reason": result.trace.stop_reason,
    }
    write_json(seed_dir / "metrics.json", record)
    if cfg.report.bloch_dump and spec.n_z == 1:
        _write_latents(seed_dir / "latents.csv", result.model(spec).encode(dataset.states), dataset.labels)
    for name, kernel in metrics.kernels.items():
        export_kernel_csv(kernel, seed_dir / f"kernel_{name}.csv")
    return record


def run_experiment(cfg: RunConfig, out_dir: Union[str, Path], progress: bool = False) -> Dict:
    """
    Run one experiment and write its run directory.

    Args:
        cfg: Resolved run configuration
        out_dir: Run directory (created)
        progress: Show tqdm progress over seeds

    Returns:
        The metrics.json payload
    """
    out_dir = ensure_dir(out_dir)
    root = logging.getLogger()
    log_path = out_dir / "run.log"
    setup_logger(None, log_file=log_path, level=_console_level(root))
    try:
        write_json(out_dir / "config.resolved.json", cfg.to_dict())
        dataset = load_dataset(cfg.data)
        logger.info(
            "Dataset: %d points on %d qubits (%s)",
            dataset.n_points,
            dataset.n_qubits,
            dataset.provenance.get("generator", cfg.data.kind),
        )
        spec = model_spec_for(cfg, dataset)
        objective = objective_spec_for(cfg)
        train_states = dataset.side_states("train")
        data = global_state(train_states) if objective.mode is ObjectiveMode.GLOBAL else train_states

        results = train(
            spec,
            objective,
            data,
            cfg.train,
            batch_size=cfg.objective.batch_size,
            progress=progress,
        )

        settings = QsvcSettings(
            n_layers=cfg.qsvc.n_layers,
            scaling=cfg.qsvc.scaling,
            c_reg=cfg.qsvc.c_reg,
            seed=cfg.qsvc.seed,
        )
        per_seed = []
        records = []
        for result in results:
            metrics = seed_metrics(
                result.model(spec), dataset, settings, result.seed, keep_kernels=cfg.qsvc.export_kernels
            )
            per_seed.append(metrics)
            records.append(_write_seed(out_dir / f"seed_{result.seed}", result, spec, metrics, dataset, cfg))

        baseline = input_baseline(dataset, settings)
        report = TripleReport(
            seeds=per_seed,
            i=baseline.accuracy if baseline is not None else None,
            i_auc=baseline.auc if baseline is not None else None,
        )
        payload = {
            "summary": report.summary(),
            "seeds": records,
            "n_points": dataset.n_points,
            "n_train": int(dataset.indices("train").size),
            "n_test": int(dataset.indices("test").size),
        }
        write_json(out_dir / "metrics.json", payload)
        f = payload["summary"]["f"]
        logger.info("Run complete: f = %.4f ± %.4f", f["mean"], f["std"])
        return payload
    finally:
        detach_file(root, log_path)


def _console_level(root: logging.Logger) -> int:
    for handler in root.handlers:
        if not isinstance(handler, logging.FileHandler):
            return handler.level
    return logging.INFO


def sweep_points(cfg: RunConfig, sweeps: Sequence[str]) -> List[tuple]:
    """
    Expand sweep expressions into (directory name, config) pairs.

    Raises:
        ConfigError: On a malformed expression or an invalid swept value
    """
    parsed = [parse_sweep(expr) for expr in sweeps]
    points = []
    for combo in itertools.product(*(values for _, values in parsed)):
        point_cfg = cfg
        labels = []
        for (key, _), value in zip(parsed, combo):
            point_cfg = point_cfg.apply_override(key, value)
            labels.append(sweep_label(key, value))
        points.append(("__".join(labels), point_cfg))
    return points


def run_sweep(
    cfg: RunConfig, out_dir: Union[str, Path], sweeps: Sequence[str], progress: bool = False
) -> Dict[str, Dict]:
    """
    Run the experiment once per sweep point.

    Returns:
        Sweep-point directory name -> metrics payload
    """
    out_dir = ensure_dir(out_dir)
    points = sweep_points(cfg, sweeps)
    logger.info("Sweep over %d point(s)", len(points))
    results = {}
    for name, point_cfg in points:
        logger.info("Sweep point %s", name)
        results[name] = run_experiment(point_cfg, out_dir / name, progress=progress)
    return results
