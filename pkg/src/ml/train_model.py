"""
Autoencoder Training

Trains the quantum autoencoder from several random initializations.

Protocol:
- One independent run per seed in TrainConfig.seeds
- Initial angles drawn uniformly from [-π, π) with the seed's generator
- Restarted COBYLA (ml.optimizer.minimize) on the instance or global
  objective
- Results are bit-reproducible given (seed, config, dataset)

Parallelism:
    Seeds run in parallel with joblib, capped by ZQVAE_THREADS. Each seed
    is fully independent, so the worker count never changes the results.

Minibatching:
    batch_size="full" (default) evaluates the objective on the whole
    training set. An integer draws one fixed subset per epoch from a
    generator keyed on (seed, epoch), so each COBYLA epoch still sees a
    deterministic objective.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Union

import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

from ml.model import ModelParams, ModelSpec, QVAEModel
from ml.objective import ObjectiveMode, ObjectiveSpec, evaluate
from ml.optimizer import TrainConfig, TrainTrace, minimize
from quantum.linalg import make_rng
from quantum.states import GlobalState, as_batch, global_state
from utils.config import thread_limit

logger = logging.getLogger(__name__)

BatchSize = Union[str, int]


@dataclass
class SeedResult:
    """Outcome of training from one initialization."""

    seed: int
    params: ModelParams
    trace: TrainTrace

    def model(self, spec: ModelSpec) -> QVAEModel:
        return QVAEModel(spec, self.params)


class AutoencoderTrainer:
    """
    Trains one seed of the autoencoder.

    Usage:
        trainer = AutoencoderTrainer(model_spec, objective_spec, cfg)
        result = trainer.fit(train_states, seed=0)
    """

    def __init__(
        self,
        model_spec: ModelSpec,
        objective_spec: ObjectiveSpec,
        cfg: TrainConfig,
        batch_size: BatchSize = "full",
    ):
        if batch_size != "full" and (not isinstance(batch_size, int) or batch_size < 1):
            raise ValueError(f"batch_size must be 'full' or a positive integer, got {batch_size!r}")
        self.model_spec = model_spec
        self.objective_spec = objective_spec
        self.cfg = cfg
        self.batch_size = batch_size

    def initial_params(self, seed: int) -> np.ndarray:
        rng = make_rng(seed)
        return rng.uniform(-np.pi, np.pi, self.model_spec.n_params)

    def fit(self, data, seed: int) -> SeedResult:
        """
        Train from the seed's initialization.

        Args:
            data: Training states (instance mode) or GlobalState / states
                (global mode)
            seed: Initialization seed

        Returns:
            SeedResult with the best parameters and the full trace
        """
        spec = self.objective_spec
        if spec.mode is ObjectiveMode.GLOBAL:
            full = data if isinstance(data, GlobalState) else global_state(as_batch(data))
        else:
            full = as_batch(data)
        current = {"data": full}
        trace_components = []

        def on_epoch_start(epoch: int) -> None:
            if spec.mode is ObjectiveMode.GLOBAL or self.batch_size == "full":
                return
            n = full.shape[0]
            if self.batch_size >= n:
                return
            rng = make_rng([int(seed), epoch])
            idx = np.sort(rng.choice(n, size=self.batch_size, replace=False))
            current["data"] = full[idx]

        def objective(x: np.ndarray) -> float:
            value = evaluate(spec, QVAEModel.from_flat(self.model_spec, x), current["data"])
            trace_components.append((value.recon, value.reg))
            return value.total

        x_best, trace = minimize(objective, self.initial_params(seed), self.cfg, on_epoch_start)
        trace.components = trace_components
        logger.info(
            "seed %d: best objective %.6f after %d evaluations (%s)",
            seed,
            trace.best_value,
            trace.n_evaluations,
            trace.stop_reason,
        )
        return SeedResult(seed=int(seed), params=self.model_spec.split(x_best), trace=trace)


def _train_seed(model_spec, objective_spec, cfg, batch_size, data, seed) -> SeedResult:
    return AutoencoderTrainer(model_spec, objective_spec, cfg, batch_size).fit(data, seed)


def train(
    model_spec: ModelSpec,
    objective_spec: ObjectiveSpec,
    data,
    cfg: TrainConfig,
    batch_size: BatchSize = "full",
    n_jobs: Optional[int] = None,
    progress: bool = False,
) -> List[SeedResult]:
    """
    Train one model per seed.

    Args:
        model_spec: Autoencoder architecture
        objective_spec: Loss configuration
        data: Training states or GlobalState
        cfg: Optimizer schedule and seeds
        batch_size: "full" or a per-epoch subset size
        n_jobs: Worker count (defaults to ZQVAE_THREADS)
        progress: Show a tqdm bar over seeds

    Returns:
        One SeedResult per seed, in cfg.seeds order
    """
    n_jobs = thread_limit() if n_jobs is None else n_jobs
    seeds = list(cfg.seeds)
    logger.info(
        "Training %d seed(s), %d parameters each, objective=%s/%s beta=%s mode=%s",
        len(seeds),
        model_spec.n_params,
        objective_spec.recon.value,
        objective_spec.reg.value,
        objective_spec.beta,
        objective_spec.mode.value,
    )
    jobs = (
        delayed(_train_seed)(model_spec, objective_spec, cfg, batch_size, data, seed)
        for seed in tqdm(seeds, desc="seeds", disable=not progress, leave=False)
    )
    return list(Parallel(n_jobs=n_jobs)(jobs))
