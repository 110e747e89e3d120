"""
Derivative-Free Optimizer

COBYLA with epoch restarts and patience-based early stopping.

Each epoch restarts scipy's COBYLA from the incumbent best point with the
trust radius reset to rho_begin. The restart produces the characteristic
upward jumps at the start of every epoch in the loss curve. Training
stops after `epochs` epochs, or earlier once `patience` consecutive
epochs fail to improve the best value by more than IMPROVEMENT_TOL.

Why COBYLA?
- No gradients needed: every objective evaluation is a full density-matrix
  simulation
- Deterministic: identical inputs give identical traces
- Handles the periodic, unconstrained angle space without box bounds
"""

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize as scipy_minimize

logger = logging.getLogger(__name__)

IMPROVEMENT_TOL = 1e-6


class OptimizationError(RuntimeError):
    """Raised when the objective returns a non-finite value."""

    def __init__(self, message: str, trace: "TrainTrace"):
        super().__init__(message)
        self.trace = trace


@dataclass
class TrainConfig:
    """
    Optimizer schedule.

    Attributes:
        epochs: Maximum number of COBYLA restarts
        patience: Epochs without improvement before stopping
        seeds: Random initializations to train
        rho_begin: Initial trust radius (radians)
        rho_end: Final trust radius
        max_fun_per_epoch: Objective evaluations allowed per epoch
    """

    epochs: int = 60
    patience: int = 20
    seeds: List[int] = field(default_factory=lambda: [0, 1, 2, 3, 4])
    rho_begin: float = 0.5
    rho_end: float = 1e-4
    max_fun_per_epoch: int = 250

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if not 1 <= self.patience <= self.epochs:
            raise ValueError(f"patience must be in [1, epochs={self.epochs}], got {self.patience}")
        if not 0 < self.rho_end <= self.rho_begin:
            raise ValueError(
                f"Trust radii must satisfy 0 < rho_end <= rho_begin "
                f"(got rho_end={self.rho_end}, rho_begin={self.rho_begin})"
            )
        if self.max_fun_per_epoch < 1:
            raise ValueError(f"max_fun_per_epoch must be >= 1, got {self.max_fun_per_epoch}")
        if not self.seeds:
            raise ValueError("At least one seed is required")
        self.seeds = [int(s) for s in self.seeds]

    def to_dict(self) -> dict:
        return {
            "epochs": self.epochs,
            "patience": self.patience,
            "seeds": list(self.seeds),
            "rho_begin": self.rho_begin,
            "rho_end": self.rho_end,
            "max_fun_per_epoch": self.max_fun_per_epoch,
        }


@dataclass
class TrainTrace:
    """
    Optimization history.

    Attributes:
        values: Objective value of every evaluation, in order
        eval_epochs: Epoch index of every evaluation
        epoch_best: Best value seen after each epoch (non-increasing)
        best_value: Lowest value observed
        best_params: Parameters achieving best_value
        stop_reason: "epochs", "patience" or "no_parameters"
        components: Optional (recon, reg) pair per evaluation
    """

    values: List[float] = field(default_factory=list)
    eval_epochs: List[int] = field(default_factory=list)
    epoch_best: List[float] = field(default_factory=list)
    best_value: float = math.inf
    best_params: Optional[np.ndarray] = None
    stop_reason: str = ""
    components: List[Tuple[float, float]] = field(default_factory=list)

    @property
    def n_evaluations(self) -> int:
        return len(self.values)

    @property
    def epochs_run(self) -> int:
        return len(self.epoch_best)

    def records(self) -> List[dict]:
        """Line records: one per evaluation, one per epoch, one summary."""
        out = []
        for k, (value, epoch) in enumerate(zip(self.values, self.eval_epochs)):
            record = {"kind": "eval", "step": k, "epoch": epoch, "value": value}
            if k < len(self.components):
                record["recon"], record["reg"] = self.components[k]
            out.append(record)
        for epoch, best in enumerate(self.epoch_best):
            out.append({"kind": "epoch", "epoch": epoch, "best": best})
        out.append(
            {
                "kind": "summary",
                "best_value": self.best_value,
                "best_params": [float(v) for v in np.ravel(self.best_params)]
                if self.best_params is not None
                else [],
                "n_evaluations": self.n_evaluations,
                "epochs_run": self.epochs_run,
                "stop_reason": self.stop_reason,
            }
        )
        return out

    def to_ndjson(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.records())


def minimize(
    objective: Callable[[np.ndarray], float],
    x0: np.ndarray,
    cfg: TrainConfig,
    on_epoch_start: Optional[Callable[[int], None]] = None,
) -> Tuple[np.ndarray, TrainTrace]:
    """
    Minimize a deterministic objective with restarted COBYLA.

    Args:
        objective: Function of the flat parameter vector
        x0: Starting point (evaluated first, as the reference value)
        cfg: Epoch/patience/trust-radius schedule
        on_epoch_start: Called with the epoch index before each epoch

    Returns:
        (x_best, trace). x_best attains the lowest value observed.

    Raises:
        OptimizationError: If the objective returns NaN or infinity
    """
    x0 = np.asarray(x0, dtype=float).ravel().copy()
    trace = TrainTrace(best_params=x0.copy())
    epoch = 0

    def evaluate(x: np.ndarray) -> float:
        value = float(objective(np.asarray(x, dtype=float)))
        if not math.isfinite(value):
            raise OptimizationError(
                f"Objective returned {value} at evaluation {trace.n_evaluations} (epoch {epoch})",
                trace,
            )
        trace.values.append(value)
        trace.eval_epochs.append(epoch)
        if value < trace.best_value:
            trace.best_value = value
            trace.best_params = np.array(x, dtype=float, copy=True)
        return value

    if on_epoch_start is not None:
        on_epoch_start(0)
    evaluate(x0)

    if x0.size == 0:
        trace.epoch_best.append(trace.best_value)
        trace.stop_reason = "no_parameters"
        return trace.best_params, trace

    reference = trace.best_value
    stale = 0
    trace.stop_reason = "epochs"
    for epoch in range(cfg.epochs):
        if on_epoch_start is not None and epoch > 0:
            on_epoch_start(epoch)
        scipy_minimize(
            evaluate,
            trace.best_params.copy(),
            method="COBYLA",
            tol=cfg.rho_end,
            options={"rhobeg": cfg.rho_begin, "maxiter": cfg.max_fun_per_epoch},
        )
        trace.epoch_best.append(trace.best_value)
        if trace.best_value < reference - IMPROVEMENT_TOL:
            reference = trace.best_value
            stale = 0
        else:
            stale += 1
        logger.debug(
            "epoch %d: best=%.10g evaluations=%d stale=%d",
            epoch,
            trace.best_value,
            trace.n_evaluations,
            stale,
        )
        if stale >= cfg.patience:
            trace.stop_reason = "patience"
            break

    return trace.best_params, trace
