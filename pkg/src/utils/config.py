"""
Configuration Module

Run configuration for zeta-qvae.

A run config is a YAML (or JSON) document with the blocks

    data, model, objective, train, qsvc, report

plus a top-level `seed`. Every block maps onto a dataclass; missing
fields take their defaults and the fully resolved config is what gets
written to `config.resolved.json`, so a run directory never depends on
hidden defaults.

The raw document is checked against a JSON Schema before any dataclass
is built, and every problem surfaces as ConfigError.
"""

import copy
import math
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import jsonschema
import numpy as np
import yaml
from dotenv import load_dotenv

from ml.optimizer import TrainConfig

THREADS_ENV = "ZQVAE_THREADS"
DATA_KINDS = ("swiss-roll", "synthetic-quantum", "csv", "bundle")
BLOCKS = ("data", "model", "objective", "train", "qsvc", "report")


class ConfigError(ValueError):
    """Invalid run configuration."""


@dataclass
class DataConfig:
    """
    Dataset source.

    Attributes:
        kind: swiss-roll, synthetic-quantum, csv or bundle
        n: Number of generated points
        seed: Generator / split seed (defaults to the run seed)
        noise_dims: Swiss-roll extra Gaussian coordinates
        noise_sd: Swiss-roll noise standard deviation
        path: CSV file or bundle directory
        label_column: CSV label column
        n_qubits: CSV register size (smallest fit by default)
        ratio: Training fraction of the split
        stratify: Preserve class balance in the split
        balance: Downsample the CSV majority class
        r_min, r_max: Synthetic-quantum Bloch-shell bounds
        theta_mean, theta_sd: Synthetic-quantum controlled-rotation angle
    """

    kind: str = "swiss-roll"
    n: int = 1000
    seed: Optional[int] = None
    noise_dims: int = 5
    noise_sd: float = 0.2
    path: Optional[str] = None
    label_column: Optional[str] = None
    n_qubits: Optional[int] = None
    ratio: float = 0.7
    stratify: bool = True
    balance: bool = True
    r_min: float = 0.6
    r_max: float = 0.7
    theta_mean: float = math.pi / 2
    theta_sd: float = math.pi / 20


@dataclass
class ModelConfig:
    """Autoencoder architecture; n_x defaults to the dataset register size."""

    n_x: Optional[int] = None
    n_z: int = 1
    n_aux_encoder: int = 0
    n_aux_decoder: int = 0
    n_layers: int = 3
    tied: bool = False


@dataclass
class ObjectiveConfig:
    recon: str = "fidelity"
    reg: str = "jsd"
    beta: float = 0.0
    mode: str = "instance"
    batch_size: Union[str, int] = "full"


@dataclass
class QsvcConfig:
    n_layers: int = 3
    scaling: str = "none"
    c_reg: float = 1.0
    seed: Optional[int] = None
    export_kernels: bool = False


@dataclass
class ReportConfig:
    bloch_dump: bool = True


_NULLABLE_INT = {"type": ["integer", "null"]}
_NUMBER = {"type": "number"}

SCHEMA: Dict[str, Any] = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "seed": {"type": "integer", "minimum": 0},
        "data": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": list(DATA_KINDS)},
                "n": {"type": "integer", "minimum": 1},
                "seed": _NULLABLE_INT,
                "noise_dims": {"type": "integer", "minimum": 0},
                "noise_sd": {"type": "number", "minimum": 0},
                "path": {"type": ["string", "null"]},
                "label_column": {"type": ["string", "null"]},
                "n_qubits": _NULLABLE_INT,
                "ratio": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "stratify": {"type": "boolean"},
                "balance": {"type": "boolean"},
                "r_min": {"type": "number", "minimum": 0, "maximum": 1},
                "r_max": {"type": "number", "minimum": 0, "maximum": 1},
                "theta_mean": _NUMBER,
                "theta_sd": {"type": "number", "minimum": 0},
            },
        },
        "model": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n_x": _NULLABLE_INT,
                "n_z": {"type": "integer", "minimum": 1},
                "n_aux_encoder": {"type": "integer", "minimum": 0},
                "n_aux_decoder": {"type": "integer", "minimum": 0},
                "n_layers": {"type": "integer", "minimum": 1},
                "tied": {"type": "boolean"},
            },
        },
        "objective": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "recon": {"enum": ["fidelity", "kld", "jsd", "wasserstein"]},
                "reg": {"enum": ["fidelity", "kld", "jsd"]},
                "beta": _NUMBER,
                "mode": {"enum": ["instance", "global"]},
                "batch_size": {"oneOf": [{"const": "full"}, {"type": "integer", "minimum": 1}]},
            },
        },
        "train": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "epochs": {"type": "integer", "minimum": 1},
                "patience": {"type": "integer", "minimum": 1},
                "seeds": {"type": "array", "items": {"type": "integer"}, "minItems": 1},
                "rho_begin": {"type": "number", "exclusiveMinimum": 0},
                "rho_end": {"type": "number", "exclusiveMinimum": 0},
                "max_fun_per_epoch": {"type": "integer", "minimum": 1},
            },
        },
        "qsvc": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n_layers": {"type": "integer", "minimum": 1},
                "scaling": {"enum": ["none", "tan"]},
                "c_reg": {"type": "number", "exclusiveMinimum": 0},
                "seed": _NULLABLE_INT,
                "export_kernels": {"type": "boolean"},
            },
        },
        "report": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"bloch_dump": {"type": "boolean"}},
        },
    },
}


@dataclass
class RunConfig:
    """
    Complete configuration of one run.

    Usage:
        cfg = RunConfig.from_yaml("config/config.yaml")
        cfg = cfg.apply_override("beta", 0.5)
    """

    seed: int = 0
    data: DataConfig = field(default_factory=DataConfig)
    model: ModelConfig = field(default_factory=ModelConfig)
    objective: ObjectiveConfig = field(default_factory=ObjectiveConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    qsvc: QsvcConfig = field(default_factory=QsvcConfig)
    report: ReportConfig = field(default_factory=ReportConfig)

    def __post_init__(self):
        if self.data.seed is None:
            self.data.seed = self.seed
        if self.qsvc.seed is None:
            self.qsvc.seed = self.seed
        if self.data.kind in ("csv", "bundle") and not self.data.path:
            raise ConfigError(f"data.path is required for data.kind={self.data.kind}")
        if self.data.r_min > self.data.r_max:
            raise ConfigError(f"data.r_min ({self.data.r_min}) exceeds data.r_max ({self.data.r_max})")

    @classmethod
    def from_dict(cls, data: Optional[Dict]) -> "RunConfig":
        """
        Validate a raw config document and build the dataclasses.

        Raises:
            ConfigError: On schema violations or inconsistent values
        """
        data = copy.deepcopy(data) if data else {}
        if not isinstance(data, dict):
            raise ConfigError(f"Config must be a mapping, got {type(data).__name__}")
        try:
            jsonschema.validate(data, SCHEMA)
        except jsonschema.ValidationError as exc:
            where = ".".join(str(p) for p in exc.absolute_path) or "<root>"
            raise ConfigError(f"{where}: {exc.message}") from None
        try:
            return cls(
                seed=data.get("seed", 0),
                data=DataConfig(**data.get("data", {})),
                model=ModelConfig(**data.get("model", {})),
                objective=ObjectiveConfig(**data.get("objective", {})),
                train=TrainConfig(**data.get("train", {})),
                qsvc=QsvcConfig(**data.get("qsvc", {})),
                report=ReportConfig(**data.get("report", {})),
            )
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_yaml(cls, config_path: Union[str, Path]) -> "RunConfig":
        """
        Load configuration from a YAML or JSON file.

        Args:
            config_path: Path to the config file

        Returns:
            RunConfig instance
        """
        path = Path(config_path)
        if not path.exists():
            raise ConfigError(f"Config file not found: {path}")
        with open(path, "r", encoding="utf-8") as f:
            try:
                data = yaml.safe_load(f)
            except yaml.YAMLError as exc:
                raise ConfigError(f"{path}: {exc}") from None
        return cls.from_dict(data)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "data": asdict(self.data),
            "model": asdict(self.model),
            "objective": asdict(self.objective),
            "train": self.train.to_dict(),
            "qsvc": asdict(self.qsvc),
            "report": asdict(self.report),
        }

    def save_yaml(self, output_path: Union[str, Path]) -> None:
        with open(output_path, "w", encoding="utf-8") as f:
            yaml.safe_dump(self.to_dict(), f, default_flow_style=False, sort_keys=False)

    def apply_override(self, key: str, value: Any) -> "RunConfig":
        """
        Copy of the config with one field replaced.

        Args:
            key: "block.field", a bare field name that is unique across
                blocks, or "seed"
            value: New value

        Raises:
            ConfigError: On unknown or ambiguous keys and invalid values
        """
        block, name = resolve_key(key)
        raw = self.to_dict()
        if block is not None:
            raw[block][name] = value
            return RunConfig.from_dict(raw)
        raw[name] = value
        # block seeds that followed the run seed keep following it
        if name == "seed":
            for sub in ("data", "qsvc"):
                if raw[sub]["seed"] == self.seed:
                    raw[sub]["seed"] = None
        return RunConfig.from_dict(raw)


def _block_fields() -> Dict[str, List[str]]:
    return {
        "data": list(asdict(DataConfig()).keys()),
        "model": list(asdict(ModelConfig()).keys()),
        "objective": list(asdict(ObjectiveConfig()).keys()),
        "train": list(TrainConfig().to_dict().keys()),
        "qsvc": list(asdict(QsvcConfig()).keys()),
        "report": list(asdict(ReportConfig()).keys()),
    }


def resolve_key(key: str) -> Tuple[Optional[str], str]:
    """
    Resolve an override key to (block, field); block is None for "seed".

    Raises:
        ConfigError: On unknown or ambiguous keys
    """
    fields = _block_fields()
    if key == "seed":
        return None, "seed"
    if "." in key:
        block, name = key.split(".", 1)
        if block not in fields or name not in fields[block]:
            raise ConfigError(f"Unknown config key '{key}'")
        return block, name
    owners = [block for block, names in fields.items() if key in names]
    if not owners:
        raise ConfigError(f"Unknown config key '{key}'")
    if len(owners) > 1:
        raise ConfigError(f"Config key '{key}' is ambiguous; use one of {[f'{b}.{key}' for b in owners]}")
    return owners[0], key


def _scalar(text: str) -> Any:
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError:
        return text


def parse_sweep(expr: str) -> Tuple[str, List[Any]]:
    """
    Parse a sweep expression.

    Forms:
        key=start:stop:step   inclusive numeric range
        key=v1,v2,...         explicit values

    Returns:
        (key, values)

    Raises:
        ConfigError: On malformed expressions or a non-positive step
    """
    if "=" not in expr:
        raise ConfigError(f"Sweep '{expr}' must look like key=start:stop:step or key=v1,v2")
    key, spec = (part.strip() for part in expr.split("=", 1))
    if not key or not spec:
        raise ConfigError(f"Sweep '{expr}' has an empty key or value list")
    resolve_key(key)

    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ConfigError(f"Range sweep '{spec}' must be start:stop:step")
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError:
            raise ConfigError(f"Range sweep '{spec}' has non-numeric bounds") from None
        if step <= 0:
            raise ConfigError(f"Sweep step must be positive, got {step}")
        if stop < start:
            raise ConfigError(f"Sweep stop {stop} is below start {start}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        values = [round(start + k * step, 12) for k in range(count)]
        if all(float(p).is_integer() and "." not in p for p in parts):
            values = [int(v) for v in values]
        return key, values

    values = [_scalar(v.strip()) for v in spec.split(",") if v.strip()]
    if not values:
        raise ConfigError(f"Sweep '{expr}' has no values")
    return key, values


def sweep_label(key: str, value: Any) -> str:
    """Directory name of one sweep point, `<field>=<value>`."""
    name = key.split(".")[-1]
    if isinstance(value, float):
        text = np.format_float_positional(value, trim="-")
    else:
        text = str(value)
    return f"{name}={text}"


def thread_limit() -> int:
    """
    Worker cap from ZQVAE_THREADS (a .env file is honored); default 1.

    Raises:
        ConfigError: If the variable is not a positive integer
    """
    load_dotenv(override=False)
    raw = os.environ.get(THREADS_ENV, "1").strip()
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {value}")
    return value


DEFAULT_CONFIG = RunConfig()
