"""
File Utilities

Helpers for run-directory artifacts. JSON is written with sorted keys
and a trailing newline so repeated runs produce identical bytes.
"""

import json
from pathlib import Path
from typing import Any, List, Union

import numpy as np


def _default(obj: Any):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def ensure_dir(path: Union[str, Path]) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_json(path: Union[str, Path], data: Any) -> Path:
    """
    Write deterministic JSON.

    Args:
        path: Output file (parents are created)
        data: JSON-serializable object; numpy scalars and arrays are converted

    Returns:
        The written path
    """
    path = Path(path)
    ensure_dir(path.parent)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, sort_keys=True, default=_default)
        f.write("\n")
    return path


def read_json(path: Union[str, Path]) -> Any:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def write_text(path: Union[str, Path], text: str) -> Path:
    path = Path(path)
    ensure_dir(path.parent)
    path.write_text(text, encoding="utf-8")
    return path


def find_run_dirs(directory: Union[str, Path], recursive: bool = True) -> List[Path]:
    """
    Find completed run directories (those holding a metrics.json and a
    config.resolved.json).

    Args:
        directory: Directory to search; may itself be a run directory
        recursive: Whether to search subdirectories

    Returns:
        Sorted list of run directory paths
    """
    directory = Path(directory)
    pattern = "**/config.resolved.json" if recursive else "*/config.resolved.json"
    found = {p.parent for p in directory.glob(pattern) if (p.parent / "metrics.json").exists()}
    if (directory / "config.resolved.json").exists() and (directory / "metrics.json").exists():
        found.add(directory)
    return sorted(found)
