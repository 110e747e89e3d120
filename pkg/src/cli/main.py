#!/usr/bin/env python3
"""
zqvae CLI - Quantum Variational Autoencoder Experiments

Usage:
    zqvae gen --kind swiss-roll --n 1000 --seed 7 --out data/roll/      # Dataset bundle
    zqvae train --config config/config.yaml --out runs/roll/           # Train + evaluate
    zqvae train --config config/config.yaml --out runs/beta/ \\
        --sweep beta=0:3.5:0.5                                         # β sweep
    zqvae check --trials 5000 --seed 1                                 # Property suites
    zqvae report runs/beta/ --out reports/beta/                        # Summary tables
    zqvae version                                                      # Show version

Exit Codes:
    0  success
    1  validation error (bad config, bad input data)
    2  runtime error (optimizer failure, I/O)
    3  property-suite failure
"""

import json
import logging
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Optional, Tuple

import click
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from data.dataset import save_bundle
from ml.pipeline import load_dataset, run_experiment, run_sweep
from scoring.report import build_report, save_report
from utils.config import ConfigError, RunConfig
from utils.file_utils import write_json
from utils.logger import setup_logger
from verification.suites import PropertyChecker

VERSION = "0.1.0"

EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_CHECK_FAILED = 3

console = Console()


@contextmanager
def exit_on_error(config_path: Optional[str] = None):
    """Map exceptions to exit codes and print them."""
    where = f" [dim]({config_path})[/dim]" if config_path else ""
    try:
        yield
    except (ValueError, FileNotFoundError) as e:
        console.print(f"[red]Error:[/red] {e}{where}")
        sys.exit(EXIT_VALIDATION)
    except (RuntimeError, OSError) as e:
        console.print(f"[red]Runtime error:[/red] {e}{where}")
        sys.exit(EXIT_RUNTIME)


def load_config(config_path: Optional[str]) -> RunConfig:
    return RunConfig.from_yaml(config_path) if config_path else RunConfig()


@click.group()
@click.version_option(version=VERSION, prog_name="zqvae")
@click.option("--verbose", "-v", is_flag=True, help="Show debug logging")
def cli(verbose: bool):
    """
    zqvae: density-matrix simulator and trainer for quantum variational
    autoencoders with divergence-based latent regularization.
    """
    setup_logger(None, level=logging.DEBUG if verbose else logging.INFO)


@cli.command()
@click.option("--config", "config_path", type=click.Path(), help="Run config (YAML/JSON) with a data block")
@click.option("--kind", type=click.Choice(["swiss-roll", "synthetic-quantum", "csv"]), help="Dataset generator")
@click.option("--n", type=int, help="Number of points")
@click.option("--seed", type=int, help="Generator and split seed")
@click.option("--path", "source", type=click.Path(), help="CSV file (kind=csv)")
@click.option("--label-column", help="CSV label column (kind=csv)")
@click.option("--out", required=True, type=click.Path(), help="Bundle output directory")
def gen(
    config_path: Optional[str],
    kind: Optional[str],
    n: Optional[int],
    seed: Optional[int],
    source: Optional[str],
    label_column: Optional[str],
    out: str,
):
    """
    Generate a dataset bundle.

    Example:
        zqvae gen --kind synthetic-quantum --n 1000 --out data/sq/
    """
    with exit_on_error(config_path):
        cfg = load_config(config_path)
        # path before kind: a csv kind is rejected without a path
        overrides = {
            "data.path": source,
            "data.label_column": label_column,
            "data.n": n,
            "data.kind": kind,
        }
        if seed is not None:
            cfg = cfg.apply_override("seed", seed).apply_override("data.seed", seed)
        for key, value in overrides.items():
            if value is not None:
                cfg = cfg.apply_override(key, value)
        if cfg.data.kind == "bundle":
            raise ConfigError("gen cannot produce a bundle from data.kind=bundle")

        dataset = load_dataset(cfg.data)
        path = save_bundle(dataset, out)

    console.print(Panel.fit(
        f"[bold cyan]{cfg.data.kind}[/bold cyan] dataset\n"
        f"{dataset.n_points} states on {dataset.n_qubits} qubit(s), "
        f"labels: {'yes' if dataset.has_labels else 'no'}\n"
        f"[dim]{path}[/dim]",
        border_style="cyan",
    ))


@cli.command()
@click.option("--config", "config_path", type=click.Path(), help="Run config (YAML/JSON)")
@click.option("--out", required=True, type=click.Path(), help="Run directory")
@click.option("--sweep", "sweeps", multiple=True, help="key=start:stop:step or key=v1,v2 (repeatable)")
@click.option("--mode", type=click.Choice(["instance", "global"]), help="Override objective.mode")
@click.option("--seed", type=int, help="Override the run seed")
@click.option("--progress/--no-progress", default=False, help="Show a progress bar over seeds")
def train(
    config_path: Optional[str],
    out: str,
    sweeps: Tuple[str, ...],
    mode: Optional[str],
    seed: Optional[int],
    progress: bool,
):
    """
    Train the autoencoder for every configured seed and evaluate it.

    Example:
        zqvae train --config config/synthetic_quantum.yaml --out runs/sq/
    """
    with exit_on_error(config_path):
        cfg = load_config(config_path)
        if seed is not None:
            cfg = cfg.apply_override("seed", seed)
        if mode is not None:
            cfg = cfg.apply_override("objective.mode", mode)

        console.print(Panel.fit("[bold cyan]zqvae[/bold cyan] Training", border_style="cyan"))
        console.print(f"[cyan]Data:[/cyan] {cfg.data.kind}  [cyan]Seeds:[/cyan] {cfg.train.seeds}")
        console.print(
            f"[cyan]Objective:[/cyan] {cfg.objective.recon} + β·{cfg.objective.reg} "
            f"({cfg.objective.mode}), β={cfg.objective.beta}\n"
        )
        if sweeps:
            results = run_sweep(cfg, out, sweeps, progress=progress)
        else:
            results = {Path(out).name: run_experiment(cfg, out, progress=progress)}

    display_runs(results)


@cli.command()
@click.option("--trials", type=int, help="Trials per suite (suite defaults otherwise)")
@click.option("--seed", type=int, default=0, show_default=True, help="Suite seed")
@click.option(
    "--suite",
    "suites",
    multiple=True,
    type=click.Choice(list(PropertyChecker.SUITES)),
    help="Run only these suites (repeatable)",
)
@click.option("--json", "json_output", is_flag=True, help="Print the report as JSON")
@click.option("--out", type=click.Path(), help="Also write the report JSON here")
@click.option("--inject-fault", is_flag=True, hidden=True)
def check(
    trials: Optional[int],
    seed: int,
    suites: Tuple[str, ...],
    json_output: bool,
    out: Optional[str],
    inject_fault: bool,
):
    """
    Run the property suites (CPTP, ELBO bound, global/instance
    equivalence, divergence axioms).

    Example:
        zqvae check --trials 5000 --seed 1
    """
    with exit_on_error():
        report = PropertyChecker(seed=seed, trials=trials, inject_fault=inject_fault).run(suites or None)
        if out:
            write_json(out, report.to_dict())

    if json_output:
        print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    else:
        table = Table(title=f"Property suites (seed {seed})")
        table.add_column("Suite", style="cyan")
        table.add_column("Status")
        table.add_column("Trials", justify="right")
        table.add_column("Failures", justify="right")
        for suite in report.suites:
            color = "green" if suite.passed else "red"
            table.add_row(
                suite.name,
                f"[{color}]{suite.status.value}[/{color}]",
                str(suite.trials),
                str(suite.failures),
            )
        console.print(table)
    if not report.passed:
        sys.exit(EXIT_CHECK_FAILED)


@cli.command()
@click.argument("run_dirs", nargs=-1, required=True, type=click.Path())
@click.option("--out", default="report/", show_default=True, type=click.Path(), help="Output directory")
def report(run_dirs: Tuple[str, ...], out: str):
    """
    Aggregate run directories into summary.csv, summary.json and bloch.csv.

    Example:
        zqvae report runs/beta/ --out reports/beta/
    """
    with exit_on_error():
        tables = build_report(run_dirs)
        paths = save_report(tables, out)
    summary = tables["summary"]

    table = Table(title="Runs")
    for column in ("run", "n_aux_encoder", "n_layers", "beta", "recon", "reg", "f_mean", "l_mean", "r_mean"):
        table.add_column(column)
    for row in summary.to_dict(orient="records"):
        table.add_row(*(_fmt(row[c]) for c in ("run", "n_aux_encoder", "n_layers", "beta", "recon", "reg",
                                                  "f_mean", "l_mean", "r_mean")))
    console.print(table)
    for name, path in paths.items():
        console.print(f"[dim]{name}:[/dim] {path}")


@cli.command()
def version():
    """Show zqvae version and dependencies."""
    console.print(f"[bold cyan]zqvae[/bold cyan] v{VERSION}")
    console.print("Quantum variational autoencoder simulator and trainer\n")

    console.print("[dim]Dependencies:[/dim]")
    console.print("  - numpy / scipy (density matrices, COBYLA)")
    console.print("  - scikit-learn (precomputed-kernel SVC, metrics)")
    console.print("  - joblib (parallel seeds)")


def _fmt(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return "-" if value != value else f"{value:.4g}"
    return str(value)


def display_runs(results: dict):
    """
    Display f / l / r of finished runs.

    Args:
        results: Run name -> metrics payload
    """
    table = Table(title="Results (mean ± std over seeds)")
    table.add_column("Run", style="cyan")
    for name in ("f", "l", "r", "i"):
        table.add_column(name, justify="right")
    for run, payload in results.items():
        summary = payload["summary"]
        cells = []
        for key in ("f", "l", "r"):
            stat = summary[key]
            cells.append(f"{stat['mean']:.3f} ± {stat['std']:.3f}" if stat else "-")
        cells.append(_fmt(summary["i"]))
        table.add_row(run, *cells)
    console.print(table)


if __name__ == '__main__':
    cli()
