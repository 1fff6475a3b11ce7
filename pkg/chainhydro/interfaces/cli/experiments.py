"""Experiment subcommands.

Every experiment kind gets one subcommand with the same options. A config
file supplies the full parameter set; the flags override a handful of keys.

Exit codes: 0 success, 1 configuration error, 2 numerical failure or failed
cells, 3 acceptance failure (only with ``--check``).
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Callable

import click
from rich.console import Console
from rich.table import Table

from chainhydro.app import ConfigError, apply_overrides, load_config
from chainhydro.domain.models.chain import ChainModelError
from chainhydro.domain.models.results import ConvergenceReport
from chainhydro.services.experiments import ExperimentKind, ExperimentRunner, write_run

from .context import get_cli_context

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_ACCEPTANCE = 3

MAX_TABLE_ROWS = 40


def _csv_list(cast: Callable[[str], Any]) -> Callable[[click.Context, click.Parameter, str | None], Any]:
    def parse(ctx: click.Context, param: click.Parameter, value: str | None) -> list[Any] | None:
        if value is None:
            return None
        try:
            return [cast(item.strip()) for item in value.split(",") if item.strip()]
        except ValueError as exc:
            raise click.BadParameter(f"expected a comma-separated list: {exc}") from exc

    return parse


def _experiment_options(func: Callable[..., Any]) -> Callable[..., Any]:
    options = [
        click.option(
            "--config",
            "config_path",
            type=click.Path(exists=True, dir_okay=False, path_type=Path),
            default=None,
            help="YAML or JSON experiment file. Omitted keys take their defaults.",
        ),
        click.option(
            "--out",
            "out_dir",
            type=click.Path(file_okay=False, path_type=Path),
            default=None,
            help="Output directory (overrides output_dir).",
        ),
        click.option("--threads", type=click.IntRange(min=1), default=None, help="Worker threads."),
        click.option(
            "--seed-base",
            type=click.IntRange(min=0, max=2**64 - 1),
            default=None,
            help="First disorder seed.",
        ),
        click.option(
            "--seeds",
            "seed_count",
            type=click.IntRange(min=1),
            default=None,
            help="Number of consecutive disorder seeds.",
        ),
        click.option("--n", "n_list", callback=_csv_list(int), help="Chain sizes, e.g. 256,512."),
        click.option("--t", "times", callback=_csv_list(float), help="Macroscopic times, e.g. 0.25,0.5."),
        click.option(
            "--check",
            is_flag=True,
            default=False,
            help="Exit with code 3 when an acceptance criterion fails.",
        ),
        click.option(
            "--json-output",
            is_flag=True,
            default=False,
            help="Print the JSON summary instead of tables.",
        ),
        click.option(
            "--no-plots",
            is_flag=True,
            default=False,
            help="Skip SVG plots for this run.",
        ),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _fits_table(report: ConvergenceReport) -> Table:
    table = Table(title=f"{report.experiment} trends")
    table.add_column("metric")
    table.add_column("values", justify="right")
    table.add_column("slope", justify="right")
    table.add_column("first/last", justify="right")
    table.add_column("pass", justify="center")
    for key, fit in list(sorted(report.fits.items()))[:MAX_TABLE_ROWS]:
        table.add_row(
            key,
            " ".join(f"{v:.3e}" for v in fit.values),
            f"{fit.slope:.3f}",
            f"{fit.ratio_first_last:.2f}",
            "[green]yes[/green]" if fit.passed else "[red]no[/red]",
        )
    return table


def _acceptance_table(report: ConvergenceReport) -> Table:
    table = Table(title="Acceptance")
    table.add_column("criterion")
    table.add_column("outcome", justify="center")
    for name, passed in sorted(report.acceptance.items()):
        table.add_row(name, "[green]pass[/green]" if passed else "[red]fail[/red]")
    return table


def _render(console: Console, report: ConvergenceReport, written: dict[str, Path]) -> None:
    console.print(
        f"[bold]{report.experiment}[/bold] config {report.config_hash} "
        f"(chainhydro {report.version}): {len(report.rows)} rows"
    )
    if report.fits:
        console.print(_fits_table(report))
    console.print(_acceptance_table(report))
    for failure in report.failures:
        console.print(
            f"[red]cell n={failure.n} seed={failure.seed} failed: "
            f"{failure.error_type}: {failure.message}[/red]"
        )
    if "summary" in written:
        console.print(f"Wrote {len(written)} file(s) to {written['summary'].parent}")


def _exit_code(report: ConvergenceReport, check: bool) -> int:
    if report.failed:
        return EXIT_NUMERICAL
    if check and not report.accepted:
        return EXIT_ACCEPTANCE
    return EXIT_OK


def experiment_command(kind: ExperimentKind) -> click.Command:
    """Build the subcommand that runs experiments of ``kind``."""

    @click.command(name=kind.value)
    @_experiment_options
    @click.pass_context
    def command(
        ctx: click.Context,
        config_path: Path | None,
        out_dir: Path | None,
        threads: int | None,
        seed_base: int | None,
        seed_count: int | None,
        n_list: list[int] | None,
        times: list[float] | None,
        check: bool,
        json_output: bool,
        no_plots: bool,
    ) -> None:
        cli_context = get_cli_context(ctx)
        console, err = cli_context.console, cli_context.err_console
        try:
            config = load_config(config_path, experiment=kind.value)
            config = apply_overrides(
                config,
                output_dir=out_dir,
                threads=threads,
                seed_base=seed_base,
                seed_count=seed_count,
                n_list=n_list,
                times=times,
            )
            result = ExperimentRunner(config).run()
        except (ConfigError, ChainModelError) as exc:
            err.print(f"[red]Configuration error: {exc}[/red]")
            ctx.exit(EXIT_CONFIG)
            return
        except ArithmeticError as exc:
            err.print(f"[red]Numerical failure: {exc}[/red]")
            ctx.exit(EXIT_NUMERICAL)
            return

        written = write_run(result, config.output_dir, plots=config.plots and not no_plots)
        report = result.report
        if json_output:
            click.echo(json.dumps(report.summary(), indent=2, sort_keys=True, default=str))
        else:
            _render(console, report, written)
        ctx.exit(_exit_code(report, check))

    command.help = f"Run the {kind.value} experiment."
    return command


EXPERIMENT_COMMANDS = [experiment_command(kind) for kind in ExperimentKind]

__all__ = [
    "EXIT_ACCEPTANCE",
    "EXIT_CONFIG",
    "EXIT_NUMERICAL",
    "EXIT_OK",
    "EXPERIMENT_COMMANDS",
    "experiment_command",
]
