"""Chain files: sample a disordered chain to disk and inspect its normal modes."""

from __future__ import annotations

from pathlib import Path

import click
from rich.table import Table

from chainhydro.domain.models.chain import ChainModelError, MassLaw, MassLawKind
from chainhydro.services.chain_model import load_chain, sample_masses, save_chain
from chainhydro.services.spectral import SpectralService

from .context import get_cli_context
from .experiments import EXIT_CONFIG


@click.group()
def chain() -> None:
    """Sample and inspect single chains."""


@chain.command(name="sample")
@click.option("--n", "n", type=click.IntRange(min=2), required=True, help="Number of particles.")
@click.option("--seed", type=click.IntRange(min=0, max=2**64 - 1), default=0, show_default=True)
@click.option(
    "--law",
    type=click.Choice([kind.value for kind in MassLawKind], case_sensitive=False),
    default=MassLawKind.SCALED_BETA.value,
    show_default=True,
)
@click.option("--lower", type=float, default=1.0, show_default=True, help="Lower mass bound.")
@click.option("--upper", type=float, default=2.0, show_default=True, help="Upper mass bound.")
@click.option(
    "--out",
    "out_path",
    type=click.Path(dir_okay=False, path_type=Path),
    required=True,
    help="Target chain file.",
)
@click.pass_context
def sample_cmd(
    ctx: click.Context, n: int, seed: int, law: str, lower: float, upper: float, out_path: Path
) -> None:
    """Draw the masses of one chain and write them to OUT."""
    cli_context = get_cli_context(ctx)
    try:
        mass_law = MassLaw(kind=MassLawKind.from_string(law), lower=lower, upper=upper)
        sampled = sample_masses(n, mass_law, seed)
    except ChainModelError as exc:
        cli_context.err_console.print(f"[red]{exc}[/red]")
        ctx.exit(EXIT_CONFIG)
        return
    save_chain(sampled, out_path)
    cli_context.console.print(
        f"Wrote chain n={n} seed={seed} ({mass_law.describe()}) to {out_path}"
    )


@chain.command(name="modes")
@click.argument("chain_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--show", type=click.IntRange(min=1), default=8, show_default=True)
@click.pass_context
def modes_cmd(ctx: click.Context, chain_path: Path, show: int) -> None:
    """Print the lowest and highest frequencies of a stored chain."""
    cli_context = get_cli_context(ctx)
    try:
        stored = load_chain(chain_path)
    except ChainModelError as exc:
        cli_context.err_console.print(f"[red]{exc}[/red]")
        ctx.exit(EXIT_CONFIG)
        return
    spec = SpectralService().spectrum(stored)
    table = Table(title=f"Normal modes of n={stored.n}, seed={stored.seed}")
    table.add_column("k", justify="right")
    table.add_column("omega", justify="right")
    indices = sorted(set(range(min(show, stored.n))) | set(range(max(0, stored.n - show), stored.n)))
    for k in indices:
        table.add_row(str(k), f"{spec.omega[k]:.12g}")
    cli_context.console.print(table)
    if spec.degenerate_modes:
        cli_context.console.print(
            f"[yellow]{len(spec.degenerate_modes)} near-degenerate mode(s)[/yellow]"
        )


__all__ = ["chain"]
