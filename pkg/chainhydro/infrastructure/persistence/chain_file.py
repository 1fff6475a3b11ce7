"""Plain-text chain files.

Layout::

    # chainhydro chain v1
    n 4
    law scaled-beta 1.0 2.0 2.0 2.0
    seed 7
    mean_mass 1.5
    1.2345678901234567
    ...

Masses are written with 17 significant digits, which round-trips IEEE
doubles exactly.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from chainhydro.domain.models.chain import (
    ChainModelError,
    DisorderedChain,
    MassLaw,
    MassLawKind,
)
from chainhydro.infrastructure.observability import get_logger

logger = get_logger(__name__)

HEADER = "# chainhydro chain v1"


def format_chain(chain: DisorderedChain) -> str:
    lines = [
        HEADER,
        f"n {chain.n}",
        f"law {chain.mass_law.describe()}",
        f"seed {chain.seed}",
        f"mean_mass {chain.mean_mass:.17g}",
    ]
    lines.extend(f"{mass:.17g}" for mass in chain.masses)
    return "\n".join(lines) + "\n"


def write_chain(chain: DisorderedChain, path: str | Path) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(format_chain(chain), encoding="utf-8", newline="\n")
    logger.debug("Wrote chain n=%d seed=%d to %s", chain.n, chain.seed, target)
    return target


def parse_chain(text: str) -> DisorderedChain:
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines or lines[0] != HEADER:
        raise ChainModelError("Not a chainhydro chain file (missing header)")
    header: dict[str, list[str]] = {}
    body_start = 1
    for body_start, line in enumerate(lines[1:], start=1):
        key, _, rest = line.partition(" ")
        if key not in ("n", "law", "seed", "mean_mass"):
            break
        header[key] = rest.split()
    else:
        body_start = len(lines)
    missing = {"n", "law", "seed"} - header.keys()
    if missing:
        raise ChainModelError(f"Chain file header lacks {sorted(missing)}")
    kind, lower, upper, a, b = header["law"]
    law = MassLaw(
        kind=MassLawKind.from_string(kind),
        lower=float(lower),
        upper=float(upper),
        a=float(a),
        b=float(b),
    )
    masses = np.array([float(v) for v in lines[body_start:]], dtype=np.float64)
    mean_mass = float(header["mean_mass"][0]) if "mean_mass" in header else law.mean
    return DisorderedChain(
        n=int(header["n"][0]),
        masses=masses,
        mean_mass=mean_mass,
        seed=int(header["seed"][0]),
        mass_law=law,
    )


def read_chain(path: str | Path) -> DisorderedChain:
    return parse_chain(Path(path).read_text(encoding="utf-8"))


__all__ = ["HEADER", "format_chain", "parse_chain", "read_chain", "write_chain"]
