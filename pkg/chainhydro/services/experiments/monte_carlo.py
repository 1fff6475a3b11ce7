"""Sampled trajectories against the exactly evolved Gaussian moments.

Replicas are drawn from the classical local Gibbs state, evolved with the
exact normal-mode map and compared, pair by pair, with the propagated
means and covariance blocks of both fields. Every statistic is turned into a
z-score (empirical − exact)/(σ/√N); the pair ladder and the replica streams
are fixed by the config hash and the chain seed.
"""

from __future__ import annotations

from concurrent.futures import Executor
from dataclasses import dataclass, field

import numpy as np
from numpy.random import SeedSequence, default_rng

from chainhydro.domain.models.results import ConvergenceReport
from chainhydro.domain.models.state import GaussianChainState

from ..classical_state import local_gibbs_moments, replica_generator, sample_state
from ..dynamics import CovariancePropagator, EvolutionMap, evolve_sample
from .base import Cell, CellOutcome, Pipeline, RunArtifacts


@dataclass
class MomentAccumulator:
    """Running first and second moments of per-replica statistics.

    Each statistic is a vector over the pair ladder; values are summed in
    float64 batch by batch.
    """

    size: int
    count: int = 0
    total: dict[str, np.ndarray] = field(default_factory=dict)
    squares: dict[str, np.ndarray] = field(default_factory=dict)

    def add(self, name: str, samples: np.ndarray) -> None:
        """``samples`` has shape (pairs, replicas)."""
        if name not in self.total:
            self.total[name] = np.zeros(self.size)
            self.squares[name] = np.zeros(self.size)
        self.total[name] += samples.sum(axis=1)
        self.squares[name] += np.square(samples).sum(axis=1)

    def z_scores(self, name: str, exact: np.ndarray) -> np.ndarray:
        mean = self.total[name] / self.count
        variance = self.squares[name] / self.count - mean**2
        sigma = np.sqrt(np.maximum(variance, 0.0) / self.count)
        gap = mean - exact
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.where(sigma > 0, gap / sigma, np.where(np.abs(gap) > 0, np.inf, 0.0))
        return z


STATISTICS = (
    "mean_z",
    "cov_z",
    "wick_z",
    "odd_z",
    "r_mean_z",
    "r_cov_z",
    "r_odd_z",
    "rp_cov_z",
)


@dataclass(frozen=True)
class PairLadder:
    """Momentum pairs (x, y) and stretch pairs (u, v), one of each per rung.

    The cross statistic pairs stretch u with momentum x.
    """

    xs: np.ndarray
    ys: np.ndarray
    us: np.ndarray
    vs: np.ndarray

    @classmethod
    def draw(cls, n: int, count: int, seed: int) -> "PairLadder":
        xs, ys = random_pairs(n, count, seed)
        us, vs = random_pairs(n - 1, count, seed)
        return cls(xs, ys, us, vs)

    @property
    def size(self) -> int:
        return int(self.xs.size)


def replica_statistics(
    r: np.ndarray, p: np.ndarray, exact: GaussianChainState, ladder: PairLadder
) -> dict[str, np.ndarray]:
    """Per-replica statistics, shape (pairs, replicas), centred on the exact means."""
    dp = p - exact.mean_p[:, None]
    dr = r - exact.mean_r[:, None]
    px, py = dp[ladder.xs], dp[ladder.ys]
    ru, rv = dr[ladder.us], dr[ladder.vs]
    return {
        "mean_z": px,
        "cov_z": px * py,
        "wick_z": px**2 * py**2,
        "odd_z": px**2 * py,
        "r_mean_z": ru,
        "r_cov_z": ru * rv,
        "r_odd_z": ru**2 * rv,
        "rp_cov_z": ru * px,
    }


def exact_statistics(exact: GaussianChainState, ladder: PairLadder) -> dict[str, np.ndarray]:
    """Expected values of :func:`replica_statistics` under ``exact``."""
    xs, ys, us, vs = ladder.xs, ladder.ys, ladder.us, ladder.vs
    c_pp, c_rr = exact.c_pp, exact.c_rr
    cxx, cyy, cxy = c_pp[xs, xs], c_pp[ys, ys], c_pp[xs, ys]
    zeros = np.zeros(ladder.size)
    return {
        "mean_z": zeros,
        "cov_z": cxy,
        "wick_z": cxx * cyy + 2.0 * cxy**2,
        "odd_z": zeros,
        "r_mean_z": zeros,
        "r_cov_z": c_rr[us, vs],
        "r_odd_z": zeros,
        "rp_cov_z": np.real(exact.c_rp[us, xs]),
    }


def random_pairs(n: int, count: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """``count`` ordered site pairs x ≠ y, drawn from a seeded stream."""
    rng = default_rng(SeedSequence(seed, spawn_key=(n,)))
    xs = np.empty(count, dtype=np.intp)
    ys = np.empty(count, dtype=np.intp)
    for i in range(count):
        xs[i], ys[i] = rng.choice(n, size=2, replace=False)
    return xs, ys


class MonteCarloPipeline(Pipeline):
    """Wick identities and vanishing odd moments of the evolved fields."""

    name = "monte-carlo-check"

    def __init__(self, config, spectral) -> None:  # type: ignore[no-untyped-def]
        super().__init__(config, spectral)
        self.experiment_seed = int(config.config_hash(), 16)
        self.times = sorted(set(config.times))

    def _batches(self) -> list[int]:
        full, rest = divmod(self.config.mc_samples, self.config.mc_batch)
        return [self.config.mc_batch] * full + ([rest] if rest else [])

    def run_cell(self, cell: Cell) -> CellOutcome:
        chain = self.chain(cell)
        spec = self.spectral.spectrum(chain)
        state0 = local_gibbs_moments(chain, self.profiles)
        propagator = CovariancePropagator(state0, spec)
        ladder = PairLadder.draw(cell.n, self.config.mc_pairs, self.experiment_seed)
        maps = {t: EvolutionMap.at_macro(spec, t) for t in self.times}
        exact = {t: propagator.state_at_macro(t) for t in self.times}
        sums = {t: MomentAccumulator(ladder.size) for t in self.times}

        for index, size in enumerate(self._batches()):
            rng = replica_generator(self.experiment_seed, cell.seed, index)
            r0, p0 = sample_state(state0, rng, size=size)
            for t in self.times:
                r, p = evolve_sample(r0, p0, maps[t])
                acc = sums[t]
                acc.count += size
                for name, samples in replica_statistics(r, p, exact[t], ladder).items():
                    acc.add(name, samples)

        out = CellOutcome(cell)
        for t in self.times:
            targets = exact_statistics(exact[t], ladder)
            worst = 0.0
            for name in STATISTICS:
                z = np.abs(sums[t].z_scores(name, targets[name]))
                value = float(np.max(z))
                worst = max(worst, value)
                out.rows.append(self.row(cell, name, value, t))
            out.rows.append(self.row(cell, "max_abs_z", worst, t))
            out.rows.append(self.row(cell, "replicas", sums[t].count, t))
        out.payload["pairs"] = [(int(x), int(y)) for x, y in zip(ladder.xs, ladder.ys)]
        out.payload["r_pairs"] = [(int(u), int(v)) for u, v in zip(ladder.us, ladder.vs)]
        self._logger.info(
            "Sampled %d replicas at %d pairs", self.config.mc_samples, self.config.mc_pairs
        )
        return out

    def finalize(
        self, report: ConvergenceReport, outcomes: list[CellOutcome], executor: Executor
    ) -> RunArtifacts:
        report.details["experiment_seed"] = self.experiment_seed
        report.details["pairs"] = {
            f"{o.cell.n}/{o.cell.seed}": o.payload.get("pairs", []) for o in outcomes
        }
        report.details["r_pairs"] = {
            f"{o.cell.n}/{o.cell.seed}": o.payload.get("r_pairs", []) for o in outcomes
        }
        report.details["max_abs_z"] = max(
            (row.value for row in report.rows if row.metric == "max_abs_z"), default=0.0
        )
        return RunArtifacts()


__all__ = [
    "MomentAccumulator",
    "MonteCarloPipeline",
    "PairLadder",
    "exact_statistics",
    "random_pairs",
    "replica_statistics",
]
