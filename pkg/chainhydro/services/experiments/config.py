"""Experiment configuration model.

All keys have defaults, unknown keys are rejected, and the semantic part of
a configuration hashes to a stable 16-digit identifier.
"""

from __future__ import annotations

import hashlib
import json
from enum import Enum
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from chainhydro.domain.models.chain import MassLaw, MassLawKind
from chainhydro.domain.models.profiles import Profiles, TestFunction, get_test_function, make_profiles

SEED_LIMIT = 2**64
NON_SEMANTIC_FIELDS = frozenset({"output_dir", "threads", "spectral_cache", "plots"})


class ExperimentKind(str, Enum):
    SPECTRUM = "spectrum"
    LOCALIZATION = "localization"
    CLASSICAL_HYDRO = "classical-hydro"
    QUANTUM_HYDRO = "quantum-hydro"
    CONVERGENCE_SWEEP = "convergence-sweep"
    EULER_SOLVE = "euler-solve"
    MONTE_CARLO_CHECK = "monte-carlo-check"


class SeedSpec(BaseModel):
    """Either ``count`` consecutive seeds from ``base`` or explicit ``values``."""

    model_config = ConfigDict(extra="forbid")

    base: int = 0
    count: int = Field(default=8, ge=1)
    values: list[int] | None = None

    @field_validator("base")
    @classmethod
    def _base_in_range(cls, value: int) -> int:
        if not 0 <= value < SEED_LIMIT:
            raise ValueError(f"seed base must lie in [0, 2^64), got {value}")
        return value

    @field_validator("values")
    @classmethod
    def _values_in_range(cls, values: list[int] | None) -> list[int] | None:
        if values is None:
            return None
        if not values:
            raise ValueError("explicit seed list is empty")
        for value in values:
            if not 0 <= value < SEED_LIMIT:
                raise ValueError(f"seed {value} outside [0, 2^64)")
        return values

    def resolved(self) -> list[int]:
        if self.values is not None:
            return list(self.values)
        last = self.base + self.count
        if last > SEED_LIMIT:
            raise ValueError("seed range exceeds 2^64")
        return list(range(self.base, last))


class ProfileSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    preset: str = "equilibrium"
    params: dict[str, Any] = Field(default_factory=dict)

    def build(self) -> Profiles:
        return make_profiles(self.preset, self.params)


class MassLawSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: str = MassLawKind.SCALED_BETA.value
    lower: float = 1.0
    upper: float = 2.0
    a: float = 2.0
    b: float = 2.0

    def build(self) -> MassLaw:
        return MassLaw(
            kind=MassLawKind.from_string(self.kind),
            lower=self.lower,
            upper=self.upper,
            a=self.a,
            b=self.b,
        )


class ExperimentConfig(BaseModel):
    """One experiment run: a pipeline, an n-sweep, a seed ensemble and its parameters."""

    model_config = ConfigDict(extra="forbid")

    experiment: ExperimentKind = ExperimentKind.CLASSICAL_HYDRO
    n_list: list[int] = Field(default_factory=lambda: [256, 512])
    seeds: SeedSpec = Field(default_factory=SeedSpec)
    times: list[float] = Field(default_factory=lambda: [0.5])
    horizon: float = Field(default=1.0, gt=0)
    profiles: ProfileSpec = Field(default_factory=ProfileSpec)
    mass_law: MassLawSpec = Field(default_factory=MassLawSpec)
    test_functions: list[str] = Field(default_factory=lambda: ["sine"])

    gamma: float = 0.2
    theta: float = 0.5
    theta_prime: float = 0.7
    alpha: float = 0.25
    delta: float = Field(default=0.05, gt=0)

    mc_samples: int = Field(default=100_000, ge=2)
    mc_batch: int = Field(default=10_000, ge=1)
    mc_pairs: int = Field(default=20, ge=1)
    n_modes: int = Field(default=128, ge=64)
    grid_points: int = Field(default=513, ge=3)
    thermal_seeds: int = Field(default=16, ge=1)
    ladder_bases: int = Field(default=8, ge=1)
    taylor_order: int = Field(default=64, ge=0)
    control: bool = True
    required_ratio: float = Field(default=2.0, gt=0)

    output_dir: Path = Path("results")
    threads: int = Field(default=1, ge=1)
    spectral_cache: Path | None = None
    plots: bool = True

    @field_validator("n_list")
    @classmethod
    def _sizes(cls, values: list[int]) -> list[int]:
        if not values:
            raise ValueError("n_list is empty")
        for n in values:
            if n < 2:
                raise ValueError(f"chain size must be >= 2, got {n}")
        return values

    @field_validator("test_functions")
    @classmethod
    def _known_test_functions(cls, names: list[str]) -> list[str]:
        for name in names:
            get_test_function(name)
        return names

    @model_validator(mode="after")
    def _check_consistency(self) -> "ExperimentConfig":
        if not 0.0 < 2.0 * self.gamma < self.theta < self.theta_prime < 1.0:
            raise ValueError(
                "proof parameters must satisfy 0 < 2·gamma < theta < theta_prime < 1 "
                f"(gamma={self.gamma}, theta={self.theta}, theta_prime={self.theta_prime})"
            )
        if not 0.0 < self.alpha < 0.5:
            raise ValueError(f"alpha must lie in (0, 1/2), got {self.alpha}")
        for t in self.times:
            if not 0.0 <= t <= self.horizon:
                raise ValueError(f"time {t} outside [0, {self.horizon}]")
        self.profiles.build()
        self.mass_law.build()
        return self

    # ------------------------------------------------------------------

    @property
    def seed_list(self) -> list[int]:
        return self.seeds.resolved()

    def build_profiles(self) -> Profiles:
        return self.profiles.build()

    def build_mass_law(self) -> MassLaw:
        return self.mass_law.build()

    def build_test_functions(self) -> list[TestFunction]:
        return [get_test_function(name) for name in self.test_functions]

    def with_overrides(
        self,
        output_dir: str | Path | None = None,
        threads: int | None = None,
        seed_base: int | None = None,
        seed_count: int | None = None,
        n_list: list[int] | None = None,
        times: list[float] | None = None,
    ) -> "ExperimentConfig":
        """Copy with command-line overrides applied and everything revalidated."""
        data = self.model_dump()
        if output_dir is not None:
            data["output_dir"] = Path(output_dir)
        if threads is not None:
            data["threads"] = threads
        if seed_base is not None or seed_count is not None:
            seeds = dict(data["seeds"])
            seeds["values"] = None
            if seed_base is not None:
                seeds["base"] = seed_base
            if seed_count is not None:
                seeds["count"] = seed_count
            data["seeds"] = seeds
        if n_list is not None:
            data["n_list"] = n_list
        if times is not None:
            data["times"] = times
        return type(self).model_validate(data)

    def semantic_dict(self) -> dict[str, Any]:
        return self.model_dump(mode="json", exclude=set(NON_SEMANTIC_FIELDS))

    def config_hash(self) -> str:
        canonical = json.dumps(
            self.semantic_dict(), sort_keys=True, separators=(",", ":"), ensure_ascii=True
        )
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


__all__ = [
    "ExperimentConfig",
    "ExperimentKind",
    "MassLawSpec",
    "ProfileSpec",
    "SeedSpec",
]
