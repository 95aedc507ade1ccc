"""End-to-end training: partitions -> rule universe -> subset -> model.

The training fold is internally re-split: rules are generated and
fitted on the larger part, while the subset search scores candidates on
fit+validation rows together.  All randomness flows from one seed
through named substreams, so a config+seed pair pins every artifact.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from .aco import AcoConfig, select_rules
from .data import Dataset, dataset_fingerprint, split_holdout
from .inference import FIRING_REDUCTIONS, Model
from .it2 import DegeneratePartitionError, Partition, build_partition
from .universe import GenerationConfig, RuleUniverse, generate_candidates

# named substreams of the master seed
_STREAM_VALIDATION_SPLIT = 1
_STREAM_GENERATION = 2
_STREAM_ACO = 3


def derive_seed(seed: int, stream: int) -> int:
    """Independent 32-bit child seed for a named substream."""
    return int(
        np.random.SeedSequence([seed, stream]).generate_state(1, np.uint32)[0]
    )


@dataclass(frozen=True)
class TrainConfig:
    """Full pipeline configuration; defaults follow the method's design."""

    num_sets: int = 3
    fou_width: float = 0.15
    fou_scale: float = 0.9
    generation: GenerationConfig = field(default_factory=GenerationConfig)
    aco: AcoConfig = field(default_factory=AcoConfig)
    validation_fraction: float = 0.2
    firing_reduction: str = "midpoint"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.num_sets < 2:
            raise ValueError("num_sets must be >= 2")
        if not 0.0 < self.fou_width < 0.5:
            raise ValueError("fou_width must be in (0, 0.5)")
        if not 0.0 < self.fou_scale <= 1.0:
            raise ValueError("fou_scale must be in (0, 1]")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ValueError("validation_fraction must be in [0, 1)")
        if self.firing_reduction not in FIRING_REDUCTIONS:
            raise ValueError(
                f"unknown firing reduction {self.firing_reduction!r}"
            )

    @property
    def variant(self) -> str:
        return f"d{self.generation.degree}"

    def to_dict(self) -> dict:
        return {
            "num_sets": self.num_sets,
            "fou_width": self.fou_width,
            "fou_scale": self.fou_scale,
            "generation": self.generation.to_dict(),
            "aco": self.aco.to_dict(),
            "validation_fraction": self.validation_fraction,
            "firing_reduction": self.firing_reduction,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "TrainConfig":
        d = dict(d)
        if "generation" in d and not isinstance(d["generation"], GenerationConfig):
            d["generation"] = GenerationConfig.from_dict(d["generation"])
        if "aco" in d and not isinstance(d["aco"], AcoConfig):
            d["aco"] = AcoConfig.from_dict(d["aco"])
        return cls(**d)


@dataclass(frozen=True)
class TrainResult:
    model: Model
    universe: RuleUniverse
    subset_indices: tuple[int, ...]
    trace: tuple[tuple[int, float], ...]


def build_partitions(
    dataset: Dataset, config: TrainConfig
) -> dict[str, Partition]:
    """Partitions for every non-constant feature plus the target.

    Constant features are skipped (they carry no antecedent information);
    a constant target is a hard error.
    """
    partitions: dict[str, Partition] = {}
    for name in dataset.feature_names:
        try:
            partitions[name] = build_partition(
                dataset.column(name),
                num_sets=config.num_sets,
                fou_width=config.fou_width,
                fou_scale=config.fou_scale,
                variable=name,
            )
        except DegeneratePartitionError:
            continue
    partitions[dataset.target_name] = build_partition(
        dataset.y,
        num_sets=config.num_sets,
        fou_width=config.fou_width,
        fou_scale=config.fou_scale,
        variable=dataset.target_name,
    )
    return partitions


def train_model(
    dataset: Dataset, config: TrainConfig = TrainConfig()
) -> TrainResult:
    """Train on one dataset (typically a CV training fold)."""
    partitions = build_partitions(dataset, config)

    n_val = int(round(dataset.n_rows * config.validation_fraction))
    if 0 < n_val < dataset.n_rows:
        fit_data, val_data = split_holdout(
            dataset,
            config.validation_fraction,
            derive_seed(config.seed, _STREAM_VALIDATION_SPLIT),
        )
    else:
        fit_data, val_data = dataset, None

    gen_cfg = replace(
        config.generation, seed=derive_seed(config.seed, _STREAM_GENERATION)
    )
    aco_cfg = replace(config.aco, seed=derive_seed(config.seed, _STREAM_ACO))

    universe = generate_candidates(fit_data, partitions, gen_cfg)
    subset, trace = select_rules(
        universe,
        fit_data,
        val_data,
        aco_cfg,
        firing_reduction=config.firing_reduction,
    )

    feature_parts = tuple(
        partitions[f] for f in dataset.feature_names if f in partitions
    )
    stats = tuple(
        (
            p.variable,
            float(dataset.column(p.variable).mean()),
            float(dataset.column(p.variable).std()),
        )
        for p in feature_parts
    )
    manifest = {
        "config": config.to_dict(),
        "seed": config.seed,
        "dataset_name": dataset.name,
        "dataset_fingerprint": dataset_fingerprint(dataset),
        "universe_size": len(universe),
        "universe_coverage": universe.coverage,
        "selected_rules": len(subset.rules),
        "selection_cost": subset.cost,
    }
    model = Model(
        feature_partitions=feature_parts,
        target_partition=partitions[dataset.target_name],
        rules=subset.rules,
        tnorm=gen_cfg.tnorm,
        firing_reduction=config.firing_reduction,
        fallback_value=float(dataset.y.mean()),
        feature_stats=stats,
        manifest=manifest,
    )
    return TrainResult(
        model=model,
        universe=universe,
        subset_indices=subset.indices,
        trace=trace,
    )
