"""Ant-colony selection of the active rule subset.

Ants repeatedly sample rule subsets with probability proportional to
pheromone^alpha * heuristic^beta (heuristic = error dominance), score
each subset by full-pipeline RMSE on the fit+validation rows, evaporate
and deposit pheromone, and stop early after a patience window without
improvement.  Fully deterministic for a fixed seed: every ant draws
from its own (seed, iteration, ant) derived stream.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .data import Dataset
from .inference import reduce_firing, rule_matrices
from .rules import HybridRule
from .universe import RuleUniverse

PHEROMONE_FLOOR = 1e-12


class AcoConfigError(ValueError):
    """Infeasible or out-of-range ACO settings."""


@dataclass(frozen=True)
class AcoConfig:
    num_ants: int = 30
    num_iterations: int = 200
    alpha: float = 1.0
    beta: float = 2.0
    rho: float = 0.1
    deposit: float = 1.0
    initial_pheromone: float = 0.1
    subset_size_range: tuple[int, int] = (10, 100)
    patience: int = 20
    seed: int = 0

    def __post_init__(self) -> None:
        if self.num_ants < 1 or self.num_iterations < 1:
            raise AcoConfigError("need at least one ant and one iteration")
        if self.alpha < 0.0 or self.beta < 0.0:
            raise AcoConfigError("alpha and beta must be >= 0")
        if not 0.0 < self.rho <= 1.0:
            raise AcoConfigError("rho must be in (0, 1]")
        if self.deposit <= 0.0:
            raise AcoConfigError("deposit must be > 0")
        if self.initial_pheromone <= 0.0:
            raise AcoConfigError("initial_pheromone must be > 0")
        lo, hi = self.subset_size_range
        if lo < 1 or lo > hi:
            raise AcoConfigError(
                f"infeasible subset_size_range ({lo}, {hi})"
            )
        if self.patience < 1:
            raise AcoConfigError("patience must be >= 1")

    def to_dict(self) -> dict:
        return {
            "num_ants": self.num_ants,
            "num_iterations": self.num_iterations,
            "alpha": self.alpha,
            "beta": self.beta,
            "rho": self.rho,
            "deposit": self.deposit,
            "initial_pheromone": self.initial_pheromone,
            "subset_size_range": list(self.subset_size_range),
            "patience": self.patience,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "AcoConfig":
        d = dict(d)
        if "subset_size_range" in d:
            d["subset_size_range"] = tuple(d["subset_size_range"])
        return cls(**d)


@dataclass
class AcoState:
    """Mutable search state (exposed for tracing and tests)."""

    pheromone: np.ndarray
    best_indices: tuple[int, ...] | None = None
    best_cost: float = math.inf
    stagnation: int = 0


@dataclass(frozen=True)
class RuleSubset:
    indices: tuple[int, ...]
    rules: tuple[HybridRule, ...]
    cost: float


def sample_subset(
    rng: np.random.Generator, weights: np.ndarray, size: int
) -> np.ndarray:
    """Draw ``size`` distinct indices, each step normalized over the rest."""
    total_rules = weights.size
    if size > total_rules:
        raise ValueError("subset size exceeds rule count")
    avail = np.ones(total_rules, dtype=bool)
    chosen = np.empty(size, dtype=int)
    for t in range(size):
        w = np.where(avail, weights, 0.0)
        s = w.sum()
        if s > 0.0:
            p = w / s
        else:
            p = avail / avail.sum()
        i = int(rng.choice(total_rules, p=p))
        chosen[t] = i
        avail[i] = False
    return np.sort(chosen)


def select_rules(
    universe: RuleUniverse,
    train_data: Dataset,
    validation_data: Dataset | None,
    config: AcoConfig = AcoConfig(),
    firing_reduction: str = "midpoint",
) -> tuple[RuleSubset, tuple[tuple[int, float], ...]]:
    """Search for the lowest-RMSE rule subset.

    Scoring rows are the concatenation of ``train_data`` and
    ``validation_data`` (the latter may be None).  Subset sizes beyond
    the universe size are clamped down to it.  Returns the best subset
    and the (iteration, best RMSE so far) trace.
    """
    rules = universe.rules
    total = len(rules)
    if total == 0:
        raise ValueError("universe is empty")
    lo = min(config.subset_size_range[0], total)
    hi = min(config.subset_size_range[1], total)

    columns: dict[str, np.ndarray] = {}
    for p in universe.feature_partitions:
        cols = [np.asarray(train_data.column(p.variable), dtype=float)]
        if validation_data is not None:
            cols.append(np.asarray(validation_data.column(p.variable), dtype=float))
        columns[p.variable] = np.concatenate(cols)
    y = train_data.y
    if validation_data is not None:
        y = np.concatenate([y, validation_data.y])
    fallback = float(train_data.y.mean())

    F_lo, F_hi, Y = rule_matrices(
        rules, universe.feature_partitions, columns, universe.config.tnorm
    )
    dom = np.array([r.error_dominance for r in rules])
    W = reduce_firing(F_lo, F_hi, firing_reduction) * dom[:, None]
    del F_lo, F_hi
    P = W * Y
    del Y

    def cost_of(sel: np.ndarray) -> float:
        wsum = W[sel].sum(axis=0)
        psum = P[sel].sum(axis=0)
        ok = wsum > 0.0
        pred = np.where(ok, psum / np.where(ok, wsum, 1.0), fallback)
        return float(np.sqrt(np.mean((pred - y) ** 2)))

    heuristic = dom
    state = AcoState(pheromone=np.full(total, config.initial_pheromone))
    trace: list[tuple[int, float]] = []

    for iteration in range(1, config.num_iterations + 1):
        improved = False
        deposits: list[tuple[np.ndarray, float]] = []
        for ant in range(config.num_ants):
            rng = np.random.default_rng(
                np.random.SeedSequence([config.seed, iteration, ant])
            )
            size = int(rng.integers(lo, hi + 1))
            weights = state.pheromone**config.alpha * heuristic**config.beta
            sel = sample_subset(rng, weights, size)
            cost = cost_of(sel)
            deposits.append((sel, config.deposit / (1.0 + cost)))
            if cost < state.best_cost:
                state.best_cost = cost
                state.best_indices = tuple(int(i) for i in sel)
                improved = True
        state.pheromone *= 1.0 - config.rho
        for sel, amount in deposits:
            state.pheromone[sel] += amount
        np.maximum(state.pheromone, PHEROMONE_FLOOR, out=state.pheromone)
        trace.append((iteration, state.best_cost))
        state.stagnation = 0 if improved else state.stagnation + 1
        if state.stagnation >= config.patience:
            break

    assert state.best_indices is not None
    subset = RuleSubset(
        indices=state.best_indices,
        rules=tuple(rules[i] for i in state.best_indices),
        cost=state.best_cost,
    )
    return subset, tuple(trace)
