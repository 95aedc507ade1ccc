"""Crisp prediction from a selected rule base.

Each rule contributes its clamped polynomial output weighted by a
scalarized firing strength times its error dominance; the prediction is
the weighted mean.  Rows no rule fires on fall back to the training
target mean with an explicit flag, never silently.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .data import Dataset
from .it2 import Partition, TNORMS
from .rules import HybridRule, clamp

FIRING_REDUCTIONS = ("midpoint", "lower", "upper")


class NotTrainedError(RuntimeError):
    """Prediction was requested from a model with no rules."""


@dataclass(frozen=True)
class FiredRule:
    """One rule's contribution to a prediction."""

    index: int
    firing: tuple[float, float]
    output: float
    weight: float


@dataclass(frozen=True)
class Prediction:
    value: float
    fired_rules: tuple[FiredRule, ...]
    fallback_used: bool


@dataclass(frozen=True)
class BatchResult:
    """Vectorized predictions over many rows."""

    values: np.ndarray
    fired_counts: np.ndarray
    fallback_rate: float
    rmse: float | None = None
    predictions: tuple[Prediction, ...] | None = None


@dataclass(frozen=True)
class Model:
    """Trained artifact: partitions + selected rules + inference settings."""

    feature_partitions: tuple[Partition, ...]
    target_partition: Partition
    rules: tuple[HybridRule, ...]
    tnorm: str = "minimum"
    firing_reduction: str = "midpoint"
    fallback_value: float = 0.0
    feature_stats: tuple[tuple[str, float, float], ...] = ()
    manifest: Mapping = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.tnorm not in TNORMS:
            raise ValueError(f"unknown t-norm {self.tnorm!r}")
        if self.firing_reduction not in FIRING_REDUCTIONS:
            raise ValueError(
                f"unknown firing reduction {self.firing_reduction!r}"
            )
        if not np.isfinite(self.fallback_value):
            raise ValueError("fallback_value must be finite")

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(p.variable for p in self.feature_partitions)

    def partition_for(self, variable: str) -> Partition:
        for p in self.feature_partitions:
            if p.variable == variable:
                return p
        raise KeyError(f"no partition for variable {variable!r}")


def _column_table(
    feature_partitions: Sequence[Partition],
    data: Dataset | Mapping[str, np.ndarray],
) -> dict[str, np.ndarray]:
    """Named columns for every partitioned feature, validated and float."""
    cols: dict[str, np.ndarray] = {}
    length = None
    for p in feature_partitions:
        if isinstance(data, Dataset):
            try:
                col = data.column(p.variable)
            except KeyError:
                raise ValueError(
                    f"dataset lacks model feature {p.variable!r}"
                ) from None
        else:
            if p.variable not in data:
                raise ValueError(f"input lacks model feature {p.variable!r}")
            col = np.asarray(data[p.variable], dtype=float)
        col = np.atleast_1d(np.asarray(col, dtype=float))
        if length is None:
            length = col.size
        elif col.size != length:
            raise ValueError("feature columns have inconsistent lengths")
        cols[p.variable] = col
    return cols


def rule_matrices(
    rules: Sequence[HybridRule],
    feature_partitions: Sequence[Partition],
    columns: Mapping[str, np.ndarray],
    tnorm: str = "minimum",
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-rule firing bounds and clamped outputs over all rows.

    Returns (F_lo, F_hi, Y), each shaped (num_rules, num_rows).
    Memberships are computed once per partition and shared across rules.
    """
    if tnorm not in TNORMS:
        raise ValueError(f"unknown t-norm {tnorm!r}")
    parts = {p.variable: p for p in feature_partitions}
    mems = {
        name: parts[name].membership_matrix(col) for name, col in columns.items()
    }
    n = next(iter(columns.values())).size if columns else 0
    m = len(rules)
    F_lo = np.ones((m, n))
    F_hi = np.ones((m, n))
    Y = np.empty((m, n))
    for i, rule in enumerate(rules):
        lo = np.ones(n)
        hi = np.ones(n)
        for var, set_name in rule.antecedent:
            if var not in mems:
                raise ValueError(f"no column for antecedent variable {var!r}")
            s = parts[var].index_of(set_name)
            m_lo = mems[var][0][:, s]
            m_hi = mems[var][1][:, s]
            if tnorm == "minimum":
                lo = np.minimum(lo, m_lo)
                hi = np.minimum(hi, m_hi)
            else:
                lo = lo * m_lo
                hi = hi * m_hi
        F_lo[i] = lo
        F_hi[i] = hi
        fn = rule.consequent_fn
        if fn.variables:
            Xr = np.stack([columns[v] for v in fn.variables], axis=1)
            raw = fn.evaluate(Xr)
        else:
            raw = np.full(n, fn.coefficients[0])
        Y[i] = clamp(raw, rule.clamp_bounds)
    return F_lo, F_hi, Y


def reduce_firing(
    F_lo: np.ndarray, F_hi: np.ndarray, reduction: str = "midpoint"
) -> np.ndarray:
    """Scalarize firing intervals: midpoint (default), lower, or upper."""
    if reduction == "midpoint":
        return 0.5 * (F_lo + F_hi)
    if reduction == "lower":
        return F_lo
    if reduction == "upper":
        return F_hi
    raise ValueError(f"unknown firing reduction {reduction!r}")


def predict_values(
    model: Model, data: Dataset | Mapping[str, np.ndarray]
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Fast path: (values, fired_counts, fallback_mask) arrays."""
    if not model.rules:
        raise NotTrainedError("model has no rules")
    columns = _column_table(model.feature_partitions, data)
    F_lo, F_hi, Y = rule_matrices(
        model.rules, model.feature_partitions, columns, model.tnorm
    )
    dom = np.array([r.error_dominance for r in model.rules])
    W = reduce_firing(F_lo, F_hi, model.firing_reduction) * dom[:, None]
    fired_counts = np.count_nonzero(F_hi > 0.0, axis=0)
    wsum = W.sum(axis=0)
    psum = (W * Y).sum(axis=0)
    fallback = wsum <= 0.0
    values = np.where(fallback, model.fallback_value, psum / np.where(fallback, 1.0, wsum))
    return values, fired_counts, fallback


def predict(model: Model, x: Mapping[str, float]) -> Prediction:
    """Predict one row and itemize every fired rule's contribution."""
    if not model.rules:
        raise NotTrainedError("model has no rules")
    data = {}
    for p in model.feature_partitions:
        if p.variable not in x:
            raise ValueError(f"input lacks model feature {p.variable!r}")
        v = float(x[p.variable])
        if not np.isfinite(v):
            raise ValueError(f"input for {p.variable!r} is non-finite")
        data[p.variable] = np.array([v])
    columns = _column_table(model.feature_partitions, data)
    F_lo, F_hi, Y = rule_matrices(
        model.rules, model.feature_partitions, columns, model.tnorm
    )
    dom = np.array([r.error_dominance for r in model.rules])
    W = (reduce_firing(F_lo, F_hi, model.firing_reduction) * dom[:, None])[:, 0]
    fired = tuple(
        FiredRule(
            index=i,
            firing=(float(F_lo[i, 0]), float(F_hi[i, 0])),
            output=float(Y[i, 0]),
            weight=float(W[i]),
        )
        for i in range(len(model.rules))
        if F_hi[i, 0] > 0.0
    )
    wsum = float(W.sum())
    if wsum > 0.0:
        value = float((W * Y[:, 0]).sum() / wsum)
        return Prediction(value=value, fired_rules=fired, fallback_used=False)
    return Prediction(
        value=model.fallback_value, fired_rules=fired, fallback_used=True
    )


def predict_batch(
    model: Model,
    data: Dataset | Mapping[str, np.ndarray],
    targets: np.ndarray | None = None,
    detail: bool = False,
) -> BatchResult:
    """Predict many rows; attaches RMSE when targets are available.

    ``detail=True`` additionally materializes a per-row `Prediction`
    with itemized fired rules (quadratic in rules x rows; meant for
    inspection, not bulk scoring).
    """
    values, fired_counts, fallback = predict_values(model, data)
    if targets is None and isinstance(data, Dataset):
        targets = data.y
    score = None
    if targets is not None:
        t = np.asarray(targets, dtype=float).ravel()
        if t.size != values.size:
            raise ValueError("targets length does not match rows")
        score = float(np.sqrt(np.mean((values - t) ** 2)))
    preds = None
    if detail:
        columns = _column_table(model.feature_partitions, data)
        n = values.size
        preds = tuple(
            predict(model, {name: col[i] for name, col in columns.items()})
            for i in range(n)
        )
    return BatchResult(
        values=values,
        fired_counts=fired_counts,
        fallback_rate=float(np.mean(fallback)),
        rmse=score,
        predictions=preds,
    )
