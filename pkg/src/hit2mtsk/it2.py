"""Interval type-2 fuzzy sets over scalar variables.

Sets are trapezoid-shaped with an embedded footprint of uncertainty: an
upper membership function and a lower membership function that is a
scaled, inward-shifted copy of the upper one.  Membership of a crisp
value is therefore an interval ``[lower, upper]`` rather than a single
degree.  Partitions bundle the sets that tile one variable's observed
range, with shoulder sets at both ends so every real input receives a
nonzero membership somewhere.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

SHAPES = ("left_shoulder", "trapezoid", "right_shoulder")
TNORMS = ("minimum", "product")

# Shoulder breakpoints on the open side are pushed this fraction of the
# domain width past the observed edge.  These sentinels only anchor the
# serialized breakpoints; evaluation treats the plateau as unbounded and
# the stored support keeps the true data edge.
SENTINEL_MARGIN = 0.10


class DegeneratePartitionError(ValueError):
    """Raised when a variable has no spread to partition."""


@dataclass(frozen=True)
class MembershipInterval:
    """Interval membership degree ``[lower, upper]`` within [0, 1]."""

    lower: float
    upper: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.lower) and np.isfinite(self.upper)):
            raise ValueError("membership bounds must be finite")
        if not (0.0 <= self.lower <= self.upper <= 1.0):
            raise ValueError(
                f"invalid membership interval [{self.lower}, {self.upper}]"
            )

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)

    def as_tuple(self) -> tuple[float, float]:
        return (self.lower, self.upper)


def _trapezoid_curve(
    shape: str, params: tuple[float, float, float, float], x: np.ndarray
) -> np.ndarray:
    """Type-1 trapezoid evaluation with shoulder-aware open sides."""
    a, b, c, d = params
    out = np.zeros(x.shape, dtype=float)

    if shape != "left_shoulder":
        rising = (x > a) & (x < b)
        if b > a:
            out[rising] = (x[rising] - a) / (b - a)
    if shape != "right_shoulder":
        falling = (x > c) & (x < d)
        if d > c:
            out[falling] = (d - x[falling]) / (d - c)

    # plateau; shoulders extend it past their open-side breakpoints
    if shape == "left_shoulder":
        out[x <= c] = 1.0
    elif shape == "right_shoulder":
        out[x >= b] = 1.0
    else:
        out[(x >= b) & (x <= c)] = 1.0
    return out


@dataclass(frozen=True)
class IT2Set:
    """One interval type-2 set: two stacked trapezoids.

    Parameters
    ----------
    name:
        Linguistic label, e.g. ``"High"``.
    shape:
        One of ``left_shoulder``, ``trapezoid``, ``right_shoulder``.
        Shoulders saturate at 1 on their open side.
    upper_params, lower_params:
        Breakpoints ``(a, b, c, d)`` of the upper and lower trapezoids.
        The lower trapezoid must sit inside the upper one.
    fou_scale:
        Height of the lower membership function, in (0, 1].
    support:
        Closed interval outside which the upper membership is treated as
        zero for clamping purposes.  Defaults to ``(a, d)``; partitions
        built from data anchor shoulder sets at the observed domain edge
        instead of at the sentinel breakpoints.
    """

    name: str
    shape: str
    upper_params: tuple[float, float, float, float]
    lower_params: tuple[float, float, float, float]
    fou_scale: float = 0.9
    support: tuple[float, float] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.shape not in SHAPES:
            raise ValueError(f"unknown set shape {self.shape!r}")
        if not 0.0 < self.fou_scale <= 1.0:
            raise ValueError("fou_scale must be in (0, 1]")
        for params in (self.upper_params, self.lower_params):
            if len(params) != 4 or not all(np.isfinite(params)):
                raise ValueError("trapezoid needs four finite breakpoints")
            if not (params[0] <= params[1] <= params[2] <= params[3]):
                raise ValueError(f"breakpoints not ordered: {params}")
        if (
            self.lower_params[0] < self.upper_params[0]
            or self.lower_params[3] > self.upper_params[3]
        ):
            raise ValueError("lower set must lie inside the upper support")
        if self.support is None:
            object.__setattr__(
                self, "support", (self.upper_params[0], self.upper_params[3])
            )
        if self.support[0] > self.support[1]:
            raise ValueError("support interval inverted")

    def membership_arrays(
        self, values: np.ndarray | Sequence[float]
    ) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized ``(lower, upper)`` membership of ``values``."""
        x = np.asarray(values, dtype=float)
        upper = _trapezoid_curve(self.shape, self.upper_params, x)
        lower = self.fou_scale * _trapezoid_curve(self.shape, self.lower_params, x)
        return np.clip(lower, 0.0, 1.0), np.clip(upper, 0.0, 1.0)


def membership(fuzzy_set: IT2Set, x: float) -> MembershipInterval:
    """Interval membership of a single crisp value."""
    if not np.isfinite(x):
        raise ValueError("membership input must be finite")
    lo, hi = fuzzy_set.membership_arrays(np.array([x]))
    return MembershipInterval(float(lo[0]), float(hi[0]))


@dataclass(frozen=True)
class Partition:
    """Ordered family of IT2 sets covering one variable's domain."""

    variable: str
    sets: tuple[IT2Set, ...]
    domain: tuple[float, float]

    def __post_init__(self) -> None:
        if len(self.sets) < 2:
            raise ValueError("a partition needs at least two sets")
        names = [s.name for s in self.sets]
        if len(set(names)) != len(names):
            raise ValueError("duplicate set names in partition")

    def __len__(self) -> int:
        return len(self.sets)

    def index_of(self, name: str) -> int:
        for i, s in enumerate(self.sets):
            if s.name == name:
                return i
        raise KeyError(f"no set named {name!r} in partition {self.variable!r}")

    def set_named(self, name: str) -> IT2Set:
        return self.sets[self.index_of(name)]

    def membership_matrix(
        self, values: np.ndarray | Sequence[float]
    ) -> tuple[np.ndarray, np.ndarray]:
        """(n, k) lower/upper memberships of ``values`` in all k sets."""
        x = np.asarray(values, dtype=float)
        lowers = np.empty((x.size, len(self.sets)))
        uppers = np.empty_like(lowers)
        for j, s in enumerate(self.sets):
            lowers[:, j], uppers[:, j] = s.membership_arrays(x)
        return lowers, uppers


def _set_names(k: int) -> tuple[str, ...]:
    if k == 2:
        return ("Low", "High")
    if k == 3:
        return ("Low", "Medium", "High")
    if k == 5:
        return ("VeryLow", "Low", "Medium", "High", "VeryHigh")
    return tuple(f"Set{i + 1}" for i in range(k))


def _lower_from_upper(
    shape: str,
    upper: tuple[float, float, float, float],
    fou_width: float,
) -> tuple[float, float, float, float]:
    # each foot moves inward proportionally to its own ramp length, so the
    # plateau is preserved and the lower curve never crosses the upper one
    a, b, c, d = upper
    return (a + fou_width * (b - a), b, c, d - fou_width * (d - c))


def build_partition(
    values: np.ndarray | Sequence[float],
    num_sets: int = 3,
    fou_width: float = 0.15,
    fou_scale: float = 0.9,
    variable: str = "x",
) -> Partition:
    """Partition the observed range of ``values`` into IT2 sets.

    Set centers are placed at evenly spaced quantiles of the data.  Each
    interior set is a trapezoid whose support reaches the midpoints to
    its neighbouring centers, widened by ``fou_width`` of the local gap;
    the outermost sets are shoulders saturating beyond the data edges.

    Raises
    ------
    DegeneratePartitionError
        If ``values`` has zero spread.
    ValueError
        On empty/non-finite input or out-of-range settings.
    """
    x = np.asarray(values, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("cannot partition an empty sample")
    if not np.all(np.isfinite(x)):
        raise ValueError("sample contains non-finite values")
    if num_sets < 2:
        raise ValueError("num_sets must be at least 2")
    if not 0.0 < fou_width < 0.5:
        raise ValueError("fou_width must be in (0, 0.5)")
    if not 0.0 < fou_scale <= 1.0:
        raise ValueError("fou_scale must be in (0, 1]")

    lo = float(x.min())
    hi = float(x.max())
    width = hi - lo
    if width <= 0.0:
        raise DegeneratePartitionError(
            f"variable {variable!r} is constant at {lo}"
        )

    centers = np.quantile(x, np.linspace(0.0, 1.0, num_sets))
    # heavily tied samples can collapse quantiles; fall back to an even grid
    if np.any(np.diff(centers) <= 1e-9 * width):
        centers = np.linspace(lo, hi, num_sets)

    mids = 0.5 * (centers[:-1] + centers[1:])
    eps = fou_width * np.diff(centers)
    sent_lo = lo - SENTINEL_MARGIN * width
    sent_hi = hi + SENTINEL_MARGIN * width
    names = _set_names(num_sets)

    sets = []
    for i in range(num_sets):
        if i == 0:
            shape = "left_shoulder"
            upper = (sent_lo, sent_lo, mids[0] - eps[0], mids[0] + eps[0])
            support = (lo, upper[3])
        elif i == num_sets - 1:
            shape = "right_shoulder"
            upper = (mids[-1] - eps[-1], mids[-1] + eps[-1], sent_hi, sent_hi)
            support = (upper[0], hi)
        else:
            shape = "trapezoid"
            upper = (
                mids[i - 1] - eps[i - 1],
                mids[i - 1] + eps[i - 1],
                mids[i] - eps[i],
                mids[i] + eps[i],
            )
            support = (upper[0], upper[3])
        lower = _lower_from_upper(shape, upper, fou_width)
        sets.append(
            IT2Set(
                name=names[i],
                shape=shape,
                upper_params=tuple(float(v) for v in upper),
                lower_params=tuple(float(v) for v in lower),
                fou_scale=fou_scale,
                support=(float(support[0]), float(support[1])),
            )
        )
    return Partition(variable=variable, sets=tuple(sets), domain=(lo, hi))


def firing_strength(
    antecedent: Iterable[tuple[str, IT2Set]],
    x: Mapping[str, float],
    tnorm: str = "minimum",
) -> MembershipInterval:
    """Combine clause memberships of one rule into a firing interval.

    ``antecedent`` pairs each variable name with the set it must match;
    ``x`` maps variable names to crisp values.  The t-norm is applied
    separately to the lower and to the upper bounds.
    """
    if tnorm not in TNORMS:
        raise ValueError(f"unknown t-norm {tnorm!r}")
    clauses = list(antecedent)
    if not clauses:
        raise ValueError("rule antecedent must not be empty")
    lo = 1.0
    hi = 1.0
    for var, fuzzy_set in clauses:
        if var not in x:
            raise ValueError(f"input is missing variable {var!r}")
        m = membership(fuzzy_set, float(x[var]))
        if tnorm == "minimum":
            lo = min(lo, m.lower)
            hi = min(hi, m.upper)
        else:
            lo *= m.lower
            hi *= m.upper
    return MembershipInterval(lo, hi)
