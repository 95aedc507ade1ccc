"""Hybrid rules: fuzzy antecedent, fuzzy consequent label, bounded polynomial.

A rule reads ``IF x1 is A1 AND ... THEN y is G`` and additionally carries
a polynomial y(x) over (a subset of) its antecedent variables.  The
polynomial supplies the crisp output; the consequent set G supplies the
interval the output is clamped to, so no rule can ever answer outside
the linguistic region it claims.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

MAX_DEGREE = 3


class RuleUnfittableError(ValueError):
    """Raised when no consequent at all can be estimated for a rule."""


def monomial_exponents(
    num_variables: int, degree: int
) -> tuple[tuple[int, ...], ...]:
    """Dense exponent tuples up to ``degree``, graded-lexicographic.

    For 2 variables and degree 2 this yields the exponents of
    1, x1, x2, x1^2, x1*x2, x2^2 in that order; the count is always
    C(num_variables + degree, degree).
    """
    if num_variables < 0:
        raise ValueError("num_variables must be nonnegative")
    if not 1 <= degree <= MAX_DEGREE:
        raise ValueError(f"degree must be in 1..{MAX_DEGREE}")
    exps: list[tuple[int, ...]] = []
    for total in range(degree + 1):
        for combo in itertools.combinations_with_replacement(
            range(num_variables), total
        ):
            e = [0] * num_variables
            for i in combo:
                e[i] += 1
            exps.append(tuple(e))
    return tuple(exps)


def design_matrix(X: np.ndarray, degree: int) -> np.ndarray:
    """Monomial column matrix (n, C(v+degree, degree)) for rows ``X``."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("X must be 2-d (rows, variables)")
    n, v = X.shape
    exps = monomial_exponents(v, degree)
    powers = [
        [np.ones(n)] + [X[:, j] ** k for k in range(1, degree + 1)]
        for j in range(v)
    ]
    cols = np.empty((n, len(exps)))
    for c, e in enumerate(exps):
        col = np.ones(n)
        for j, k in enumerate(e):
            if k:
                col = col * powers[j][k]
        cols[:, c] = col
    return cols


def expand_features(
    x: Mapping[str, float] | Sequence[float],
    variables: Sequence[str],
    degree: int,
) -> np.ndarray:
    """Monomial vector of one input, aligned with ``monomial_exponents``."""
    if isinstance(x, Mapping):
        row = [float(x[v]) for v in variables]
    else:
        if len(x) != len(variables):
            raise ValueError("input length does not match variables")
        row = [float(v) for v in x]
    return design_matrix(np.array([row]), degree)[0]


@dataclass(frozen=True)
class Polynomial:
    """Dense polynomial in named variables, coefficients in raw units."""

    degree: int
    variables: tuple[str, ...]
    exponents: tuple[tuple[int, ...], ...]
    coefficients: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.exponents) != len(self.coefficients):
            raise ValueError("exponents/coefficients length mismatch")
        if not self.coefficients:
            raise ValueError("polynomial needs at least one term")
        for e in self.exponents:
            if len(e) != len(self.variables):
                raise ValueError("exponent arity does not match variables")
            if sum(e) > self.degree:
                raise ValueError("term degree exceeds declared degree")
        if len(set(self.exponents)) != len(self.exponents):
            raise ValueError("duplicate monomials")
        if not all(np.isfinite(self.coefficients)):
            raise ValueError("coefficients must be finite")

    @property
    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.exponents)

    def evaluate(self, X: np.ndarray) -> np.ndarray:
        """Evaluate on rows aligned with ``self.variables`` (n, v)."""
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.shape[1] != len(self.variables):
            raise ValueError("column count does not match polynomial arity")
        out = np.zeros(X.shape[0])
        for e, w in zip(self.exponents, self.coefficients):
            term = np.full(X.shape[0], w)
            for j, k in enumerate(e):
                if k:
                    term = term * X[:, j] ** k
            out += term
        return out

    def evaluate_at(self, x: Mapping[str, float]) -> float:
        row = np.array([[float(x[v]) for v in self.variables]])
        return float(self.evaluate(row)[0])

    def render(self, precision: int = 6) -> str:
        parts = []
        for e, w in zip(self.exponents, self.coefficients):
            names = [
                v if k == 1 else f"{v}^{k}"
                for v, k in zip(self.variables, e)
                if k
            ]
            mono = "*".join(names)
            coef = f"{w:.{precision}g}"
            parts.append(coef if not mono else f"{coef}*{mono}")
        text = " + ".join(parts)
        return text.replace("+ -", "- ")


def clamp(value: float | np.ndarray, bounds: tuple[float, float]):
    """Clip ``value`` into the closed interval ``bounds`` (idempotent)."""
    lo, hi = bounds
    if lo > hi:
        raise ValueError("clamp bounds inverted")
    return np.clip(value, lo, hi)


@dataclass(frozen=True)
class HybridRule:
    """One rule of the base.

    ``antecedent`` pairs (variable name, set name); the set objects live
    in the model's partitions.  ``clamp_bounds`` is the support of the
    consequent set's upper membership function.  ``fuzzy_dominance`` is
    the support x confidence interval; ``error_dominance`` is
    1 / (1 + fit RMSE); both grade how much say the rule gets.
    """

    antecedent: tuple[tuple[str, str], ...]
    consequent_set: str
    consequent_fn: Polynomial
    clamp_bounds: tuple[float, float]
    fuzzy_dominance: tuple[float, float] = (0.0, 0.0)
    error_dominance: float = 1.0

    def __post_init__(self) -> None:
        if not self.antecedent:
            raise ValueError("rule antecedent must not be empty")
        ant_vars = [v for v, _ in self.antecedent]
        if len(set(ant_vars)) != len(ant_vars):
            raise ValueError("antecedent repeats a variable")
        missing = set(self.consequent_fn.variables) - set(ant_vars)
        if missing:
            raise ValueError(
                f"polynomial uses variables outside the antecedent: {missing}"
            )
        if self.clamp_bounds[0] > self.clamp_bounds[1]:
            raise ValueError("clamp bounds inverted")
        lo, hi = self.fuzzy_dominance
        if not (0.0 <= lo <= hi <= 1.0):
            raise ValueError("fuzzy dominance must be an interval inside [0, 1]")
        if not 0.0 < self.error_dominance <= 1.0:
            raise ValueError("error dominance must be in (0, 1]")

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.antecedent)

    def describe(self, target_variable: str, precision: int = 6) -> str:
        """Human-readable IF/THEN text with the bounded polynomial."""
        clauses = " AND ".join(f"{v} is {s}" for v, s in self.antecedent)
        poly = self.consequent_fn.render(precision)
        lo, hi = self.clamp_bounds
        return (
            f"IF {clauses} THEN {target_variable} is {self.consequent_set}"
            f" with {target_variable} = {poly}"
            f" clamped to [{lo:.{precision}g}, {hi:.{precision}g}]"
        )


def evaluate_rule(rule: HybridRule, x: Mapping[str, float]) -> float:
    """Crisp rule output: polynomial value clamped to the consequent support."""
    for v in rule.consequent_fn.variables:
        if v not in x or not np.isfinite(x[v]):
            raise ValueError(f"input for {v!r} missing or non-finite")
    raw = rule.consequent_fn.evaluate_at(x)
    return float(clamp(raw, rule.clamp_bounds))


def _solve_least_squares(
    M: np.ndarray,
    y: np.ndarray,
    ridge: float,
    sample_weight: np.ndarray | None,
) -> np.ndarray:
    """Ridge LS on standardized monomial columns, coefficients in raw units.

    Columns of ``M`` (no constant column) are z-scored before solving so
    the penalty is scale-free; the intercept is unpenalized.  The
    returned vector is (intercept, raw-unit coefficients) with exact
    back-transform, zero-variance columns pinned to coefficient 0.
    """
    n, m = M.shape
    mu = M.mean(axis=0)
    sd = M.std(axis=0)
    keep = sd > 0
    Z = (M[:, keep] - mu[keep]) / sd[keep]
    A = np.hstack([np.ones((n, 1)), Z])
    t = y.astype(float)
    if sample_weight is not None:
        sw = np.sqrt(sample_weight)
        A = A * sw[:, None]
        t = t * sw
    if ridge > 0.0:
        G = A.T @ A
        G[1:, 1:] += ridge * np.eye(keep.sum())
        try:
            beta = np.linalg.solve(G, A.T @ t)
        except np.linalg.LinAlgError:
            beta, *_ = np.linalg.lstsq(A, t, rcond=None)
    else:
        beta, *_ = np.linalg.lstsq(A, t, rcond=None)
    coeffs = np.zeros(m + 1)
    scaled = beta[1:]
    coeffs_kept = scaled / sd[keep]
    coeffs[1:][keep] = coeffs_kept
    coeffs[0] = beta[0] - float(coeffs_kept @ mu[keep])
    return coeffs


def fit_consequent(
    X: np.ndarray,
    y: np.ndarray,
    variables: Sequence[str],
    degree: int,
    ridge: float = 1e-6,
    firing: np.ndarray | None = None,
    weighted: bool = False,
    clamp_bounds: tuple[float, float] | None = None,
) -> Polynomial:
    """Estimate a rule's polynomial from the rows it fires on.

    Parameters
    ----------
    X, y:
        Rows restricted to the rule's antecedent variables (columns
        aligned with ``variables``) and to positive-firing instances.
    degree:
        Requested polynomial degree (1..3).  When there are fewer rows
        than monomials the fit degrades to degree 1, then to a constant.
    ridge:
        L2 penalty on the standardized non-constant coefficients;
        0 gives plain least squares.
    firing:
        Per-row firing strengths (midpoints).  Used as WLS weights when
        ``weighted`` and always for the constant fallback's mean.
    clamp_bounds:
        When given, the constant fallback is clamped into it.

    Raises
    ------
    RuleUnfittableError
        If no rows are available at all.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if X.ndim != 2:
        raise ValueError("X must be 2-d")
    if X.shape[0] != y.size:
        raise ValueError("X and y row counts differ")
    if X.shape[1] != len(variables):
        raise ValueError("X columns must match variables")
    if ridge < 0.0:
        raise ValueError("ridge must be nonnegative")
    n, v = X.shape
    if n == 0:
        raise RuleUnfittableError("rule fires on no rows")

    def constant_poly() -> Polynomial:
        w = None
        if firing is not None and np.sum(firing) > 0:
            w = np.asarray(firing, dtype=float)
        c = float(np.average(y, weights=w))
        if clamp_bounds is not None:
            c = float(clamp(c, clamp_bounds))
        return Polynomial(
            degree=1, variables=(), exponents=((),), coefficients=(c,)
        )

    if np.ptp(y) == 0.0 or v == 0:
        return constant_poly()

    # degrade an underdetermined fit to degree 1; a degraded fit with no
    # residual degree of freedom degrades further to the constant
    use_degree = degree
    degraded = False
    if n < math.comb(v + degree, degree):
        use_degree = 1
        degraded = True
    if n < v + 1 or (degraded and n <= v + 1):
        return constant_poly()

    M = design_matrix(X, use_degree)[:, 1:]
    sw = None
    if weighted and firing is not None and np.sum(firing) > 0:
        sw = np.asarray(firing, dtype=float)
    coeffs = _solve_least_squares(M, y, ridge, sw)
    if not np.all(np.isfinite(coeffs)):
        return constant_poly()
    exps = monomial_exponents(v, use_degree)
    return Polynomial(
        degree=use_degree,
        variables=tuple(variables),
        exponents=exps,
        coefficients=tuple(float(c) for c in coeffs),
    )
