import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hit2mtsk.rules import (
    HybridRule,
    Polynomial,
    RuleUnfittableError,
    clamp,
    design_matrix,
    evaluate_rule,
    expand_features,
    fit_consequent,
    monomial_exponents,
)

# ---------------------------------------------------------------------------
# independent oracle: exponent enumeration via cartesian product, plain
# unstandardized normal equations, no code shared with the package
# ---------------------------------------------------------------------------


def oracle_exponents(v: int, degree: int) -> list[tuple[int, ...]]:
    exps = [
        e
        for e in itertools.product(range(degree + 1), repeat=v)
        if sum(e) <= degree
    ]
    exps.sort(key=lambda e: (sum(e),))
    return exps


def oracle_fit(X: np.ndarray, y: np.ndarray, degree: int) -> dict:
    """Coefficients by exponent tuple from raw normal equations."""
    exps = oracle_exponents(X.shape[1], degree)
    M = np.column_stack(
        [np.prod(X ** np.array(e), axis=1) for e in exps]
    )
    beta = np.linalg.solve(M.T @ M, M.T @ y)
    return dict(zip(exps, beta))


def coeffs_by_exponent(poly: Polynomial) -> dict:
    return dict(zip(poly.exponents, poly.coefficients))


class TestMonomials:
    def test_two_vars_degree_two(self):
        exps = monomial_exponents(2, 2)
        assert exps == ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))

    def test_counts(self):
        assert len(monomial_exponents(2, 3)) == 10
        assert len(monomial_exponents(1, 1)) == 2
        assert len(monomial_exponents(3, 3)) == math.comb(6, 3)

    def test_expand_features_matches_exponents(self):
        vec = expand_features({"a": 2.0, "b": 3.0}, ["a", "b"], 2)
        assert vec.tolist() == [1.0, 2.0, 3.0, 4.0, 6.0, 9.0]

    def test_expand_rejects_bad_degree(self):
        with pytest.raises(ValueError, match="degree"):
            expand_features([1.0], ["a"], 4)

    def test_design_matrix_count_invariant(self):
        X = np.random.default_rng(0).normal(size=(7, 3))
        for d in (1, 2, 3):
            assert design_matrix(X, d).shape[1] == math.comb(3 + d, d)


class TestFitConsequent:
    def test_exact_affine_recovery(self):
        x = np.linspace(0.0, 1.0, 9).reshape(-1, 1)
        y = 2.0 + 3.0 * x[:, 0]
        poly = fit_consequent(x, y, ["x"], degree=1, ridge=0.0)
        c = coeffs_by_exponent(poly)
        assert c[(0,)] == pytest.approx(2.0, abs=1e-9)
        assert c[(1,)] == pytest.approx(3.0, abs=1e-9)

    def test_cross_term_only(self):
        rng = np.random.default_rng(1)
        X = rng.uniform(-2.0, 2.0, size=(60, 2))
        y = X[:, 0] * X[:, 1]
        poly = fit_consequent(X, y, ["a", "b"], degree=2, ridge=0.0)
        c = coeffs_by_exponent(poly)
        assert c[(1, 1)] == pytest.approx(1.0, abs=1e-8)
        for e, w in c.items():
            if e != (1, 1):
                assert abs(w) < 1e-8

    @pytest.mark.parametrize("seed", range(8))
    @pytest.mark.parametrize("degree", [1, 2, 3])
    def test_matches_normal_equations_oracle(self, seed, degree):
        rng = np.random.default_rng(seed)
        v = int(rng.integers(1, 4))
        n = 40 + int(rng.integers(0, 20))
        X = rng.uniform(-3.0, 3.0, size=(n, v))
        y = rng.normal(size=n)
        got = coeffs_by_exponent(
            fit_consequent(X, y, [f"x{i}" for i in range(v)], degree, ridge=0.0)
        )
        want = oracle_fit(X, y, degree)
        assert set(got) == set(want)
        scale = max(1.0, max(abs(w) for w in want.values()))
        for e in want:
            assert got[e] == pytest.approx(want[e], rel=1e-8, abs=1e-8 * scale)

    def test_underdetermined_falls_back_to_degree_one(self):
        X = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        y = 1.0 + 2.0 * X[:, 0] - 1.0 * X[:, 1]
        # 4 rows < 6 monomials of degree 2, but enough for degree 1
        poly = fit_consequent(X, y, ["a", "b"], degree=2, ridge=0.0)
        assert poly.degree == 1
        c = coeffs_by_exponent(poly)
        assert c[(1, 0)] == pytest.approx(2.0, abs=1e-9)

    def test_three_rows_degree_two_constant_fallback(self):
        X = np.array([[0.0, 0.0], [1.0, 2.0], [2.0, 1.0]])
        y = np.array([1.0, 5.0, 3.0])
        poly = fit_consequent(X, y, ["a", "b"], degree=2)
        assert poly.is_constant
        assert poly.coefficients[0] == pytest.approx(3.0)

    def test_constant_fallback_uses_firing_weights_and_clamp(self):
        X = np.array([[0.0, 0.0], [1.0, 1.0]])
        y = np.array([0.0, 10.0])
        poly = fit_consequent(
            X,
            y,
            ["a", "b"],
            degree=2,
            firing=np.array([1.0, 3.0]),
            clamp_bounds=(0.0, 6.0),
        )
        # weighted mean 7.5 clamps to 6
        assert poly.coefficients[0] == pytest.approx(6.0)

    def test_degenerate_targets_constant(self):
        X = np.random.default_rng(2).normal(size=(10, 2))
        y = np.full(10, 4.25)
        poly = fit_consequent(X, y, ["a", "b"], degree=3)
        assert poly.is_constant
        assert poly.coefficients[0] == 4.25

    def test_empty_rows_unfittable(self):
        with pytest.raises(RuleUnfittableError):
            fit_consequent(np.empty((0, 2)), np.empty(0), ["a", "b"], 2)

    def test_ridge_shrinks_toward_zero_slope(self):
        x = np.linspace(0.0, 1.0, 30).reshape(-1, 1)
        y = 3.0 * x[:, 0]
        loose = fit_consequent(x, y, ["x"], 1, ridge=0.0)
        tight = fit_consequent(x, y, ["x"], 1, ridge=100.0)
        assert abs(coeffs_by_exponent(tight)[(1,)]) < abs(
            coeffs_by_exponent(loose)[(1,)]
        )

    def test_weighted_fit_prefers_heavy_rows(self):
        x = np.array([[0.0], [1.0], [2.0], [3.0]])
        y = np.array([0.0, 1.0, 2.0, 30.0])
        w = np.array([1.0, 1.0, 1.0, 1e-9])
        weighted = fit_consequent(
            x, y, ["x"], 1, ridge=0.0, firing=w, weighted=True
        )
        unweighted = fit_consequent(x, y, ["x"], 1, ridge=0.0)
        # downweighting the outlier row pulls the slope back toward 1
        assert abs(coeffs_by_exponent(weighted)[(1,)] - 1.0) < 0.05
        assert abs(coeffs_by_exponent(unweighted)[(1,)] - 1.0) > 1.0


# the worked quadratic rule: printed coefficients, High-set bounds
CEMENT_RULE = HybridRule(
    antecedent=(("cement", "High"), ("blast_furnace_slag", "High")),
    consequent_set="High",
    consequent_fn=Polynomial(
        degree=2,
        variables=("cement", "blast_furnace_slag"),
        exponents=((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)),
        coefficients=(0.0, 0.3, -0.6, -5.29e-4, 1.68e-3, 2.82e-4),
    ),
    clamp_bounds=(37.91, 82.6),
    fuzzy_dominance=(0.436, 0.457),
    error_dominance=0.065,
)


class TestEvaluateRule:
    def test_worked_value(self):
        got = evaluate_rule(
            CEMENT_RULE, {"cement": 375.0, "blast_furnace_slag": 300.0}
        )
        assert got == pytest.approx(72.489375, abs=1e-9)

    def test_clamped_above(self):
        rule = CEMENT_RULE
        assert float(clamp(85.0, rule.clamp_bounds)) == 82.6

    def test_clamped_below(self):
        assert float(clamp(30.0, CEMENT_RULE.clamp_bounds)) == 37.91

    def test_output_always_within_bounds(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            x = {
                "cement": float(rng.uniform(-500, 1500)),
                "blast_furnace_slag": float(rng.uniform(-500, 1500)),
            }
            out = evaluate_rule(CEMENT_RULE, x)
            assert 37.91 <= out <= 82.6

    def test_non_finite_input(self):
        with pytest.raises(ValueError, match="non-finite"):
            evaluate_rule(CEMENT_RULE, {"cement": np.inf, "blast_furnace_slag": 0.0})

    @given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6))
    @settings(max_examples=50)
    def test_clamp_idempotent(self, v, other):
        bounds = (min(v, other), max(v, other))
        once = clamp(123.456, bounds)
        assert clamp(once, bounds) == once


class TestHybridRuleValidation:
    def test_polynomial_variables_subset_of_antecedent(self):
        with pytest.raises(ValueError, match="outside the antecedent"):
            HybridRule(
                antecedent=(("a", "Low"),),
                consequent_set="Low",
                consequent_fn=Polynomial(1, ("b",), ((0,), (1,)), (0.0, 1.0)),
                clamp_bounds=(0.0, 1.0),
            )

    def test_empty_antecedent(self):
        with pytest.raises(ValueError, match="antecedent"):
            HybridRule(
                antecedent=(),
                consequent_set="Low",
                consequent_fn=Polynomial(1, (), ((),), (0.5,)),
                clamp_bounds=(0.0, 1.0),
            )

    def test_linguistic_rendering_is_mamdani_shaped(self):
        text = CEMENT_RULE.describe("compressive_strength")
        assert text.startswith(
            "IF cement is High AND blast_furnace_slag is High "
            "THEN compressive_strength is High"
        )

    def test_bad_error_dominance(self):
        with pytest.raises(ValueError, match="error dominance"):
            HybridRule(
                antecedent=(("a", "Low"),),
                consequent_set="Low",
                consequent_fn=Polynomial(1, (), ((),), (0.5,)),
                clamp_bounds=(0.0, 1.0),
                error_dominance=0.0,
            )


class TestPolynomial:
    def test_render_raw_units(self):
        text = CEMENT_RULE.consequent_fn.render()
        assert "0.3*cement" in text
        assert "- 0.6*blast_furnace_slag" in text
        assert "cement^2" in text

    def test_duplicate_monomials_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            Polynomial(1, ("x",), ((1,), (1,)), (1.0, 2.0))

    def test_evaluate_matches_evaluate_at(self):
        p = CEMENT_RULE.consequent_fn
        X = np.array([[375.0, 300.0]])
        assert p.evaluate(X)[0] == pytest.approx(
            p.evaluate_at({"cement": 375.0, "blast_furnace_slag": 300.0})
        )
