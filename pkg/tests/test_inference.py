from dataclasses import replace

import numpy as np
import pytest

from hit2mtsk import (
    Dataset,
    HybridRule,
    Model,
    NotTrainedError,
    Polynomial,
    predict,
    predict_batch,
)
from hit2mtsk.inference import predict_values, reduce_firing
from hit2mtsk.it2 import IT2Set, Partition


def shoulder(name, shape, params, support=None):
    return IT2Set(
        name=name,
        shape=shape,
        upper_params=params,
        lower_params=params,
        fou_scale=1.0,
        support=support,
    )


def constant(value):
    return Polynomial(degree=1, variables=(), exponents=((),), coefficients=(value,))


# one feature, two overlapping shoulder sets with degenerate FOU so every
# membership value below is exact
X_PART = Partition(
    variable="x",
    sets=(
        shoulder("Low", "left_shoulder", (-1.0, -1.0, 4.0, 8.0)),
        shoulder("High", "right_shoulder", (2.0, 6.0, 11.0, 11.0)),
    ),
    domain=(-1.0, 11.0),
)
Y_PART = Partition(
    variable="y",
    sets=(
        shoulder("Small", "left_shoulder", (0.0, 0.0, 12.0, 18.0)),
        shoulder("Big", "right_shoulder", (12.0, 18.0, 30.0, 30.0)),
    ),
    domain=(0.0, 30.0),
)

RULE_LOW = HybridRule(
    antecedent=(("x", "Low"),),
    consequent_set="Small",
    consequent_fn=constant(10.0),
    clamp_bounds=(0.0, 30.0),
    fuzzy_dominance=(0.5, 0.5),
    error_dominance=1.0,
)
RULE_HIGH = HybridRule(
    antecedent=(("x", "High"),),
    consequent_set="Big",
    consequent_fn=constant(20.0),
    clamp_bounds=(0.0, 30.0),
    fuzzy_dominance=(0.5, 0.5),
    error_dominance=0.5,
)


def two_rule_model(**overrides):
    kwargs = dict(
        feature_partitions=(X_PART,),
        target_partition=Y_PART,
        rules=(RULE_LOW, RULE_HIGH),
        fallback_value=99.0,
    )
    kwargs.update(overrides)
    return Model(**kwargs)


class TestHandWorkedPredictions:
    def test_weighted_mean_of_two_rules(self):
        # at x=6: Low fires 0.5 (ramp 8->4), High fires 1.0 (plateau);
        # weights 0.5*1.0 and 1.0*0.5 balance -> mean of 10 and 20
        p = predict(two_rule_model(), {"x": 6.0})
        assert p.value == pytest.approx(15.0)
        assert not p.fallback_used
        assert len(p.fired_rules) == 2
        by_index = {f.index: f for f in p.fired_rules}
        assert by_index[0].firing == (0.5, 0.5)
        assert by_index[0].weight == pytest.approx(0.5)
        assert by_index[1].firing == (1.0, 1.0)
        assert by_index[1].weight == pytest.approx(0.5)
        assert by_index[0].output == 10.0
        assert by_index[1].output == 20.0

    def test_single_fired_rule_is_exact(self):
        p = predict(two_rule_model(), {"x": 0.0})
        assert p.value == 10.0
        assert [f.index for f in p.fired_rules] == [0]

    def test_non_firing_rule_is_a_no_op(self):
        lone = two_rule_model(rules=(RULE_LOW,))
        both = two_rule_model()
        assert predict(lone, {"x": 0.0}).value == predict(both, {"x": 0.0}).value

    def test_fallback_is_flagged(self):
        lone = two_rule_model(rules=(RULE_LOW,))
        p = predict(lone, {"x": 9.0})  # beyond Low's foot at 8
        assert p.fallback_used
        assert p.value == 99.0
        assert p.fired_rules == ()

    def test_batch_matches_single(self):
        model = two_rule_model()
        xs = np.array([0.0, 3.0, 6.0, 7.5, 10.0])
        values, fired_counts, fallback = predict_values(model, {"x": xs})
        for i, x in enumerate(xs):
            single = predict(model, {"x": float(x)})
            assert values[i] == pytest.approx(single.value)
            assert fired_counts[i] == len(single.fired_rules)
            assert bool(fallback[i]) == single.fallback_used

    def test_fired_counts_and_fallback_rate(self):
        lone = two_rule_model(rules=(RULE_LOW,))
        res = predict_batch(lone, {"x": np.array([0.0, 6.0, 9.0, 10.0])})
        assert list(res.fired_counts) == [1, 1, 0, 0]
        assert res.fallback_rate == 0.5
        assert res.rmse is None


class TestWeightingSemantics:
    def test_upper_and_lower_reductions_bracket_midpoint(self):
        F_lo = np.array([[0.2, 0.0]])
        F_hi = np.array([[0.6, 0.4]])
        lo = reduce_firing(F_lo, F_hi, "lower")
        mid = reduce_firing(F_lo, F_hi, "midpoint")
        hi = reduce_firing(F_lo, F_hi, "upper")
        assert np.all(lo <= mid) and np.all(mid <= hi)
        np.testing.assert_allclose(mid, [[0.4, 0.2]])
        with pytest.raises(ValueError):
            reduce_firing(F_lo, F_hi, "median")

    def test_error_dominance_scales_cancel(self):
        base = two_rule_model()
        scaled = two_rule_model(
            rules=tuple(
                replace(r, error_dominance=r.error_dominance * 0.25)
                for r in base.rules
            )
        )
        xs = {"x": np.linspace(0.0, 8.0, 33)}
        np.testing.assert_allclose(
            predict_values(base, xs)[0], predict_values(scaled, xs)[0], atol=1e-12
        )

    def test_dominance_shifts_the_blend(self):
        favored = two_rule_model(
            rules=(RULE_LOW, replace(RULE_HIGH, error_dominance=1.0))
        )
        # doubling High's reliability doubles its weight at x=6
        p = predict(favored, {"x": 6.0})
        assert p.value == pytest.approx((0.5 * 10 + 1.0 * 20) / 1.5)

    def test_prediction_inside_fired_output_hull(self, trained, toy_dataset):
        model = trained.model
        res = predict_batch(model, toy_dataset, detail=True)
        for pred in res.predictions:
            if pred.fallback_used:
                continue
            outs = [f.output for f in pred.fired_rules]
            assert min(outs) - 1e-9 <= pred.value <= max(outs) + 1e-9


class TestBatchScoring:
    def test_rmse_zero_for_perfect_targets(self):
        lone = two_rule_model(rules=(RULE_LOW,))
        xs = np.array([0.0, 1.0, 2.0])
        res = predict_batch(lone, {"x": xs}, targets=np.full(3, 10.0))
        assert res.rmse == 0.0

    def test_rmse_matches_hand_value(self):
        lone = two_rule_model(rules=(RULE_LOW,))
        res = predict_batch(lone, {"x": np.zeros(4)}, targets=np.full(4, 13.0))
        assert res.rmse == pytest.approx(3.0)

    def test_dataset_targets_used_automatically(self):
        ds = Dataset(
            "d", ("x",), np.array([[0.0], [1.0]]), "y", np.array([10.0, 10.0])
        )
        res = predict_batch(two_rule_model(rules=(RULE_LOW,)), ds)
        assert res.rmse == 0.0

    def test_target_length_mismatch(self):
        with pytest.raises(ValueError, match="length"):
            predict_batch(
                two_rule_model(), {"x": np.zeros(3)}, targets=np.zeros(4)
            )

    def test_detail_predictions_align_with_values(self):
        model = two_rule_model()
        res = predict_batch(model, {"x": np.array([0.0, 6.0])}, detail=True)
        assert len(res.predictions) == 2
        for v, p in zip(res.values, res.predictions):
            assert v == pytest.approx(p.value)


class TestValidation:
    def test_empty_model_raises(self):
        empty = two_rule_model(rules=())
        with pytest.raises(NotTrainedError):
            predict(empty, {"x": 1.0})
        with pytest.raises(NotTrainedError):
            predict_values(empty, {"x": np.zeros(2)})

    def test_missing_feature_rejected(self):
        with pytest.raises(ValueError, match="lacks model feature"):
            predict(two_rule_model(), {"z": 1.0})
        with pytest.raises(ValueError, match="lacks model feature"):
            predict_values(two_rule_model(), {"z": np.zeros(2)})

    def test_non_finite_input_rejected(self):
        with pytest.raises(ValueError, match="non-finite"):
            predict(two_rule_model(), {"x": float("nan")})

    def test_inconsistent_column_lengths(self):
        part2 = Partition(
            variable="z",
            sets=(
                shoulder("Low", "left_shoulder", (-1.0, -1.0, 4.0, 8.0)),
                shoulder("High", "right_shoulder", (2.0, 6.0, 11.0, 11.0)),
            ),
            domain=(-1.0, 11.0),
        )
        model = two_rule_model(feature_partitions=(X_PART, part2))
        with pytest.raises(ValueError, match="inconsistent"):
            predict_values(model, {"x": np.zeros(3), "z": np.zeros(2)})

    def test_model_config_validation(self):
        with pytest.raises(ValueError, match="t-norm"):
            two_rule_model(tnorm="bad")
        with pytest.raises(ValueError, match="firing reduction"):
            two_rule_model(firing_reduction="bad")
        with pytest.raises(ValueError, match="finite"):
            two_rule_model(fallback_value=float("inf"))

    def test_feature_name_helpers(self):
        model = two_rule_model()
        assert model.feature_names == ("x",)
        assert model.partition_for("x") is X_PART
        with pytest.raises(KeyError):
            model.partition_for("nope")


class TestTrainedModelSanity:
    def test_training_fits_the_surface(self, trained, toy_dataset):
        res = predict_batch(trained.model, toy_dataset)
        # noise floor is 0.3; a sane fit lands near it
        assert res.rmse < 0.9
        assert res.fallback_rate <= 0.05

    def test_trained_prediction_tracks_target(self, trained):
        # y = 2 + 1.5 x1 - 0.8 x2 + 0.05 x1 x2 at (5, 0) -> 9.5
        p = predict(trained.model, {"x1": 5.0, "x2": 0.0})
        assert p.value == pytest.approx(9.5, abs=0.5)

    def test_deterministic_batches(self, trained, toy_dataset):
        a = predict_batch(trained.model, toy_dataset)
        b = predict_batch(trained.model, toy_dataset)
        assert np.array_equal(a.values, b.values)
