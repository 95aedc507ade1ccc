"""Hybrid interval type-2 Mamdani-TSK fuzzy regression.

Pipeline: data-driven IT2 partitions, instance-seeded hybrid rules with
bounded polynomial consequents, dual dominance weighting, ant-colony
rule-subset selection, and weighted-mean inference, plus a benchmark
and explainability harness.
"""

from .aco import AcoConfig, AcoConfigError, AcoState, RuleSubset, select_rules
from .data import (
    Dataset,
    FoldSplit,
    ParseError,
    dataset_fingerprint,
    file_fingerprint,
    load_csv,
    load_keel,
    load_keel_folds,
    make_folds,
    save_csv,
    split_holdout,
)
from .dominance import (
    FuzzyDominance,
    ZeroSupportError,
    error_dominance,
    fuzzy_dominance,
    rule_confidence,
    rule_support,
)
from .evaluate import (
    CALIFORNIA_EXPLAIN_REFERENCE,
    CALIFORNIA_REFERENCE,
    REFERENCE_RMSE,
    CaseStudyResult,
    EvalReport,
    Explainability,
    TrainingFailedError,
    active_rules_per_prediction,
    case_study,
    coverage_metrics,
    derive_mamdani,
    explainability_block,
    mamdani_baseline,
    noise_robustness,
    quantization_profile,
    run_cv,
)
from .inference import (
    BatchResult,
    FiredRule,
    Model,
    NotTrainedError,
    Prediction,
    predict,
    predict_batch,
    predict_values,
)
from .it2 import (
    DegeneratePartitionError,
    IT2Set,
    MembershipInterval,
    Partition,
    build_partition,
    firing_strength,
    membership,
)
from .persist import (
    load_model,
    load_partitions,
    load_rules,
    load_universe,
    rules_text,
    save_model,
    save_partitions,
    save_rules,
    save_universe,
    write_xy_csv,
)
from .pipeline import TrainConfig, TrainResult, build_partitions, train_model
from .rules import (
    HybridRule,
    Polynomial,
    RuleUnfittableError,
    clamp,
    evaluate_rule,
    expand_features,
    fit_consequent,
    monomial_exponents,
)
from .universe import (
    EmptyUniverseError,
    GenerationConfig,
    RuleUniverse,
    generate_candidates,
)

__version__ = "0.1.0"
