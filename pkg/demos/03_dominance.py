"""Rule dominance: fuzzy support x confidence, plus error weighting.

A rule earns two kinds of standing. Fuzzy dominance measures how much
of the data the whole rule covers (support) and how reliably the
antecedent implies the consequent (confidence); both come back as
intervals because memberships are intervals. Error dominance rewards
rules whose local fit is accurate.
"""
import dataclasses

import numpy as np

from hit2mtsk import Dataset, build_partition, error_dominance, fuzzy_dominance
from hit2mtsk.rules import HybridRule, Polynomial

rng = np.random.default_rng(11)
n = 200
x1 = rng.uniform(0, 100, n)
y = 0.6 * x1 + rng.normal(0, 4, n)
ds = Dataset(name="demo", feature_names=("x1",), X=x1[:, None], target_name="y", y=y)

parts = {
    "x1": build_partition(x1, num_sets=3, variable="x1"),
    "y": build_partition(y, num_sets=3, variable="y"),
}

good = HybridRule(
    antecedent=(("x1", "High"),),
    consequent_set="High",
    consequent_fn=Polynomial(1, ("x1",), ((0,), (1,)), (0.0, 0.6)),
    clamp_bounds=(float(y.min()), float(y.max())),
    fuzzy_dominance=(0.0, 0.0),
    error_dominance=1.0,
)
# same antecedent, but pointing at the wrong output region
bad = dataclasses.replace(good, consequent_set="Low")

for label, rule in (("High -> High", good), ("High -> Low ", bad)):
    fd = fuzzy_dominance(rule, ds, parts)
    print(f"rule {label}")
    print(f"  support    [{fd.support[0]:.4f}, {fd.support[1]:.4f}]")
    print(f"  confidence [{fd.confidence[0]:.4f}, {fd.confidence[1]:.4f}]")
    print(f"  dominance  [{fd.dominance[0]:.4f}, {fd.dominance[1]:.4f}]\n")

# error dominance: 1 at a perfect fit, decays smoothly with rmse
print("error dominance by local rmse")
for rmse in (0.0, 0.5, 2.0, 14.3, 100.0):
    print(f"  rmse={rmse:6.1f}  ->  {error_dominance(rmse):.4f}")
