"""Interval type-2 partitions from raw data.

Builds a three-set partition over a skewed feature, prints every set's
lower/upper trapezoids, and shows how membership comes back as an
interval rather than a single number.
"""
import numpy as np

from hit2mtsk import build_partition, firing_strength, membership

rng = np.random.default_rng(7)
values = rng.gamma(shape=2.0, scale=12.0, size=400)

part = build_partition(values, num_sets=3, fou_width=0.15, variable="dosage")
print(f"partition over '{part.variable}', domain {part.domain}")
for s in part.sets:
    print(f"\n  {s.name} ({s.shape})")
    print(f"    lower trapezoid: {s.lower_params}")
    print(f"    upper trapezoid: {s.upper_params}")

# membership returns a (lower, upper) interval: the width is the
# footprint of uncertainty at that point
print("\nmembership intervals at sample points")
for x in (5.0, 20.0, 45.0, 80.0):
    row = "  x={:5.1f}".format(x)
    for s in part.sets:
        m = membership(s, x)
        row += f"   {s.name}=[{m.lower:.3f}, {m.upper:.3f}]"
    print(row)

# a conjunction of clauses fires with the t-norm of the memberships
other = build_partition(rng.uniform(18, 90, 400), num_sets=3, variable="age")
clauses = [("dosage", part.sets[1]), ("age", other.sets[0])]
strength = firing_strength(clauses, {"dosage": 30.0, "age": 25.0})
print(f"\nfiring of (dosage is {part.sets[1].name}) AND (age is {other.sets[0].name})")
print(f"  at dosage=30, age=25: [{strength.lower:.3f}, {strength.upper:.3f}]")
