"""Input families that force every contraction metric to be constant.

When the normalized field values at each point eventually surround the
origin (convex hull contains a ball) while the Jacobian-to-field ratio
decays to zero, non-constant metrics cannot certify contraction for all
members of the family.  Both stock 3-D examples satisfy the two conditions.
"""

import math

import numpy as np

from contraction_lab import (
    check_constant_metric_conditions,
    example_3d_system,
    example_additive_3d,
    polytope_inradius,
    simplex_directions,
)

samples = [[0.0, 0.0, 0.0], [0.05, -0.05, 0.05]]

dirs1 = np.array([[1.0, 0, 0], [0, 1.0, 0], [0, 0, 1.0], [-1.0 / math.sqrt(3)] * 3])
for label, (field, family), dirs in (
    ("diagonal system, axis inputs ", example_3d_system(), dirs1),
    ("additive system, simplex rays", example_additive_3d(), simplex_directions(3)),
):
    rho = polytope_inradius(dirs) / 2.0
    report = check_constant_metric_conditions(field, family, samples, rho)
    print(f"{label}: certified={report.certified} (rho={rho:.4f}, checked up to i={report.largest_checked_index})")
    ratios = [e["max_ratio"] for e in report.entries if e["x"] == [0.0, 0.0, 0.0]]
    print("  ratio decay at the origin:", " ".join(f"{r:.4f}" for r in ratios[:6]), "...")
