"""Bounded inputs admit a non-constant metric; unbounded ones do not.

For x' = -x + u with |u| <= B, the bump metric M(x) = 1 + exp(-x^2/m)
certifies contraction at rate 1 once m is large enough; the certificate is
uniform over constant inputs and therefore extends to every signal valued
in the box.  For the same metric, inputs outside any bound destroy
contraction, which the constructive search demonstrates.
"""

import math

from contraction_lab import (
    bounded_example_metric,
    bounded_metric_m_parameter,
    check_uniform_contraction,
    find_violating_input,
    linear_additive_field,
)

for bound in (0.0, 1.0, 4.0):
    m, cert = bounded_metric_m_parameter(bound)
    print(f"B={bound:>3}: smallest admissible m = {m:g} (grid margin {cert.margin:.4f})")

m, _ = bounded_metric_m_parameter(1.0)
field = linear_additive_field(1)
metric = bounded_example_metric(m)
half = 10.0 * math.sqrt(m)
uniform = check_uniform_contraction(field, metric, (-1.0, 1.0), 5, (-half, half), 2001, beta=1.0)
print(f"uniform certificate over |u|<=1 : holds={uniform.holds}, margin={uniform.margin:.4f}")
print(f"  note: {uniform.note}")

found = find_violating_input(field, metric, x_search=(-3.0, 3.0))
print(f"without the bound, c={found.c[0]:g} breaks contraction at x={found.x[0]:g} (value {found.value:.3f})")
