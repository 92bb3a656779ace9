"""Contraction in a non-constant metric, and how a constant input breaks it.

The scalar system x' = x sin(x^2)/2 - x contracts in the metric
m(x) = 1/(sin(x^2)/2 - 1)^2 at rate 1/3.  Adding the constant input 27/16
flips the sign of the contraction expression near x = 4 sqrt(2 pi); the
constructive search recovers such an input automatically.
"""

import math

import numpy as np

from contraction_lab import (
    check_contraction_region,
    contraction_matrix,
    find_violating_input,
    scalar_example_system,
)

field, metric = scalar_example_system()

cert = check_contraction_region(field, metric, (-20.0, 20.0), 40001, beta=1.0 / 3.0, c=[0.0])
print(f"rate-1/3 certificate on [-20, 20] : holds={cert.holds}, margin={cert.margin:.4f}")

x_star = 4.0 * math.sqrt(2.0 * math.pi)
value = contraction_matrix(field, metric, [x_star], [27.0 / 16.0])[0, 0]
print(f"violation value at x=4*sqrt(2pi)  : {value:.6f} (closed form {-2 + 13.5 * math.sqrt(2 * math.pi):.6f})")

broken = check_contraction_region(field, metric, (-20.0, 20.0), 40001, beta=1.0 / 3.0, c=[27.0 / 16.0])
print(f"certificate with c=27/16          : holds={broken.holds}, worst point x={broken.witness['x'][0]:.4f}")

found = find_violating_input(field, metric, x_search=(-3.0, 3.0))
print(f"search found c={found.c[0]:g} at x={found.x[0]:g} with quadratic form {found.value:.4f} > 0")

gaps = [
    abs(contraction_matrix(field, metric, [x], [0.0])[0, 0] - 4.0 / (math.sin(x * x) - 2.0))
    for x in np.linspace(-20, 20, 801)
]
print(f"closed-form identity gap on grid  : {max(gaps):.2e}")
