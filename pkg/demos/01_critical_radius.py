"""Locate and certify the critical forcing radius.

The radial drift f(r) = -r + (r/2) sin(r^2) satisfies f(r) <= -r/2, so the
unforced planar system is globally exponentially stable.  Its smallest
strict local maximizer is the radius of the unstable forced orbit; this
script finds it, checks both optimality conditions, and prints the
machine-readable certificate.
"""

import numpy as np

from contraction_lab import find_r_star, radial_f, radial_f_slope

cert = find_r_star(search_interval=(0.1, 4.0), tol=1e-13)
print("certificate:", cert.to_json())
print(f"slope residual at the radius : {radial_f_slope(cert.r_star):.3e}")
print(f"f(r*) = {cert.f_at_rstar:.12f} <= -r*/2 = {-cert.r_star / 2:.12f}")

grid = np.linspace(0.0, 50.0, 200001)
print(f"max of f(r) + r/2 on [0, 50] : {np.max(radial_f(grid) + grid / 2):.3e} (must be <= 0)")

next_cert = find_r_star(search_interval=(3.0, 6.0), tol=1e-13)
print(f"next local maximum sits at r = {next_cert.r_star:.12f}")
