"""A globally exponentially stable system that ignores its periodic input.

The rotating input turns the circle of radius r* into an exact periodic
trajectory, but starts just inside the circle drift away from it: the
return-map iterates of two nearby starts separate instead of merging, so
the forced system has no globally attracting limit cycle.  Trajectories are
exported as CSV (t, x, y, r) for plotting.
"""

from contraction_lab import (
    build_counterexample,
    circle_orbit_residual,
    detect_entrainment,
    counterexample_divergence,
    find_r_star,
    random_initial_conditions,
    verify_ges,
)

r_star = find_r_star().r_star
print(f"orbit radius r*                  : {r_star:.14f}")
print(f"orbit residual over 1000 samples : {circle_orbit_residual(r_star, 1000):.3e}")

ges = verify_ges(random_initial_conditions(50, 10.0, seed=0), horizon=20.0, rate=0.5)
print(f"unforced decay at rate 1/2       : holds={ges.holds} (margin {ges.margin:.2e})")

report = counterexample_divergence(r_star, delta=0.1, n_periods=10)
print("distance from orbit per period   :", " ".join(f"{d:.4f}" for d in report.distances[:5]), "...")
print(f"distance grew overall            : {report.grew}")

field, signal = build_counterexample(r_star)
verdict = detect_entrainment(field, signal, [[r_star, 0.0], [r_star - 0.1, 0.0]], 50, 1e-8)
print(f"return-map verdict               : {verdict.status} after {verdict.iterations} iteration(s)")

report.export_csv("orbit_divergence_perturbed.csv", "orbit_divergence_reference.csv")
print("wrote orbit_divergence_perturbed.csv / orbit_divergence_reference.csv")
