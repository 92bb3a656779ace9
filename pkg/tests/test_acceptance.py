"""Acceptance suite: every headline claim at its stated tolerance.

Each test prints one `[acceptance] criterion N (...): PASS/FAIL` line; run
with `pytest tests/test_acceptance.py -v -s` to see them as they execute.
"""

import math
import time

import numpy as np
import pytest

from contraction_lab.constant_metric import (
    check_constant_metric_conditions,
    example_3d_system,
    example_additive_3d,
    polytope_inradius,
    simplex_directions,
)
from contraction_lab.contraction import (
    RiemannianMetric,
    bounded_example_metric,
    bounded_metric_m_parameter,
    check_contraction_region,
    check_uniform_contraction,
    contraction_matrix,
    find_violating_input,
    linear_additive_field,
    scalar_metric,
    scalar_metric_derivative,
)
from contraction_lab.counterexample import (
    circle_orbit_residual,
    find_r_star,
    radial_f,
    random_initial_conditions,
    verify_ges,
)
from contraction_lab.dynamics import ConstantInput, PeriodicInput, VectorField, concat, integrate
from contraction_lab.entrainment import DIVERGES, ENTRAINS, counterexample_divergence, detect_entrainment
from contraction_lab.errors import MetricAppearsConstantError
from contraction_lab.flowspace import (
    PiecewiseSchedule,
    check_limit_contraction,
    check_piecewise_contraction,
    flow_from_field,
    schedule_contraction_factor,
)
from contraction_lab.linalg import log_norm_2, spectral_norm

TWO_PI = 2 * math.pi
PRINTED_R_STAR = 2.79098840365914
X_PAPER = 4.0 * math.sqrt(TWO_PI)


def _report(number, name, body):
    try:
        body()
    except Exception:
        print(f"[acceptance] criterion {number:2d} ({name}): FAIL")
        raise
    print(f"[acceptance] criterion {number:2d} ({name}): PASS")


def test_c01_critical_radius_reproduction(r_star_cert):
    def body():
        start = time.perf_counter()
        cert = find_r_star((0.1, 4.0), 1e-13)
        elapsed = time.perf_counter() - start
        assert abs(cert.r_star - PRINTED_R_STAR) <= 1e-10
        assert abs(cert.first_order_residual) <= 1e-12
        assert cert.second_order_value < 0
        assert elapsed < 1.0

    _report(1, "critical radius reproduction", body)


def test_c02_circle_orbit_exactness(r_star):
    def body():
        start = time.perf_counter()
        residual = circle_orbit_residual(r_star, 1000)
        elapsed = time.perf_counter() - start
        assert residual <= 1e-10
        assert elapsed < 1.0

    _report(2, "forced circle is an exact trajectory", body)


def test_c03_global_exponential_stability():
    def body():
        start = time.perf_counter()
        ics = random_initial_conditions(100, 10.0, seed=0)
        cert = verify_ges(ics, 20.0, 0.5)
        elapsed = time.perf_counter() - start
        assert cert.holds
        assert cert.margin <= 1e-9
        grid = np.linspace(0.0, 50.0, 50001)
        assert np.max(radial_f(grid) + 0.5 * grid) <= 0.0
        assert elapsed < 30.0

    _report(3, "global exponential stability at rate 1/2", body)


def test_c04_non_entrainment_divergence(r_star, forced_system):
    def body():
        start = time.perf_counter()
        report = counterexample_divergence(r_star, 0.1, 10)
        assert report.distances[1] > report.distances[0]
        assert report.monotone_prefix >= 3
        assert report.distances[3] > report.distances[0]
        assert report.grew
        field, signal = forced_system
        verdict = detect_entrainment(
            field, signal, [[r_star, 0.0], [r_star - 0.1, 0.0]], max_iterations=50, tol=1e-8
        )
        elapsed = time.perf_counter() - start
        assert verdict.status == DIVERGES
        assert verdict.iterations <= 50
        assert elapsed < 10.0

    _report(4, "perturbed start diverges from the forced orbit", body)


def test_c05_scalar_metric_certificate(scalar_system):
    def body():
        field, metric = scalar_system
        cert = check_contraction_region(field, metric, (-20.0, 20.0), 40001, 1.0 / 3.0, [0.0])
        assert cert.holds
        xs = np.linspace(-20.0, 20.0, 40001)
        drift = 0.5 * xs * np.sin(xs**2) - xs
        slope = 0.5 * np.sin(xs**2) + xs**2 * np.cos(xs**2) - 1.0
        lhs = scalar_metric_derivative(xs) * drift + 2.0 * slope * scalar_metric(xs)
        rhs = 4.0 / (np.sin(xs**2) - 2.0)
        assert np.max(np.abs(lhs - rhs) / np.abs(rhs)) <= 1e-9

    _report(5, "scalar metric certifies rate 1/3 on [-20, 20]", body)


def test_c06_metric_violation(scalar_system):
    def body():
        field, metric = scalar_system
        c = 27.0 / 16.0
        direct = contraction_matrix(field, metric, [X_PAPER], [c])[0, 0]
        closed = -2.0 + 13.5 * math.sqrt(TWO_PI)
        assert abs(direct - closed) <= 1e-9
        wide = check_contraction_region(field, metric, (-20.0, 20.0), 40001, 1.0 / 3.0, [c])
        assert not wide.holds
        spacing = 1e-3
        window = check_contraction_region(
            field, metric, (X_PAPER - 20 * spacing, X_PAPER + spacing), 22, 1.0 / 3.0, [c]
        )
        assert not window.holds
        assert abs(window.witness["x"][0] - X_PAPER) <= spacing

    _report(6, "constant input 27/16 violates the metric at the known point", body)


def test_c07_violating_input_search(scalar_system):
    def body():
        field, metric = scalar_system
        found = find_violating_input(field, metric, (-3.0, 3.0))
        assert found.value > 0
        cross = float(found.z @ contraction_matrix(field, metric, found.x, found.c) @ found.z)
        assert cross == pytest.approx(found.value, rel=1e-9)
        with pytest.raises(MetricAppearsConstantError):
            find_violating_input(
                linear_additive_field(1), RiemannianMetric.constant([[1.0]]), (-3.0, 3.0)
            )

    _report(7, "constructive search finds a contraction-destroying input", body)


def test_c08_bounded_inputs_nonconstant_metric():
    def body():
        m, cert = bounded_metric_m_parameter(1.0)
        assert cert.holds
        xs = np.linspace(-10 * math.sqrt(m), 10 * math.sqrt(m), 40001)
        eps = np.exp(-xs * xs / m)
        eps_prime = -2.0 * xs / m * eps
        for c in (-1.0, 0.0, 1.0):
            assert np.max(np.abs((c - xs) * eps_prime) - (1.0 + eps)) <= 0.0
        metric = bounded_example_metric(m)
        half = 10.0 * math.sqrt(m)
        uni = check_uniform_contraction(
            linear_additive_field(1), metric, (-1.0, 1.0), 5, (-half, half), 2001, 1.0
        )
        assert uni.holds

    _report(8, "bounded inputs admit a non-constant contraction metric", body)


def test_c09_constancy_forcing_examples():
    def body():
        samples = [[0.0, 0.0, 0.0], [0.05, -0.05, 0.05]]
        dirs1 = np.array([[1.0, 0, 0], [0, 1.0, 0], [0, 0, 1.0], [-1.0 / math.sqrt(3)] * 3])
        for (field, family), dirs in (
            (example_3d_system(), dirs1),
            (example_additive_3d(), simplex_directions(3)),
        ):
            rho = polytope_inradius(dirs) / 2.0
            report = check_constant_metric_conditions(field, family, samples, rho)
            assert report.certified
            assert report.largest_checked_index == 1024
            for xi in range(len(samples)):
                ratios = [
                    e["max_ratio"]
                    for e in report.entries
                    if e["x"] == [float(v) for v in samples[xi]]
                ]
                for a, b in zip(ratios[:-1], ratios[1:]):
                    assert 0.4 <= b / a <= 0.6
                assert ratios[-1] < 1e-2

    _report(9, "both 3-D examples satisfy the constancy-forcing conditions", body)


def test_c10_matrix_norm_lemmas():
    def body():
        rng = np.random.default_rng(42)
        for _ in range(1000):
            n = int(rng.integers(1, 9))
            a = rng.normal(size=(n, n))
            sym = (a + a.T) / 2
            r = rng.normal(size=(n, n))
            assert log_norm_2(sym) <= log_norm_2(sym + r.T @ r) + 1e-9
            b = rng.normal(size=(n, n))
            assert log_norm_2(a @ b) <= spectral_norm(a) * spectral_norm(b) + 1e-9

    _report(10, "matrix-norm lemmas over 1000 random cases", body)


def test_c11_flow_space_machinery():
    def body():
        field = linear_additive_field(1)
        flow = flow_from_field(field)
        u, v = ConstantInput([0.4]), ConstantInput([-0.6])
        via = flow.apply(v, 1.0, 2.5, flow.apply(u, 0.0, 1.0, [1.3]))
        direct = flow.apply(concat(u, v, 1.0), 0.0, 2.5, [1.3])
        assert float(np.linalg.norm(via - direct)) <= 1e-7

        sched = PiecewiseSchedule([[0.3], [-0.2], [0.9]], [0.25, 0.5, 0.25], 0.0, 2.0)
        factor = schedule_contraction_factor(-1.0, sched)
        assert abs(factor - math.exp(-2.0)) <= 1e-14 * math.exp(-2.0)

        pairs = [([2.0], [-1.0]), ([0.3], [0.6])]
        piece = check_piecewise_contraction(flow, (-1.0, 1.0), -1.0, sched, pairs)
        assert piece.holds
        assert piece.margin == pytest.approx(math.exp(-2.0), rel=1e-7)

        target = PeriodicInput(TWO_PI, lambda t: [float(np.clip(math.sin(t), -1.0, 1.0))])
        limit = check_limit_contraction(
            flow, (-1.0, 1.0), -1.0, target, 8, [([-2.0], [2.0]), ([0.5], [1.5])], (0.0, TWO_PI)
        )
        assert limit.holds
        gaps = limit.grid_spec["cauchy_gaps"]
        assert len(gaps) == 8
        for a, b in zip(gaps[1:-1], gaps[2:]):
            assert b <= 0.5 * a * 1.25

    _report(11, "flow-map composition, schedule factors, and dyadic limits", body)


def test_c12_entrainment_positive_control():
    def body():
        field = VectorField(lambda x, u: -x + u, 1, 1, jacobian=lambda x, u: np.array([[-1.0]]))
        signal = PeriodicInput(TWO_PI, lambda t: [math.sin(t)])
        verdict = detect_entrainment(field, signal, [[-10.0], [0.0], [10.0]], 50, 1e-8)
        assert verdict.status == ENTRAINS
        assert verdict.orbit_sample[0] == pytest.approx(-0.5, abs=1e-8)

    _report(12, "linear positive control entrains to the known cycle", body)
