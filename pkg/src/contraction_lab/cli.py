"""Command-line front end: one named experiment per library claim.

Every experiment writes a machine-readable JSON verdict (UTF-8, newline
terminated, fixed key order, 17-significant-digit floats) and exits 0 only
when its claim is confirmed.  Exit codes: 0 confirmed, 1 claim refuted,
2 numerical failure, 64 usage error.  CONTRACTION_LAB_THREADS caps worker
parallelism for the sweeps that support it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import constant_metric, contraction, counterexample, entrainment, flowspace
from .certificates import dumps_fixed
from .dynamics import PeriodicInput, VectorField, concat, integrate, shift_signal
from .errors import ContractionLabError, NoRootFoundError

EXPERIMENTS = (
    "ges-check",
    "circle-orbit",
    "divergence",
    "entrainment-linear",
    "metric-certify",
    "metric-violate",
    "uniform-contraction",
    "bounded-metric",
    "thm3-example1",
    "thm3-example2",
    "flow-compose",
    "flow-limit",
)

# Flags each experiment accepts beyond the common out/format/seed set.
_ALLOWED_FLAGS = {
    "ges-check": {"rate", "horizon"},
    "circle-orbit": {"tol"},
    "divergence": {"delta", "periods"},
    "entrainment-linear": {"tol"},
    "metric-certify": {"grid"},
    "metric-violate": {"grid"},
    "uniform-contraction": {"grid"},
    "bounded-metric": set(),
    "thm3-example1": set(),
    "thm3-example2": set(),
    "flow-compose": set(),
    "flow-limit": set(),
}

_CLAIMS = {
    "ges-check": "unforced trajectories decay at rate 1/2 and f(r) <= -r/2 on [0, 50]",
    "circle-orbit": "the circle of radius r_star is an exact periodic trajectory of the forced system",
    "divergence": "a start just inside the forced orbit moves away from it and never returns",
    "entrainment-linear": "x' = -x + sin t entrains with return-map fixed point -1/2",
    "metric-certify": "the oscillatory scalar system contracts in its stock metric at rate 1/3",
    "metric-violate": "constant input 27/16 breaks the scalar metric certificate near x = 4*sqrt(2*pi)",
    "uniform-contraction": "x' = -x + u contracts uniformly over |u| <= 1 in the non-constant bump metric",
    "bounded-metric": "a non-constant metric certifies contraction for all inputs bounded by 1",
    "thm3-example1": "the diagonal 3-D example satisfies both constancy-forcing conditions",
    "thm3-example2": "the additive simplex example satisfies both constancy-forcing conditions",
    "flow-compose": "flow maps compose along concatenated signals and commute with time shifts",
    "flow-limit": "schedule contraction passes to the limit signal through dyadic refinement",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(64)


def _interval(text: str):
    try:
        lo, hi = text.split(":")
        return float(lo), float(hi)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from exc


def _grid_axis(text: str):
    try:
        lo, hi, count = text.split(":")
        return float(lo), float(hi), int(count)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected LO:HI:COUNT, got {text!r}") from exc


def _build_parser() -> _Parser:
    parser = _Parser(prog="contraction-lab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_rstar = sub.add_parser("find-rstar", help="certify the critical forcing radius")
    p_rstar.add_argument("--interval", type=_interval, default=(0.1, 4.0))
    p_rstar.add_argument("--tol", type=float, default=1e-13)
    p_rstar.add_argument("--out", default=None)
    p_rstar.add_argument("--format", choices=("json", "csv", "both"), default="json")

    p_run = sub.add_parser("run", help="run a named experiment")
    p_run.add_argument("experiment", choices=EXPERIMENTS)
    p_run.add_argument("--grid", type=_grid_axis, action="append", default=None)
    p_run.add_argument("--tol", type=float, default=None)
    p_run.add_argument("--horizon", type=float, default=None)
    p_run.add_argument("--periods", type=int, default=None)
    p_run.add_argument("--rate", type=float, default=None)
    p_run.add_argument("--delta", type=float, default=None)
    p_run.add_argument("--out", default="out")
    p_run.add_argument("--format", choices=("json", "csv", "both"), default="json")
    p_run.add_argument("--seed", type=int, default=0)

    p_rep = sub.add_parser("report", help="summarize experiment outputs")
    p_rep.add_argument("dir", nargs="?", default="out")
    return parser


def _reject_unknown_params(parser, args) -> None:
    allowed = _ALLOWED_FLAGS[args.experiment]
    for flag in ("grid", "tol", "horizon", "periods", "rate", "delta"):
        if getattr(args, flag) is not None and flag not in allowed:
            parser.error(f"experiment {args.experiment!r} does not take --{flag}")


def _rstar_value() -> float:
    return counterexample.find_r_star().r_star


def _exp_ges_check(args):
    rate = 0.5 if args.rate is None else args.rate
    horizon = 20.0 if args.horizon is None else args.horizon
    ics = counterexample.random_initial_conditions(100, 10.0, seed=args.seed)
    cert = counterexample.verify_ges(ics, horizon, rate)
    payload = {"rate": rate, "horizon": horizon, "certificate": cert.to_dict()}
    return bool(cert.holds), payload, []


def _exp_circle_orbit(args):
    tol = 1e-10 if args.tol is None else args.tol
    residual = counterexample.circle_orbit_residual(_rstar_value(), 1000)
    return residual <= tol, {"residual": residual, "tolerance": tol, "samples": 1000}, []


def _exp_divergence(args):
    delta = 0.1 if args.delta is None else args.delta
    periods = 10 if args.periods is None else args.periods
    r_star = _rstar_value()
    report = entrainment.counterexample_divergence(r_star, delta, periods)
    field, signal = counterexample.build_counterexample(r_star)
    verdict = entrainment.detect_entrainment(
        field, signal, [[r_star, 0.0], [r_star - delta, 0.0]], max_iterations=50, tol=1e-8
    )
    confirmed = (
        report.grew
        and report.distances[1] > report.distances[0]
        and report.monotone_prefix >= min(3, periods)
        and verdict.status == entrainment.DIVERGES
    )
    payload = {
        "divergence": report.to_dict(),
        "verdict": verdict.status,
        "verdict_iterations": verdict.iterations,
    }
    csvs = [
        ("divergence_perturbed.csv", lambda path: report.export_csv(path, os.devnull)),
        ("divergence_orbit.csv", lambda path: report.export_csv(os.devnull, path)),
    ]
    return confirmed, payload, csvs


def _exp_entrainment_linear(args):
    tol = 1e-8 if args.tol is None else args.tol
    field = VectorField(lambda x, u: -x + u, 1, 1, jacobian=lambda x, u: np.array([[-1.0]]))
    signal = PeriodicInput(2 * np.pi, lambda t: [np.sin(t)])
    verdict = entrainment.detect_entrainment(field, signal, [[-10.0], [0.0], [10.0]], 50, tol)
    confirmed = verdict.status == entrainment.ENTRAINS and abs(verdict.orbit_sample[0] + 0.5) <= 1e-8
    payload = {
        "verdict": verdict.status,
        "fixed_point": None if verdict.orbit_sample is None else float(verdict.orbit_sample[0]),
        "iterations": verdict.iterations,
    }
    return confirmed, payload, []


def _default_grid(args, lo, hi, count):
    if args.grid:
        g = args.grid[0]
        return (g[0], g[1]), g[2]
    return (lo, hi), count


def _exp_metric_certify(args):
    field, metric = contraction.scalar_example_system()
    region, count = _default_grid(args, -20.0, 20.0, 40001)
    cert = contraction.check_contraction_region(field, metric, region, count, 1.0 / 3.0, [0.0])
    xs = np.linspace(region[0], region[1], 10001)
    lhs = contraction.scalar_metric_derivative(xs) * (0.5 * xs * np.sin(xs * xs) - xs) + 2 * (
        0.5 * np.sin(xs * xs) + xs * xs * np.cos(xs * xs) - 1.0
    ) * contraction.scalar_metric(xs)
    rhs = 4.0 / (np.sin(xs * xs) - 2.0)
    identity_err = float(np.max(np.abs(lhs - rhs) / np.abs(rhs)))
    confirmed = cert.holds and identity_err <= 1e-9
    return confirmed, {"certificate": cert.to_dict(), "identity_max_rel_err": identity_err}, []


def _exp_metric_violate(args):
    field, metric = contraction.scalar_example_system()
    c = 27.0 / 16.0
    x0 = 4.0 * np.sqrt(2.0 * np.pi)
    direct = contraction.contraction_matrix(field, metric, [x0], [c])[0, 0]
    closed = -2.0 + 13.5 * np.sqrt(2.0 * np.pi)
    region, count = _default_grid(args, -20.0, 20.0, 40001)
    wide = contraction.check_contraction_region(field, metric, region, count, 1.0 / 3.0, [c])
    spacing = 1e-3
    window = contraction.check_contraction_region(
        field, metric, (x0 - 20 * spacing, x0 + spacing), 22, 1.0 / 3.0, [c]
    )
    witness_x = window.witness["x"][0]
    confirmed = (
        abs(direct - closed) <= 1e-9
        and not wide.holds
        and not window.holds
        and abs(witness_x - x0) <= spacing
    )
    payload = {
        "closed_form_value": closed,
        "direct_value": float(direct),
        "wide_certificate": wide.to_dict(),
        "window_certificate": window.to_dict(),
        "paper_point": x0,
    }
    return confirmed, payload, []


def _exp_uniform_contraction(args):
    m, m_cert = contraction.bounded_metric_m_parameter(1.0)
    metric = contraction.bounded_example_metric(m)
    field = contraction.linear_additive_field(1)
    half_width = 10.0 * np.sqrt(m)
    region, count = _default_grid(args, -half_width, half_width, 2001)
    cert = contraction.check_uniform_contraction(field, metric, (-1.0, 1.0), 5, region, count, 1.0)
    payload = {"m": m, "bound_certificate": m_cert.to_dict(), "certificate": cert.to_dict()}
    return bool(cert.holds), payload, []


def _exp_bounded_metric(args):
    m, cert = contraction.bounded_metric_m_parameter(1.0)
    metric = contraction.bounded_example_metric(m)
    grad = metric.grad([np.sqrt(m)])[0, 0, 0]
    confirmed = cert.holds and abs(grad) > 1e-3
    payload = {"m": m, "certificate": cert.to_dict(), "gradient_at_sqrt_m": float(grad)}
    return confirmed, payload, []


def _thm3_common(field, family, directions):
    inradius = constant_metric.polytope_inradius(directions)
    report = constant_metric.check_constant_metric_conditions(
        field, family, [[0.0, 0.0, 0.0], [0.05, -0.05, 0.05]], inradius / 2.0
    )
    payload = {"inradius": inradius, "rho": inradius / 2.0, "report": report.to_dict()}
    return report.certified, payload, []


def _exp_thm3_example1(args):
    field, family = constant_metric.example_3d_system()
    dirs = np.array([[1.0, 0, 0], [0, 1.0, 0], [0, 0, 1.0], [-1.0, -1.0, -1.0] / np.sqrt(3)])
    return _thm3_common(field, family, dirs)


def _exp_thm3_example2(args):
    field, family = constant_metric.example_additive_3d()
    return _thm3_common(field, family, constant_metric.simplex_directions(3))


def _exp_flow_compose(args):
    field = counterexample.circle_field()
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for _ in range(5):
        t1 = float(rng.uniform(0.0, 2.0))
        t2 = t1 + float(rng.uniform(0.3, 1.5))
        t3 = t2 + float(rng.uniform(0.3, 1.5))
        x0 = rng.uniform(-2.0, 2.0, size=2)
        a1, a2 = rng.uniform(0.2, 1.5, size=2)
        u = PeriodicInput(2 * np.pi, lambda t, a=a1: [a * np.sin(t), a * np.cos(t)])
        v = PeriodicInput(2 * np.pi, lambda t, a=a2: [a * np.cos(2 * t), 0.0])
        # flow property: one un-segmented run against a restart at t2
        stopover = integrate(field, u, x0, (t1, t2)).final_state
        via = integrate(field, u, stopover, (t2, t3)).final_state
        direct = integrate(field, u, x0, (t1, t3)).final_state
        worst = max(worst, float(np.linalg.norm(via - direct)))
        # concatenation: switching to v at t2 equals running the glued signal
        via_v = integrate(field, v, stopover, (t2, t3)).final_state
        glued = integrate(field, concat(u, v, t2), x0, (t1, t3)).final_state
        worst = max(worst, float(np.linalg.norm(via_v - glued)))
        shift = float(rng.uniform(-3.0, 3.0))
        shifted = integrate(field, shift_signal(u, shift), x0, (t1 - shift, t2 - shift)).final_state
        worst = max(worst, float(np.linalg.norm(shifted - stopover)))
    return worst <= 1e-7, {"max_deviation": worst, "tolerance": 1e-7}, []


def _exp_flow_limit(args):
    flow = flowspace.flow_from_field(contraction.linear_additive_field(1))
    target = PeriodicInput(2 * np.pi, lambda t: [float(np.clip(np.sin(t), -1.0, 1.0))])
    cert = flowspace.check_limit_contraction(
        flow, (-1.0, 1.0), -1.0, target, 8, [([-2.0], [2.0]), ([0.5], [1.5])], (0.0, 2 * np.pi)
    )
    gaps = cert.grid_spec["cauchy_gaps"]
    halving = all(gaps[i + 1] <= 0.625 * gaps[i] for i in range(1, len(gaps) - 1))
    return bool(cert.holds and halving), {"certificate": cert.to_dict()}, []


_RUNNERS = {
    "ges-check": _exp_ges_check,
    "circle-orbit": _exp_circle_orbit,
    "divergence": _exp_divergence,
    "entrainment-linear": _exp_entrainment_linear,
    "metric-certify": _exp_metric_certify,
    "metric-violate": _exp_metric_violate,
    "uniform-contraction": _exp_uniform_contraction,
    "bounded-metric": _exp_bounded_metric,
    "thm3-example1": _exp_thm3_example1,
    "thm3-example2": _exp_thm3_example2,
    "flow-compose": _exp_flow_compose,
    "flow-limit": _exp_flow_limit,
}


def _write_artifact(out_dir: str, name: str, doc: dict, fmt: str, csvs) -> None:
    os.makedirs(out_dir, exist_ok=True)
    if fmt in ("json", "both"):
        path = os.path.join(out_dir, f"{name}.json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(dumps_fixed(doc))
            fh.write("\n")
    if fmt in ("csv", "both"):
        for filename, writer in csvs:
            writer(os.path.join(out_dir, filename))


def _cmd_find_rstar(args) -> int:
    try:
        cert = counterexample.find_r_star(args.interval, args.tol)
    except NoRootFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(cert.to_json())
    doc = {
        "experiment": "find-rstar",
        "claim": "a strict local maximizer of the radial drift exists in the interval",
        "confirmed": True,
        "certificate": cert.to_dict(),
    }
    if args.out:
        _write_artifact(args.out, "find-rstar", doc, "json", [])
    try:
        cert.validate()
    except ValueError as exc:
        print(f"certificate invariants violated: {exc}", file=sys.stderr)
        return 1
    return 0


def _cmd_run(parser, args) -> int:
    _reject_unknown_params(parser, args)
    try:
        confirmed, payload, csvs = _RUNNERS[args.experiment](args)
    except ContractionLabError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    doc = {
        "experiment": args.experiment,
        "claim": _CLAIMS[args.experiment],
        "confirmed": bool(confirmed),
        "seed": args.seed,
    }
    doc.update(payload)
    _write_artifact(args.out, args.experiment, doc, args.format, csvs)
    status = "confirmed" if confirmed else "REFUTED"
    print(f"{args.experiment}: {status} -- {_CLAIMS[args.experiment]}")
    return 0 if confirmed else 1


def _cmd_report(args) -> int:
    if not os.path.isdir(args.dir):
        print(f"error: {args.dir} is not a directory", file=sys.stderr)
        return 2
    rows = []
    for name in sorted(os.listdir(args.dir)):
        if not name.endswith(".json"):
            continue
        path = os.path.join(args.dir, name)
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
            experiment = doc["experiment"]
            claim = doc["claim"]
            confirmed = doc["confirmed"]
        except (json.JSONDecodeError, KeyError, UnicodeDecodeError, OSError) as exc:
            print(f"error: unreadable output {path}: {exc}", file=sys.stderr)
            return 2
        rows.append((experiment, "pass" if confirmed else "FAIL", claim))
    width = max((len(r[0]) for r in rows), default=10)
    print(f"{'experiment':<{width}}  verdict  claim")
    for experiment, verdict, claim in rows:
        print(f"{experiment:<{width}}  {verdict:<7}  {claim}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "find-rstar":
            return _cmd_find_rstar(args)
        if args.command == "run":
            return _cmd_run(parser, args)
        return _cmd_report(args)
    except SystemExit as exc:  # argparse errors raised during command handling
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
