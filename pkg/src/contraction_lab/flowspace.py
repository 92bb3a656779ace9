"""Flow maps on a metric space: composition, schedules, and limits.

The objects here realize the abstract picture behind uniform contraction
under switched inputs: a flow map phi(signal, t1, t2) acting on R^n with a
pluggable distance, piecewise-constant schedules whose per-piece contraction
factors multiply to exp(lambda*(t2-t1)) exactly, and dyadic refinement of a
continuous signal by schedules, under which the contraction property passes
to the limit.

Rate convention: ``lam`` is the distance-level exponential rate (distances
shrink like exp(lam*t)).  Matrix-level certificates from the contraction
module live at the squared-distance level, so a matrix margin beta
corresponds to lam = -beta/2 here; the conversion is asserted by a
cross-module test.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .certificates import Certificate
from .dynamics import (
    IntegratorConfig,
    InputSignal,
    PiecewiseConstantInput,
    VectorField,
    integrate,
)
from .errors import ApproximationNotConvergingError

__all__ = [
    "FlowMap",
    "flow_from_field",
    "PiecewiseSchedule",
    "schedule_contraction_factor",
    "check_piecewise_contraction",
    "check_limit_contraction",
]


def _euclidean(x, y) -> float:
    return float(np.linalg.norm(np.asarray(x, dtype=float) - np.asarray(y, dtype=float)))


class FlowMap:
    """Mapping (signal, t1, t2, point) -> point on R^n with a distance d.

    Satisfies the composition law numerically: applying over [t1, t2] and
    then [t2, t3] equals applying the concatenation at t2 over [t1, t3],
    within integrator tolerance.
    """

    def __init__(self, apply_fn, distance=None, name: str = ""):
        self._apply = apply_fn
        self.distance = distance or _euclidean
        self.name = name

    def apply(self, signal: InputSignal, t1: float, t2: float, point) -> np.ndarray:
        return np.atleast_1d(np.asarray(self._apply(signal, float(t1), float(t2), point), dtype=float))


def flow_from_field(field: VectorField, config: IntegratorConfig | None = None, distance=None) -> FlowMap:
    """The ODE solution operator of ``field`` as a FlowMap."""

    def apply_fn(signal, t1, t2, point):
        if not t2 > t1:
            raise ValueError("flow application requires t2 > t1")
        return integrate(field, signal, point, (t1, t2), config).final_state

    return FlowMap(apply_fn, distance=distance, name=field.name or "ode flow")


@dataclass(frozen=True)
class PiecewiseSchedule:
    """Constant values c_i held for fractions alpha_i of the span [t1, t2].

    Fractions must be positive and sum to 1 within 1e-12; they are
    renormalized exactly so the product of per-piece contraction factors
    telescopes to the full-span factor at machine precision.
    """

    values: np.ndarray
    fractions: np.ndarray
    t1: float
    t2: float

    def __init__(self, values, fractions, t1: float, t2: float):
        vals = np.asarray(values, dtype=float)
        if vals.ndim == 1:
            vals = vals[:, None]
        fracs = np.asarray(fractions, dtype=float)
        if len(fracs) != vals.shape[0] or len(fracs) == 0:
            raise ValueError("need one fraction per value")
        if np.any(fracs <= 0):
            raise ValueError("fractions must be positive")
        total = float(np.sum(fracs))
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"fractions sum to {total}, expected 1 within 1e-12")
        if not t2 > t1:
            raise ValueError("span must satisfy t2 > t1")
        object.__setattr__(self, "values", vals.copy())
        object.__setattr__(self, "fractions", fracs / total)
        object.__setattr__(self, "t1", float(t1))
        object.__setattr__(self, "t2", float(t2))

    @property
    def span(self) -> float:
        return self.t2 - self.t1

    def piece_count(self) -> int:
        return self.values.shape[0]

    def as_signal(self) -> PiecewiseConstantInput:
        cuts = self.t1 + np.cumsum(self.fractions)[:-1] * self.span
        return PiecewiseConstantInput(cuts, self.values)

    def values_within(self, box) -> bool:
        box = np.atleast_2d(np.asarray(box, dtype=float)).reshape(-1, 2)
        lo, hi = box[:, 0], box[:, 1]
        return bool(np.all(self.values >= lo - 1e-12) and np.all(self.values <= hi + 1e-12))


def schedule_contraction_factor(lam: float, schedule: PiecewiseSchedule) -> float:
    """Product of per-piece factors exp(lam * alpha_i * span).

    Telescopes to exp(lam * span) exactly; the identity is asserted to
    1e-14 relative before returning.
    """
    span = schedule.span
    product = float(np.prod(np.exp(lam * schedule.fractions * span)))
    whole = float(np.exp(lam * span))
    if abs(product - whole) > 1e-14 * abs(whole):
        raise AssertionError(
            f"factor product {product!r} deviates from exp(lam*span) {whole!r} beyond 1e-14 relative"
        )
    return product


def check_piecewise_contraction(
    flow: FlowMap,
    box,
    lam: float,
    schedule: PiecewiseSchedule,
    point_pairs,
) -> Certificate:
    """Verify d(phi x, phi y) <= exp(lam*span) d(x, y) for a schedule.

    ``lam`` must be a certified per-constant-input rate for inputs in
    ``box`` (for instance from a uniform contraction certificate); every
    schedule value must lie in the box.  The certificate margin is the
    worst observed ratio d(phi x, phi y) / d(x, y).
    """
    if not schedule.values_within(box):
        raise ValueError("schedule values leave the declared input box")
    point_pairs = list(point_pairs)
    if not any(flow.distance(x, y) > 0 for x, y in point_pairs):
        raise ValueError("need at least one pair of distinct points")
    signal = schedule.as_signal()
    bound = float(np.exp(lam * schedule.span)) * (1.0 + 1e-6)
    worst = -np.inf
    witness = None
    for x, y in point_pairs:
        d0 = flow.distance(x, y)
        if d0 == 0:
            continue
        x1 = flow.apply(signal, schedule.t1, schedule.t2, x)
        y1 = flow.apply(signal, schedule.t1, schedule.t2, y)
        ratio = flow.distance(x1, y1) / d0
        if ratio > worst:
            worst = ratio
            witness = {"x": [float(v) for v in np.atleast_1d(x)], "y": [float(v) for v in np.atleast_1d(y)]}
    return Certificate(
        holds=bool(worst <= bound),
        margin=float(worst),
        witness=witness,
        grid_spec={
            "pieces": schedule.piece_count(),
            "span": [schedule.t1, schedule.t2],
            "lam": float(lam),
            "bound": bound,
        },
    )


def _dyadic_schedule(signal: InputSignal, level: int, t1: float, t2: float) -> PiecewiseSchedule:
    pieces = 2**level
    h = (t2 - t1) / pieces
    mids = t1 + (np.arange(pieces) + 0.5) * h
    values = np.stack([np.atleast_1d(signal.eval(t)) for t in mids], axis=0)
    return PiecewiseSchedule(values, np.full(pieces, 1.0 / pieces), t1, t2)


def check_limit_contraction(
    flow: FlowMap,
    box,
    lam: float,
    target_signal: InputSignal,
    refinement_levels: int,
    point_pairs,
    t_span,
) -> Certificate:
    """Pass the contraction property through piecewise-constant limits.

    Builds dyadic approximants of ``target_signal`` (level l: 2^l equal
    pieces, each holding the signal's midpoint value), checks that every
    approximant contracts point pairs at rate ``lam``, that the flow
    outputs are Cauchy across levels with gaps at least halving, and
    finally that the flow under the target signal itself contracts at rate
    ``lam`` with relative slack 1e-4.
    """
    t1, t2 = float(t_span[0]), float(t_span[1])
    if not t2 > t1:
        raise ValueError("t_span must satisfy t2 > t1")
    if refinement_levels < 1:
        raise ValueError("need at least one refinement level")
    box_arr = np.atleast_2d(np.asarray(box, dtype=float)).reshape(-1, 2)
    probes = np.linspace(t1, t2, 4 * 2**refinement_levels + 1)
    for t in probes:
        v = np.atleast_1d(target_signal.eval(t))
        if np.any(v < box_arr[:, 0] - 1e-12) or np.any(v > box_arr[:, 1] + 1e-12):
            raise ValueError(f"target signal leaves the input box at t={t}")

    points = []
    for x, y in point_pairs:
        points.append(np.atleast_1d(np.asarray(x, dtype=float)))
        points.append(np.atleast_1d(np.asarray(y, dtype=float)))
    if not any(
        flow.distance(points[i], points[i + 1]) > 0 for i in range(0, len(points), 2)
    ):
        raise ValueError("need at least one pair of distinct points")

    span = t2 - t1
    bound_approx = float(np.exp(lam * span)) * (1.0 + 1e-6)
    outputs = []
    worst_approx = -np.inf
    for level in range(refinement_levels + 1):
        signal = _dyadic_schedule(target_signal, level, t1, t2).as_signal()
        outs = [flow.apply(signal, t1, t2, p) for p in points]
        outputs.append(outs)
        for i in range(0, len(outs), 2):
            d0 = flow.distance(points[i], points[i + 1])
            if d0 == 0:
                continue
            worst_approx = max(worst_approx, flow.distance(outs[i], outs[i + 1]) / d0)
    gaps = []
    for level in range(refinement_levels):
        gap = max(flow.distance(a, b) for a, b in zip(outputs[level], outputs[level + 1]))
        gaps.append(float(gap))
    for level in range(1, refinement_levels):
        if gaps[level] > 0.625 * gaps[level - 1] and gaps[level] > 1e-9:
            raise ApproximationNotConvergingError(
                f"Cauchy gap {gaps[level]:.3e} at level {level + 1} fails to halve "
                f"(previous {gaps[level - 1]:.3e})"
            )

    target_outs = [flow.apply(target_signal, t1, t2, p) for p in points]
    tail = max(flow.distance(a, b) for a, b in zip(outputs[-1], target_outs))
    if tail > max(2.0 * gaps[-1], 1e-8):
        raise ApproximationNotConvergingError(
            f"approximant outputs stop {tail:.3e} away from the target flow "
            f"(last Cauchy gap {gaps[-1]:.3e})"
        )

    bound_target = float(np.exp(lam * span))
    worst_target = -np.inf
    witness = None
    for i in range(0, len(points), 2):
        d0 = flow.distance(points[i], points[i + 1])
        if d0 == 0:
            continue
        ratio = flow.distance(target_outs[i], target_outs[i + 1]) / d0
        if ratio > worst_target:
            worst_target = ratio
            witness = {
                "x": [float(v) for v in points[i]],
                "y": [float(v) for v in points[i + 1]],
            }
    holds = worst_approx <= bound_approx and worst_target <= bound_target * (1.0 + 1e-4)
    return Certificate(
        holds=bool(holds),
        margin=float(worst_target),
        witness=witness,
        grid_spec={
            "refinement_levels": int(refinement_levels),
            "cauchy_gaps": gaps,
            "tail_gap": float(tail),
            "span": [t1, t2],
            "lam": float(lam),
        },
        note="margin is the worst pairwise ratio under the target signal",
    )
