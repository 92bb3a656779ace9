"""Period-map machinery: return maps, entrainment verdicts, divergence runs.

A system forced by a T-periodic input entrains exactly when the time-T
return map has a unique globally attracting fixed point, so verdicts are
computed from return-map iterates: convergence of every tested sequence to
a common limit is an entrainment certificate, while a pair of iterate
sequences whose mutual distance doubles from its running minimum certifies
divergence.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .certificates import dumps_fixed, format_float
from .counterexample import build_counterexample
from .dynamics import IntegratorConfig, PeriodicInput, Trajectory, VectorField, integrate

__all__ = [
    "EntrainmentVerdict",
    "poincare_map",
    "detect_entrainment",
    "DivergenceReport",
    "counterexample_divergence",
]

ENTRAINS = "entrains"
DIVERGES = "diverges"
INCONCLUSIVE = "inconclusive"

_MONOTONE_SLACK = 1e-8


@dataclass
class EntrainmentVerdict:
    """Outcome of iterating the return map from a set of initial conditions.

    status       -- "entrains" | "diverges" | "inconclusive"
    orbit_sample -- phase-0 point of the detected limit cycle (entrains only)
    witness_pair -- indices of initial conditions whose iterate distance
                    doubled from its minimum (diverges only)
    iterates     -- per-initial-condition list of return-map values
    iterations   -- number of return-map applications performed
    """

    status: str
    orbit_sample: np.ndarray | None = None
    witness_pair: tuple[int, int] | None = None
    iterates: list = dataclass_field(default_factory=list)
    iterations: int = 0

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "orbit_sample": None if self.orbit_sample is None else [float(v) for v in self.orbit_sample],
            "witness_pair": None if self.witness_pair is None else list(self.witness_pair),
            "iterations": self.iterations,
            "iterates": [[[float(v) for v in state] for state in seq] for seq in self.iterates],
        }

    def to_json(self) -> str:
        return dumps_fixed(self.to_dict())


def poincare_map(field: VectorField, signal: PeriodicInput, x0, config: IntegratorConfig | None = None) -> np.ndarray:
    """State reached at time T from x0 at time 0 under the periodic input."""
    if not isinstance(signal, PeriodicInput):
        raise TypeError("poincare_map requires a periodic input signal")
    traj = integrate(field, signal, x0, (0.0, signal.period), config)
    return traj.final_state


def detect_entrainment(
    field: VectorField,
    signal: PeriodicInput,
    initial_set,
    max_iterations: int = 50,
    tol: float = 1e-8,
    config: IntegratorConfig | None = None,
) -> EntrainmentVerdict:
    """Classify return-map behaviour from several initial conditions.

    Entrains: every iterate sequence's successive-difference norm falls
    below ``tol`` and all sequences agree pairwise within 10*tol.
    Diverges: some pair's iterate distance grows to twice its running
    minimum (minima below ``tol`` are treated as merged and do not arm the
    divergence trigger).  Anything else after ``max_iterations`` returns
    inconclusive.
    """
    initial = [np.atleast_1d(np.asarray(x, dtype=float)) for x in initial_set]
    if len(initial) < 2:
        raise ValueError("need at least two initial conditions")
    current = [x.copy() for x in initial]
    iterates = [[x.copy()] for x in initial]
    pairs = [(i, j) for i in range(len(initial)) for j in range(i + 1, len(initial))]
    min_dist = {p: float(np.linalg.norm(current[p[0]] - current[p[1]])) for p in pairs}

    for it in range(1, max_iterations + 1):
        prev = current
        current = [poincare_map(field, signal, x, config) for x in prev]
        for x, seq in zip(current, iterates):
            seq.append(x.copy())
        for i, j in pairs:
            d = float(np.linalg.norm(current[i] - current[j]))
            floor = max(min_dist[(i, j)], tol)
            if d >= 2.0 * floor and min_dist[(i, j)] > 0:
                return EntrainmentVerdict(DIVERGES, witness_pair=(i, j), iterates=iterates, iterations=it)
            min_dist[(i, j)] = min(min_dist[(i, j)], d)
        diffs = [float(np.linalg.norm(c - p)) for c, p in zip(current, prev)]
        if max(diffs) < tol:
            spread = max(float(np.linalg.norm(current[i] - current[j])) for i, j in pairs)
            if spread <= 10.0 * tol:
                limit = np.mean(np.stack(current, axis=0), axis=0)
                return EntrainmentVerdict(ENTRAINS, orbit_sample=limit, iterates=iterates, iterations=it)
    return EntrainmentVerdict(INCONCLUSIVE, iterates=iterates, iterations=max_iterations)


@dataclass
class DivergenceReport:
    """Distance-from-orbit record for a perturbed initial condition.

    distances[k] = | ||x(2 pi k)|| - r_star |.  The escape from the orbit is
    monotone in exact arithmetic for as long as the radius stays in the band
    where the radial drift is below its value at r_star; once the increments
    shrink under the integrator noise floor the comparison uses a 1e-8
    slack, recorded as ``monotone_prefix``.  The perturbed trajectory and
    the on-orbit reference are retained for CSV export.
    """

    r_star: float
    delta: float
    periods: int
    distances: list[float]
    monotone_prefix: int
    grew: bool
    trajectory: Trajectory
    orbit_trajectory: Trajectory

    def to_dict(self) -> dict:
        return {
            "r_star": self.r_star,
            "delta": self.delta,
            "periods": self.periods,
            "distances": [float(d) for d in self.distances],
            "monotone_prefix": self.monotone_prefix,
            "grew": self.grew,
        }

    def to_json(self) -> str:
        return dumps_fixed(self.to_dict())

    def export_csv(self, perturbed_path, orbit_path) -> None:
        """Write both trajectories as `t,x,y,r` rows for external plotting."""
        for path, traj in ((perturbed_path, self.trajectory), (orbit_path, self.orbit_trajectory)):
            with open(path, "w", encoding="utf-8") as fh:
                fh.write("t,x,y,r\n")
                for t, state in zip(traj.times, traj.states):
                    r = float(np.linalg.norm(state))
                    fh.write(
                        ",".join(format_float(v) for v in (t, state[0], state[1], r)) + "\n"
                    )


def counterexample_divergence(
    r_star: float,
    delta: float,
    n_periods: int,
    config: IntegratorConfig | None = None,
) -> DivergenceReport:
    """Track the distance from the forced circular orbit for a perturbed start.

    Integrates from (r_star - delta, 0) under the rotating input for
    ``n_periods`` periods and reports d_k = | ||x(2 pi k)|| - r_star |.
    While the radius stays in the band where the radial drift is below its
    value at r_star, d_k is necessarily nondecreasing; the report records
    the observed strictly-monotone prefix and whether d_n > d_0.
    """
    if not 0 <= delta < r_star:
        raise ValueError("delta must satisfy 0 <= delta < r_star")
    if n_periods < 1:
        raise ValueError("need at least one period")
    field, signal = build_counterexample(r_star)
    two_pi = 2.0 * np.pi
    horizon = n_periods * two_pi
    traj = integrate(field, signal, [r_star - delta, 0.0], (0.0, horizon), config)
    orbit = integrate(field, signal, [r_star, 0.0], (0.0, horizon), config)
    marks = np.arange(n_periods + 1) * two_pi
    states = traj.dense_eval(marks)
    distances = [abs(float(np.linalg.norm(s)) - r_star) for s in states]
    prefix = 0
    while prefix < n_periods and distances[prefix + 1] > distances[prefix] - _MONOTONE_SLACK:
        prefix += 1
    return DivergenceReport(
        r_star=float(r_star),
        delta=float(delta),
        periods=int(n_periods),
        distances=distances,
        monotone_prefix=prefix,
        grew=distances[-1] > distances[0],
        trajectory=traj,
        orbit_trajectory=orbit,
    )
