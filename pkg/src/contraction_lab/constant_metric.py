"""Numerical predicates forcing a contraction metric to be constant.

When a system is contractive for each member of suitable families of
constant inputs, any certifying metric must have vanishing gradients.  The
two checkable hypotheses are geometric (the normalized field values at a
point eventually surround the origin: their convex hull contains a fixed
ball) and asymptotic (the ratio of Jacobian norm to field norm vanishes
along each input sequence).  This module evaluates both on user-supplied
sample points and reproduces the stock 3-D examples.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .certificates import dumps_fixed
from .dynamics import VectorField
from .errors import ZeroFieldError
from .linalg import spectral_norm

__all__ = [
    "InputSequenceFamily",
    "hull_contains_ball",
    "jacobian_field_ratio",
    "ConstantMetricReport",
    "check_constant_metric_conditions",
    "example_3d_system",
    "simplex_directions",
    "example_additive_3d",
    "polytope_inradius",
]

DEFAULT_I_LIST = (1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024)
_RATIO_LIMIT = 1e-2
_HALVING_BAND = (0.4, 0.6)  # ratio(2i)/ratio(i) for clean 1/i decay, +-20%


@dataclass(frozen=True)
class InputSequenceFamily:
    """k unbounded sequences of constant inputs u_{i,j}.

    ``generator(i, j)`` returns the j-th sequence's i-th member, for
    i >= 1 and 1 <= j <= k.
    """

    k: int
    generator: object

    def inputs_at(self, i: int) -> list[np.ndarray]:
        if i < 1:
            raise ValueError("sequence index starts at 1")
        return [np.atleast_1d(np.asarray(self.generator(i, j), dtype=float)) for j in range(1, self.k + 1)]


def _directions_1d(count: int) -> np.ndarray:
    return np.array([[1.0], [-1.0]])


def _directions_2d(count: int) -> np.ndarray:
    angles = 2.0 * np.pi * np.arange(count) / count
    return np.column_stack([np.cos(angles), np.sin(angles)])


def _directions_3d(count: int) -> np.ndarray:
    # Fibonacci sphere: deterministic, nearly uniform coverage.
    idx = np.arange(count) + 0.5
    phi = np.arccos(1.0 - 2.0 * idx / count)
    theta = np.pi * (1.0 + np.sqrt(5.0)) * idx
    return np.column_stack(
        [np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)]
    )


def hull_contains_ball(points, rho: float, direction_count: int = 512) -> bool:
    """Support-function test for B(0, rho) inside the convex hull of points.

    The ball lies in conv(points) iff max_p d.p >= rho for every unit
    direction d; the test samples a deterministic low-discrepancy direction
    set (uniform angles in 2-D, Fibonacci sphere in 3-D), so it is exact in
    the dense-direction limit and can only err on the permissive side at
    finite resolution.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    if direction_count < 100:
        raise ValueError("direction_count must be at least 100")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n = pts.shape[1]
    if n == 1:
        dirs = _directions_1d(direction_count)
    elif n == 2:
        dirs = _directions_2d(direction_count)
    elif n == 3:
        dirs = _directions_3d(direction_count)
    else:
        raise ValueError("hull containment is implemented for dimensions 1-3")
    support = np.max(dirs @ pts.T, axis=1)
    return bool(np.all(support >= rho))


def jacobian_field_ratio(field: VectorField, u, x) -> float:
    """||df/dx(x, u)||_2 / ||f(x, u)||_2."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    u = np.atleast_1d(np.asarray(u, dtype=float))
    fval = field(x, u)
    norm = float(np.linalg.norm(fval))
    if norm < 1e-14:
        raise ZeroFieldError(f"field vanishes at x={x.tolist()}, u={u.tolist()}", x=x)
    return spectral_norm(field.jacobian_x(x, u)) / norm


@dataclass
class ConstantMetricReport:
    """Per-(x, i) hull verdicts and ratio values, with aggregate conclusions.

    For each sample point x the report records the smallest index i0 in the
    checked list from which the hull condition holds for every later index
    (None when it never stabilizes), and whether the worst Jacobian-to-field
    ratio decays like 1/i: consecutive doublings must shrink it into the
    [0.4, 0.6] band and the final value must drop below 1e-2.  The largest
    checked index is reported instead of any claim about the limit.
    """

    i_list: list[int]
    rho: float
    entries: list[dict] = dataclass_field(default_factory=list)
    hull_certified_from: list = dataclass_field(default_factory=list)
    ratio_decay_ok: list = dataclass_field(default_factory=list)

    @property
    def largest_checked_index(self) -> int:
        return max(self.i_list)

    @property
    def hull_ok(self) -> bool:
        return all(i0 is not None for i0 in self.hull_certified_from)

    @property
    def ratios_ok(self) -> bool:
        return all(self.ratio_decay_ok)

    @property
    def certified(self) -> bool:
        return self.hull_ok and self.ratios_ok

    def to_dict(self) -> dict:
        return {
            "i_list": list(self.i_list),
            "rho": self.rho,
            "largest_checked_index": self.largest_checked_index,
            "hull_certified_from": self.hull_certified_from,
            "ratio_decay_ok": self.ratio_decay_ok,
            "certified": self.certified,
            "entries": self.entries,
        }

    def to_json(self) -> str:
        return dumps_fixed(self.to_dict())


def check_constant_metric_conditions(
    field: VectorField,
    family: InputSequenceFamily,
    x_samples,
    rho: float,
    i_list=DEFAULT_I_LIST,
    direction_count: int = 512,
) -> ConstantMetricReport:
    """Evaluate both constancy-forcing hypotheses on sample states.

    At each x and index i: (a) the normalized field values over the family
    must contain B(0, rho) in their convex hull, and (b) the worst
    Jacobian-to-field ratio is recorded.  Certification per x requires the
    hull condition to hold from some index onward and the ratios to decay
    like 1/i across the checked doublings.
    """
    i_list = sorted(int(i) for i in i_list)
    if any(i < 1 for i in i_list):
        raise ValueError("indices must be >= 1")
    report = ConstantMetricReport(i_list=list(i_list), rho=float(rho))
    for xi, x in enumerate(x_samples):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        hull_flags = []
        ratios = []
        for i in i_list:
            normalized = []
            worst_ratio = 0.0
            for j, u in enumerate(family.inputs_at(i), start=1):
                try:
                    worst_ratio = max(worst_ratio, jacobian_field_ratio(field, u, x))
                except ZeroFieldError as exc:
                    exc.i = i
                    exc.j = j
                    raise
                fval = field(x, u)
                normalized.append(fval / np.linalg.norm(fval))
            holds = hull_contains_ball(np.stack(normalized), rho, direction_count)
            hull_flags.append(holds)
            ratios.append(worst_ratio)
            report.entries.append(
                {
                    "x": [float(v) for v in x],
                    "i": int(i),
                    "hull_holds": holds,
                    "max_ratio": float(worst_ratio),
                }
            )
        stable_from = None
        for start in range(len(i_list)):
            if all(hull_flags[start:]):
                stable_from = i_list[start]
                break
        report.hull_certified_from.append(stable_from)
        decay = ratios[-1] < _RATIO_LIMIT
        for a, b in zip(ratios[:-1], ratios[1:]):
            q = b / a if a > 0 else np.inf
            if not (_HALVING_BAND[0] <= q <= _HALVING_BAND[1]):
                decay = False
                break
        report.ratio_decay_ok.append(bool(decay))
    return report


def example_3d_system():
    """Diagonal 3-D system x' = -x + B u with the four stock input sequences.

    B has columns e1, e2, e3, -(1,1,1); the j-th sequence is u_{i,j} = i e_j
    in R^4, so the normalized field values approach the four unit vectors
    whose hull surrounds the origin, while ||J||/||f|| = 1/||f|| -> 0.
    """
    bmat = np.array(
        [
            [1.0, 0.0, 0.0, -1.0],
            [0.0, 1.0, 0.0, -1.0],
            [0.0, 0.0, 1.0, -1.0],
        ]
    )
    eye = np.eye(3)
    field = VectorField(
        lambda x, u: -x + bmat @ u,
        3,
        4,
        jacobian=lambda x, u: -eye,
        name="diagonal 3d with 4 input channels",
    )
    family = InputSequenceFamily(k=4, generator=lambda i, j: float(i) * np.eye(4)[j - 1])
    return field, family


def simplex_directions(dim: int = 3) -> np.ndarray:
    """Unit vectors at the vertices of a regular simplex surrounding 0."""
    if dim != 3:
        raise ValueError("only the 3-D regular simplex is provided")
    v = np.array(
        [
            [1.0, 1.0, 1.0],
            [1.0, -1.0, -1.0],
            [-1.0, 1.0, -1.0],
            [-1.0, -1.0, 1.0],
        ]
    )
    return v / np.sqrt(3.0)


def example_additive_3d():
    """Additive system x' = -x + c with simplex-direction input rays c = i v_j."""
    eye = np.eye(3)
    field = VectorField(lambda x, u: -x + u, 3, 3, jacobian=lambda x, u: -eye, name="additive 3d")
    dirs = simplex_directions(3)
    family = InputSequenceFamily(k=4, generator=lambda i, j: float(i) * dirs[j - 1])
    return field, family


def polytope_inradius(vertices) -> float:
    """Distance from the origin to the nearest facet of a 3-D simplex hull.

    Exact for four affinely independent vertices whose hull contains the
    origin; used as the analytic oracle for :func:`hull_contains_ball`.
    """
    pts = np.atleast_2d(np.asarray(vertices, dtype=float))
    if pts.shape != (4, 3):
        raise ValueError("expected four 3-D vertices")
    dists = []
    for drop in range(4):
        tri = np.delete(pts, drop, axis=0)
        normal = np.cross(tri[1] - tri[0], tri[2] - tri[0])
        dists.append(abs(float(normal @ tri[0])) / float(np.linalg.norm(normal)))
    return min(dists)
