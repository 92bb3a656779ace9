"""Riemannian contraction-metric machinery.

A metric M(x) certifies contraction of x' = f(x, c) on a region when
J^T M + M J + Mdot is uniformly negative definite, where J is the state
Jacobian and Mdot has entries grad(M_ij) . f.  This module builds that
matrix, certifies the inequality over grids (optionally uniformly over a
box of constant inputs), searches for constant inputs that destroy
contraction when the metric is non-constant, and constructs the bounded-
input metric M(x) = 1 + exp(-x^2/m) that survives additive inputs from a
bounded set.

All region certificates are grid-based: the certificate records the grid,
and resolution is the caller's precision statement, not a proof of the
continuum claim.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .certificates import Certificate
from .dynamics import VectorField
from .errors import DimensionMismatchError, MetricAppearsConstantError
from .linalg import max_eigenvalue, symmetric_part

__all__ = [
    "RiemannianMetric",
    "contraction_matrix",
    "scalar_metric",
    "scalar_metric_derivative",
    "scalar_example_system",
    "linear_additive_field",
    "bounded_example_metric",
    "check_contraction_region",
    "check_uniform_contraction",
    "ViolatingInput",
    "find_violating_input",
    "bounded_metric_m_parameter",
]

_FD_STEP = 1e-6


class RiemannianMetric:
    """Position-dependent symmetric matrix M(x) with entrywise gradients.

    ``eval_fn``    : x -> (n, n) symmetric matrix
    ``grad_fn``    : x -> (n, n, n) array, entry [i, j] the gradient of M_ij
                     (central finite differences with step 1e-6 when omitted)
    ``lower_bound``: a > 0 with v^T M(x) v >= a ||v||^2, asserted by the caller
    """

    def __init__(self, dim: int, eval_fn, grad_fn=None, lower_bound: float = 1.0, name: str = ""):
        if lower_bound <= 0:
            raise ValueError("uniform lower bound must be positive")
        self.dim = int(dim)
        self._eval = eval_fn
        self._grad = grad_fn
        self.lower_bound = float(lower_bound)
        self.name = name

    def eval(self, x) -> np.ndarray:
        m = np.asarray(self._eval(np.atleast_1d(np.asarray(x, dtype=float))), dtype=float)
        return m.reshape(self.dim, self.dim)

    def grad(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if self._grad is not None:
            return np.asarray(self._grad(x), dtype=float).reshape(self.dim, self.dim, self.dim)
        g = np.empty((self.dim, self.dim, self.dim))
        for k in range(self.dim):
            step = np.zeros(self.dim)
            step[k] = _FD_STEP
            g[:, :, k] = (self.eval(x + step) - self.eval(x - step)) / (2 * _FD_STEP)
        return g

    @classmethod
    def constant(cls, matrix, lower_bound: float | None = None) -> "RiemannianMetric":
        matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        dim = matrix.shape[0]
        if lower_bound is None:
            lower_bound = max_eigenvalue(-symmetric_part(matrix)) * -1.0
        zero = np.zeros((dim, dim, dim))
        return cls(dim, lambda x: matrix, lambda x: zero, lower_bound)

    @classmethod
    def from_scalar(cls, m_fn, m_prime_fn=None, lower_bound: float = 1.0, name: str = "") -> "RiemannianMetric":
        grad_fn = None
        if m_prime_fn is not None:
            grad_fn = lambda x: np.array([[[m_prime_fn(float(x[0]))]]])
        return cls(1, lambda x: np.array([[m_fn(float(x[0]))]]), grad_fn, lower_bound, name)


def contraction_matrix(field: VectorField, metric: RiemannianMetric, x, c) -> np.ndarray:
    """Symmetrized J^T M + M J + Mdot at state x under constant input c."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    c = np.atleast_1d(np.asarray(c, dtype=float))
    if x.shape[0] != field.state_dim or metric.dim != field.state_dim:
        raise DimensionMismatchError(
            f"state dim {x.shape[0]}, field dim {field.state_dim}, metric dim {metric.dim}"
        )
    if c.shape[0] != field.input_dim:
        raise DimensionMismatchError(f"input dim {c.shape[0]}, field expects {field.input_dim}")
    jac = field.jacobian_x(x, c)
    m = metric.eval(x)
    mdot = metric.grad(x) @ field(x, c)
    return symmetric_part(jac.T @ m + m @ jac + mdot)


def scalar_metric(x):
    """m(x) = 1/(sin(x^2)/2 - 1)^2; bounded within (4/9, 4]."""
    x = np.asarray(x, dtype=float)
    out = 1.0 / (0.5 * np.sin(x * x) - 1.0) ** 2
    return float(out) if out.ndim == 0 else out


def scalar_metric_derivative(x):
    """m'(x) = 16 x cos(x^2) / (2 - sin(x^2))^3."""
    x = np.asarray(x, dtype=float)
    out = 16.0 * x * np.cos(x * x) / (2.0 - np.sin(x * x)) ** 3
    return float(out) if out.ndim == 0 else out


def scalar_example_system():
    """1-D additive system x' = x sin(x^2)/2 - x + u with its stock metric.

    The metric certifies contraction of the unforced dynamics at rate 1/3
    but is destroyed by suitable constant inputs; see
    :func:`check_contraction_region` and :func:`find_violating_input`.
    """
    field = VectorField(
        lambda x, u: 0.5 * x * np.sin(x * x) - x + u,
        1,
        1,
        jacobian=lambda x, u: np.array([[0.5 * np.sin(x[0] * x[0]) + x[0] * x[0] * np.cos(x[0] * x[0]) - 1.0]]),
        name="scalar oscillatory-drift system",
    )
    metric = RiemannianMetric.from_scalar(
        scalar_metric, scalar_metric_derivative, lower_bound=4.0 / 9.0, name="inverse-square drift metric"
    )
    return field, metric


def linear_additive_field(dim: int = 1) -> VectorField:
    """x' = -x + u in the given dimension."""
    eye = np.eye(dim)
    return VectorField(lambda x, u: -x + u, dim, dim, jacobian=lambda x, u: -eye, name="linear additive")


def _axes(region, resolution):
    region = np.atleast_2d(np.asarray(region, dtype=float))
    if region.shape == (1, 2) or region.ndim == 1:
        region = region.reshape(-1, 2)
    counts = np.atleast_1d(np.asarray(resolution, dtype=int))
    if counts.shape[0] == 1 and region.shape[0] > 1:
        counts = np.repeat(counts, region.shape[0])
    if counts.shape[0] != region.shape[0]:
        raise ValueError("resolution must give one count per region axis")
    if np.any(counts < 1):
        raise ValueError("resolution counts must be >= 1")
    axes = []
    for (lo, hi), n in zip(region, counts):
        if hi < lo:
            raise ValueError("region bounds must satisfy lo <= hi")
        axes.append(np.linspace(lo, hi, int(n)) if n > 1 else np.array([(lo + hi) / 2.0]))
    return region, counts, axes


def _grid_points(axes):
    if len(axes) == 1:
        for v in axes[0]:
            yield np.array([v])
        return
    mesh = np.meshgrid(*axes, indexing="ij")
    stacked = np.stack([m.ravel() for m in mesh], axis=-1)
    for row in stacked:
        yield row


def check_contraction_region(
    field: VectorField,
    metric: RiemannianMetric,
    region,
    resolution,
    beta: float,
    c,
) -> Certificate:
    """Evaluate lambda_max(contraction matrix + beta*M) on a state grid.

    Holds iff the value is <= 0 at every grid point; the margin is the
    largest value seen and the witness the first grid point attaining it.
    """
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    region, counts, axes = _axes(region, resolution)
    if region.shape[0] != field.state_dim:
        raise DimensionMismatchError("region dimension must match the state dimension")
    c = np.atleast_1d(np.asarray(c, dtype=float))
    worst = -np.inf
    witness_x = None
    for x in _grid_points(axes):
        m = metric.eval(x)
        val = max_eigenvalue(contraction_matrix(field, metric, x, c) + beta * m)
        if val > worst:
            worst = val
            witness_x = x.copy()
    return Certificate(
        holds=bool(worst <= 0.0),
        margin=float(worst),
        witness={"x": [float(v) for v in witness_x], "c": [float(v) for v in c]},
        grid_spec={
            "lo": [float(v) for v in region[:, 0]],
            "hi": [float(v) for v in region[:, 1]],
            "counts": [int(v) for v in counts],
            "beta": float(beta),
        },
    )


def check_uniform_contraction(
    field: VectorField,
    metric: RiemannianMetric,
    input_box,
    input_resolution,
    region,
    resolution,
    beta: float,
) -> Certificate:
    """Contraction certificate uniform over a grid of constant inputs.

    Runs :func:`check_contraction_region` for every constant input on the
    grid.  When the certificate holds, the same margin applies to arbitrary
    (measurable, box-valued) input signals, because the input enters the
    contraction matrix only through its pointwise value; the note records
    that entailment.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    input_box, input_counts, input_axes = _axes(input_box, input_resolution)
    if input_box.shape[0] != field.input_dim:
        raise DimensionMismatchError("input box dimension must match the input dimension")
    worst = -np.inf
    witness = None
    state_grid = None
    for c in _grid_points(input_axes):
        cert = check_contraction_region(field, metric, region, resolution, beta, c)
        state_grid = cert.grid_spec
        if cert.margin > worst:
            worst = cert.margin
            witness = cert.witness
    return Certificate(
        holds=bool(worst <= 0.0),
        margin=float(worst),
        witness=witness,
        grid_spec={
            "input_lo": [float(v) for v in input_box[:, 0]],
            "input_hi": [float(v) for v in input_box[:, 1]],
            "input_counts": [int(v) for v in input_counts],
            "state_grid": state_grid,
        },
        note=(
            "holds uniformly over sampled constant inputs; for additive "
            "dynamics this extends at the same rate to every input signal "
            "taking values in the box"
        ),
    )


@dataclass(frozen=True)
class ViolatingInput:
    c: np.ndarray
    x: np.ndarray
    z: np.ndarray
    value: float

    def to_certificate(self) -> Certificate:
        """The found violation as a holds=False certificate with z witness."""
        return Certificate(
            holds=False,
            margin=float(self.value),
            witness={
                "x": [float(v) for v in self.x],
                "c": [float(v) for v in self.c],
                "z": [float(v) for v in self.z],
            },
            grid_spec=None,
            note="constructive violating-input search",
        )


def find_violating_input(
    field: VectorField,
    metric: RiemannianMetric,
    x_search,
    z_search: int = 16,
    c_direction_samples: int = 16,
    x_resolution: int = 21,
    seed: int = 0,
) -> ViolatingInput:
    """Constant input destroying contraction for a non-constant metric.

    Constructive search: find a state x, direction c0 and vector z with
    alpha = z^T Mdot2 z != 0 where Mdot2 has entries grad(M_ij) . c0; flip
    the sign of c0 so alpha > 0; then scale c = N c0, doubling N until
    N*alpha exceeds |z^T (J^T M + M J + Mdot1) z|, which makes the quadratic
    form positive.  Requires an additive-shaped system (input_dim ==
    state_dim).
    """
    n = field.state_dim
    if field.input_dim != n:
        raise DimensionMismatchError("violating-input search needs input_dim == state_dim")
    region, _, axes = _axes(x_search, [x_resolution] * np.atleast_2d(np.asarray(x_search, dtype=float)).reshape(-1, 2).shape[0])
    if region.shape[0] != n:
        raise DimensionMismatchError("x_search must have one (lo, hi) pair per state dimension")

    xs = list(_grid_points(axes))
    grad_scale = max(float(np.max(np.abs(metric.grad(x)))) for x in xs)
    if grad_scale < 1e-10:
        raise MetricAppearsConstantError(
            f"all sampled metric gradients are below 1e-10 (max {grad_scale:.3e})"
        )

    rng = np.random.default_rng(seed)

    def unit_samples(count):
        vecs = [np.eye(n)[i] for i in range(n)]
        for _ in range(count):
            v = rng.normal(size=n)
            vecs.append(v / np.linalg.norm(v))
        return vecs

    c_dirs = unit_samples(c_direction_samples)
    zs = unit_samples(z_search)

    best = None  # (|alpha|, x, c0, z, alpha)
    for x in xs:
        g = metric.grad(x)
        for c0 in c_dirs:
            mdot2 = g @ c0
            for z in zs:
                alpha = float(z @ mdot2 @ z)
                if best is None or abs(alpha) > best[0]:
                    best = (abs(alpha), x, c0, z, alpha)
    abs_alpha, x, c0, z, alpha = best
    if abs_alpha < 1e-12:
        raise MetricAppearsConstantError("no sampled direction produces a nonzero metric drift")
    if alpha < 0:
        c0 = -c0
        alpha = -alpha

    zero = np.zeros(n)
    jac = field.jacobian_x(x, zero)
    m = metric.eval(x)
    mdot1 = metric.grad(x) @ field(x, zero)
    beta_val = float(z @ (jac.T @ m + m @ jac + mdot1) @ z)

    big_n = 1.0
    while not big_n * alpha > abs(beta_val):
        big_n *= 2.0
    return ViolatingInput(c=big_n * c0, x=x, z=z, value=beta_val + big_n * alpha)


def bounded_example_metric(m: float) -> RiemannianMetric:
    """Non-constant 1-D metric M(x) = 1 + exp(-x^2/m)."""
    if m <= 0:
        raise ValueError("m must be positive")

    def eps(x):
        return float(np.exp(-x * x / m))

    return RiemannianMetric.from_scalar(
        lambda x: 1.0 + eps(x),
        lambda x: -2.0 * x / m * eps(x),
        lower_bound=1.0,
        name=f"gaussian bump metric (m={m:g})",
    )


_TAIL_MULTIPLE = 10.0
_BOUNDED_GRID = 40001
_MAX_M_DOUBLINGS = 60


def bounded_metric_m_parameter(bound_B: float) -> tuple[float, Certificate]:
    """Smallest power-of-two m making 1 + exp(-x^2/m) a contraction metric
    for x' = -x + u with |u| <= bound_B at rate 1.

    The certified inequality is |(c - x) eps'(x)| <= 1 + eps(x) for all
    |c| <= bound_B with eps(x) = exp(-x^2/m).  Since the left side is linear
    in c, checking the endpoint inputs suffices; the grid covers
    |x| <= 10*sqrt(m) and an analytic envelope bounds the tail, where
    2|x|(|x| + B) exp(-x^2/m)/m is decreasing and astronomically small.
    """
    if not np.isfinite(bound_B) or bound_B < 0:
        raise ValueError("bound_B must be finite and nonnegative")
    m = 1.0
    for _ in range(_MAX_M_DOUBLINGS):
        half_width = _TAIL_MULTIPLE * np.sqrt(m)
        xs = np.linspace(-half_width, half_width, _BOUNDED_GRID)
        eps = np.exp(-xs * xs / m)
        eps_prime = -2.0 * xs / m * eps
        worst = -np.inf
        for c in (-bound_B, 0.0, bound_B):
            worst = max(worst, float(np.max(np.abs((c - xs) * eps_prime) - (1.0 + eps))))
        y = _TAIL_MULTIPLE  # scaled tail coordinate |x|/sqrt(m)
        tail_bound = (2 * y * y + 2 * y * bound_B / np.sqrt(m)) * np.exp(-y * y)
        if worst <= 0.0 and tail_bound <= 1.0:
            cert = Certificate(
                holds=True,
                margin=worst,
                witness=None,
                grid_spec={
                    "lo": [-float(half_width)],
                    "hi": [float(half_width)],
                    "counts": [_BOUNDED_GRID],
                    "inputs": [-float(bound_B), 0.0, float(bound_B)],
                },
                note=(
                    f"analytic tail bound {tail_bound:.3e} <= 1 for |x| >= {half_width:g}; "
                    "endpoint inputs dominate by linearity in c"
                ),
            )
            return m, cert
        m *= 2.0
    raise RuntimeError("no admissible m found; bound_B may be astronomically large")
