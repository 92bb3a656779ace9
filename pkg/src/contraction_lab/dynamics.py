"""Vector fields, input signals, and a reference adaptive ODE integrator.

The integrator is an explicit embedded Runge-Kutta 5(4) pair with
Dormand-Prince coefficients and a PI step-size controller.  Runs are
segmented at input discontinuities so the error estimator never straddles a
jump, and accepted steps keep their end-point derivatives so trajectories
support dense evaluation by cubic Hermite interpolation (4th-order accurate
between accepted steps).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .certificates import format_float
from .errors import NonFiniteError, StepSizeUnderflowError

__all__ = [
    "IntegratorConfig",
    "VectorField",
    "InputSignal",
    "ConstantInput",
    "PeriodicInput",
    "PiecewiseConstantInput",
    "ConcatenatedInput",
    "concat",
    "shift_signal",
    "Trajectory",
    "integrate",
]


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-11
    max_step: float = math.inf
    initial_step: float | None = None

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_step <= 0:
            raise ValueError("max_step must be positive")
        if self.initial_step is not None and self.initial_step <= 0:
            raise ValueError("initial_step must be positive")


class VectorField:
    """Dynamics x' = f(x, u) with state-Jacobian access.

    ``f`` maps (state, input) to the state derivative.  When an analytic
    ``jacobian`` is not supplied, the Jacobian is approximated by central
    finite differences with step 1e-6.
    """

    def __init__(self, f, state_dim: int, input_dim: int, jacobian=None, name: str = ""):
        self._f = f
        self.state_dim = int(state_dim)
        self.input_dim = int(input_dim)
        self._jacobian = jacobian
        self.name = name

    def __call__(self, x, u) -> np.ndarray:
        return np.asarray(self._f(np.asarray(x, dtype=float), np.asarray(u, dtype=float)), dtype=float)

    def jacobian_x(self, x, u) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        if self._jacobian is not None:
            return np.asarray(self._jacobian(x, u), dtype=float)
        n = self.state_dim
        jac = np.empty((n, n))
        h = 1e-6
        for i in range(n):
            step = np.zeros(n)
            step[i] = h
            jac[:, i] = (self(x + step, u) - self(x - step, u)) / (2 * h)
        return jac


class InputSignal:
    """Time function u(t) with right-continuous semantics at discontinuities."""

    dim: int

    def eval(self, t: float) -> np.ndarray:
        raise NotImplementedError

    def eval_left(self, t: float) -> np.ndarray:
        """Left limit at ``t``; equals ``eval`` except at discontinuities."""
        return self.eval(t)

    def breakpoints_in(self, t0: float, t1: float) -> list[float]:
        """Discontinuity times strictly inside (t0, t1)."""
        return []

    def shifted(self, offset: float) -> "InputSignal":
        """Signal s with s(t) = self(t + offset)."""
        raise NotImplementedError

    def __call__(self, t: float) -> np.ndarray:
        return self.eval(t)


class ConstantInput(InputSignal):
    def __init__(self, value):
        self.value = np.atleast_1d(np.asarray(value, dtype=float)).copy()
        self.dim = self.value.shape[0]

    def eval(self, t):
        return self.value

    def shifted(self, offset):
        return self

    @classmethod
    def zero(cls, dim: int) -> "ConstantInput":
        return cls(np.zeros(dim))


class PeriodicInput(InputSignal):
    """u(t + period) = u(t); periodicity is spot-checked at construction."""

    def __init__(self, period: float, fn, validate: bool = True):
        if period <= 0:
            raise ValueError("period must be positive")
        self.period = float(period)
        self._fn = fn
        self.dim = np.atleast_1d(np.asarray(fn(0.0), dtype=float)).shape[0]
        if validate:
            for k in range(8):
                t = k * self.period / 8.0
                a = np.atleast_1d(np.asarray(fn(t), dtype=float))
                b = np.atleast_1d(np.asarray(fn(t + self.period), dtype=float))
                if not np.allclose(a, b, rtol=1e-9, atol=1e-9):
                    raise ValueError(f"signal is not {period}-periodic at t={t}")

    def eval(self, t):
        return np.atleast_1d(np.asarray(self._fn(t), dtype=float))

    def shifted(self, offset):
        fn = self._fn
        return PeriodicInput(self.period, lambda t: fn(t + offset), validate=False)


class PiecewiseConstantInput(InputSignal):
    """Right-continuous step function: values[i] applies on [bp[i-1], bp[i])."""

    def __init__(self, breakpoints, values):
        self.breakpoints = np.atleast_1d(np.asarray(breakpoints, dtype=float)).copy()
        vals = np.asarray(values, dtype=float)
        if vals.ndim == 1:
            vals = vals[:, None]
        self.values = vals.copy()
        if self.breakpoints.ndim != 1 or np.any(np.diff(self.breakpoints) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if self.values.shape[0] != self.breakpoints.shape[0] + 1:
            raise ValueError("need exactly len(breakpoints)+1 values")
        self.dim = self.values.shape[1]

    def eval(self, t):
        idx = int(np.searchsorted(self.breakpoints, t, side="right"))
        return self.values[idx]

    def eval_left(self, t):
        idx = int(np.searchsorted(self.breakpoints, t, side="left"))
        return self.values[idx]

    def breakpoints_in(self, t0, t1):
        return [float(b) for b in self.breakpoints if t0 < b < t1]

    def shifted(self, offset):
        return PiecewiseConstantInput(self.breakpoints - offset, self.values)


class ConcatenatedInput(InputSignal):
    """u before t_switch, v from t_switch on (right-inclusive boundary)."""

    def __init__(self, u: InputSignal, v: InputSignal, t_switch: float):
        if u.dim != v.dim:
            raise ValueError("concatenated signals must share a dimension")
        self.u = u
        self.v = v
        self.t_switch = float(t_switch)
        self.dim = u.dim

    def eval(self, t):
        return self.u.eval(t) if t < self.t_switch else self.v.eval(t)

    def eval_left(self, t):
        return self.u.eval_left(t) if t <= self.t_switch else self.v.eval_left(t)

    def breakpoints_in(self, t0, t1):
        pts = set(self.u.breakpoints_in(t0, t1)) | set(self.v.breakpoints_in(t0, t1))
        if t0 < self.t_switch < t1:
            pts.add(self.t_switch)
        return sorted(pts)

    def shifted(self, offset):
        return ConcatenatedInput(self.u.shifted(offset), self.v.shifted(offset), self.t_switch - offset)


def concat(u: InputSignal, v: InputSignal, t0: float) -> InputSignal:
    """Signal equal to u(t) for t < t0 and v(t) for t >= t0."""
    return ConcatenatedInput(u, v, t0)


def shift_signal(u: InputSignal, offset: float) -> InputSignal:
    """Signal s with s(t) = u(t + offset) pointwise."""
    return u.shifted(offset)


class Trajectory:
    """Time-stamped states from accepted integrator steps.

    ``dense_eval`` interpolates with a cubic Hermite polynomial on each
    accepted step, using the derivative of the dynamics at both step ends
    (left-limit at input discontinuities).
    """

    def __init__(self, times, states, deriv_start, deriv_end):
        self.times = np.asarray(times, dtype=float)
        self.states = np.asarray(states, dtype=float)
        self._d0 = np.asarray(deriv_start, dtype=float)
        self._d1 = np.asarray(deriv_end, dtype=float)
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if not np.all(np.isfinite(self.states)):
            raise NonFiniteError("trajectory contains non-finite states")

    @property
    def t0(self) -> float:
        return float(self.times[0])

    @property
    def t1(self) -> float:
        return float(self.times[-1])

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1].copy()

    def dense_eval(self, t):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        span = self.t1 - self.t0
        if np.any(t_arr < self.t0 - 1e-12 * span) or np.any(t_arr > self.t1 + 1e-12 * span):
            raise ValueError("dense_eval query outside the integrated span")
        t_arr = np.clip(t_arr, self.t0, self.t1)
        idx = np.clip(np.searchsorted(self.times, t_arr, side="right") - 1, 0, len(self.times) - 2)
        ta = self.times[idx]
        h = self.times[idx + 1] - ta
        s = (t_arr - ta) / h
        s2, s3 = s * s, s * s * s
        h00 = 2 * s3 - 3 * s2 + 1
        h10 = s3 - 2 * s2 + s
        h01 = -2 * s3 + 3 * s2
        h11 = s3 - s2
        out = (
            h00[:, None] * self.states[idx]
            + (h10 * h)[:, None] * self._d0[idx]
            + h01[:, None] * self.states[idx + 1]
            + (h11 * h)[:, None] * self._d1[idx]
        )
        return out[0] if np.isscalar(t) or np.asarray(t).ndim == 0 else out

    def export_csv(self, path) -> None:
        """Write `t,x1,...,xn` rows (17 significant digits, one per step)."""
        n = self.states.shape[1]
        header = "t," + ",".join(f"x{i + 1}" for i in range(n))
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(header + "\n")
            for t, row in zip(self.times, self.states):
                fh.write(format_float(t) + "," + ",".join(format_float(v) for v in row) + "\n")


# Dormand-Prince 5(4) tableau.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
# Difference between the 5th-order weights and the embedded 4th-order weights.
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])

_SAFETY = 0.9
_PI_BETA = 0.04
_EXPO = 0.2 - 0.75 * _PI_BETA
_FAC_MIN = 0.2
_FAC_MAX = 10.0


def _hinit(rhs, t0, x0, f0, seg_span, config):
    if config.initial_step is not None:
        return min(config.initial_step, seg_span, config.max_step)
    sc = config.abs_tol + config.rel_tol * np.abs(x0)
    d0 = np.sqrt(np.mean(np.square(x0 / sc)))
    d1 = np.sqrt(np.mean(np.square(f0 / sc)))
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, seg_span)
    f1 = rhs(t0 + h0, x0 + h0 * f0)
    d2 = np.sqrt(np.mean(np.square((f1 - f0) / sc))) / h0
    dm = max(d1, d2)
    h1 = max(1e-6, h0 * 1e-3) if dm <= 1e-15 else (0.01 / dm) ** 0.2
    return min(100 * h0, h1, seg_span, config.max_step)


def _integrate_segment(field, signal, t_start, t_end, x0, config, full_span, out):
    """Advance one smooth segment [t_start, t_end]; append steps to ``out``."""

    def u_at(t):
        # The only stage evaluated at the segment end must see the left
        # limit of the input, so a breakpoint never leaks across a step.
        if t >= t_end:
            return signal.eval_left(t_end)
        return signal.eval(t)

    def rhs(t, x):
        return field(x, u_at(t))

    ts, xs, d0s, d1s = out
    t, x = t_start, np.asarray(x0, dtype=float)
    k1 = rhs(t, x)
    if not np.all(np.isfinite(k1)):
        raise NonFiniteError(f"dynamics non-finite at t={t}")
    h = _hinit(rhs, t, x, k1, t_end - t_start, config)
    facold = 1e-4
    min_step = 1e-14 * full_span
    nonfinite_streak = 0
    while t < t_end:
        if h < min_step:
            if nonfinite_streak > 0:
                raise NonFiniteError(f"state blew up near t={t}")
            raise StepSizeUnderflowError(f"step size {h:.3e} underflowed at t={t}")
        final = h >= (t_end - t) * (1 - 1e-12)
        t_next = t_end if final else t + h
        h_eff = t_next - t
        if h_eff <= 0:
            raise StepSizeUnderflowError(f"step no longer advances time at t={t}")
        k = [k1]
        bad = False
        for i in range(1, 7):
            ti = t_next if _C[i] == 1.0 else t + _C[i] * h_eff
            xi = x + h_eff * (np.stack(k, axis=0).T @ _A[i])
            ki = rhs(ti, xi)
            if not np.all(np.isfinite(ki)):
                bad = True
                break
            k.append(ki)
        if not bad:
            x_next = x + h_eff * (np.stack(k[:6], axis=0).T @ _A[6])
            err_vec = h_eff * (np.stack(k, axis=0).T @ _E)
            sc = config.abs_tol + config.rel_tol * np.maximum(np.abs(x), np.abs(x_next))
            err = float(np.sqrt(np.mean(np.square(err_vec / sc))))
            bad = not (np.all(np.isfinite(x_next)) and math.isfinite(err))
        if bad:
            nonfinite_streak += 1
            h *= 0.25
            continue
        nonfinite_streak = 0
        if err <= 1.0:
            ts.append(t_next)
            xs.append(x_next)
            d0s.append(k[0])
            d1s.append(k[6])
            t, x, k1 = t_next, x_next, k[6]
            fac11 = err ** _EXPO if err > 0 else _FAC_MIN ** (1 / _PI_BETA)
            fac = fac11 / (facold ** _PI_BETA)
            fac = max(1.0 / _FAC_MAX, min(1.0 / _FAC_MIN, fac / _SAFETY))
            facold = max(err, 1e-4)
            h = min(h_eff / fac, config.max_step)
        else:
            fac11 = err ** _EXPO
            h = h_eff / min(1.0 / _FAC_MIN, fac11 / _SAFETY)
    return x


def integrate(field: VectorField, signal: InputSignal, x0, t_span, config: IntegratorConfig | None = None) -> Trajectory:
    """Solve x' = f(x, u(t)) over ``t_span`` with local error control.

    Integration restarts exactly at every input discontinuity inside the
    span, so each Runge-Kutta step sees a smooth right-hand side.
    """
    config = config or IntegratorConfig()
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t1 > t0:
        raise ValueError("t_span must satisfy t1 > t0")
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if not np.all(np.isfinite(x0)):
        raise NonFiniteError("initial state has non-finite entries")
    if x0.shape[0] != field.state_dim:
        raise ValueError(f"initial state has dimension {x0.shape[0]}, field expects {field.state_dim}")
    if signal.dim != field.input_dim:
        raise ValueError(f"input signal has dimension {signal.dim}, field expects {field.input_dim}")

    cuts = [t0] + signal.breakpoints_in(t0, t1) + [t1]
    out = ([t0], [x0.copy()], [], [])
    x = x0
    for a, b in zip(cuts[:-1], cuts[1:]):
        x = _integrate_segment(field, signal, a, b, x, config, t1 - t0, out)
    ts, xs, d0s, d1s = out
    return Trajectory(np.array(ts), np.array(xs), np.array(d0s), np.array(d1s))
