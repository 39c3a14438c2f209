"""Phase-space states, differentiable observables, the Poisson bracket, and
reference integrators.

Sign convention
---------------
Brackets are canonical with ``{p, x} = +1``::

    {A, B} = sum_i  dA/dp_i * dB/dx_i  -  dA/dx_i * dB/dp_i

Under this convention time evolution reads ``df/dt = {H, f}``, and the
conformal algebra relations ``{H,D} = 2H``, ``{H,K} = D``, ``{K,D} = -2K``
hold exactly as written. This is the opposite ordering from the more common
``{x, p} = +1``; every module in this package uses the convention above.

Gradients are exact by default: observables are evaluated on forward-mode
dual numbers (see :mod:`confmech.dual`). Observables that cannot digest
duals fall back to central finite differences with step
``h_i = cbrt(machine eps) * max(1, |coordinate_i|)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import dual
from .errors import (
    DomainError,
    NonFiniteError,
    SingularityApproachError,
    StepUnderflowError,
)

_FD_STEP = float(np.finfo(float).eps) ** (1.0 / 3.0)


@dataclass(frozen=True)
class PhaseState:
    """A Cartesian phase point (q, p) in d position and d momentum entries."""

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.atleast_1d(np.asarray(self.q, dtype=float))
        p = np.atleast_1d(np.asarray(self.p, dtype=float))
        if q.ndim != 1 or p.ndim != 1 or q.shape != p.shape or q.size < 1:
            raise ValueError("q and p must be equal-length vectors, d >= 1")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
            raise NonFiniteError("phase state has non-finite entries")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def d(self) -> int:
        return self.q.shape[0]

    def __iter__(self):
        yield self.q
        yield self.p


class Observable:
    """A scalar function of a phase point with a gradient.

    ``fn(q, p)`` must accept plain float arrays; it should also accept
    object arrays of dual numbers (write scalar math through
    :mod:`confmech.dual` helpers) to get exact gradients. An analytic
    ``grad_fn(q, p) -> (dq, dp)`` short-circuits both automatic paths and
    is worth providing on anything evaluated inside an integrator loop.
    """

    __slots__ = ("dim", "fn", "grad_fn", "name")

    def __init__(self, dim: int, fn: Callable, grad_fn: Optional[Callable] = None,
                 name: str = ""):
        self.dim = int(dim)
        self.fn = fn
        self.grad_fn = grad_fn
        self.name = name

    def __call__(self, state: PhaseState) -> float:
        v = dual.value(self.fn(state.q, state.p))
        if not np.isfinite(v):
            raise NonFiniteError(f"observable {self.name or '<anon>'} is not "
                                 "finite here", state=state)
        return v

    def value(self, q, p):
        """Evaluate on raw arrays (no finiteness check, duals allowed)."""
        return self.fn(q, p)

    def gradient(self, state: PhaseState):
        return grad(self, state)

    # -- algebra of observables (products feed the Leibniz checks) -------

    def _combine(self, other, op, name):
        if isinstance(other, Observable):
            if other.dim != self.dim:
                raise ValueError("observable dimensions differ")
            ofn = other.fn
        else:
            c = float(other)
            ofn = lambda q, p: c  # noqa: E731
        sfn = self.fn
        return Observable(self.dim, lambda q, p: op(sfn(q, p), ofn(q, p)),
                          name=name)

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b, f"({self.name}+)")

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b, f"({self.name}-)")

    def __rsub__(self, other):
        return self._combine(other, lambda a, b: b - a, f"(-{self.name})")

    def __mul__(self, other):
        return self._combine(other, lambda a, b: a * b, f"({self.name}*)")

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._combine(other, lambda a, b: a / b, f"({self.name}/)")

    def __pow__(self, n):
        n = float(n)
        sfn = self.fn
        return Observable(self.dim, lambda q, p: sfn(q, p) ** n,
                          name=f"({self.name}^{n})")

    def __neg__(self):
        return self._combine(0.0, lambda a, b: -a, f"(-{self.name})")


def position_observable(i: int, d: int) -> Observable:
    def gfn(q, p, _i=i, _d=d):
        dq = np.zeros(_d)
        dq[_i] = 1.0
        return dq, np.zeros(_d)
    return Observable(d, lambda q, p: q[i], grad_fn=gfn, name=f"x{i}")


def momentum_observable(i: int, d: int) -> Observable:
    def gfn(q, p, _i=i, _d=d):
        dp = np.zeros(_d)
        dp[_i] = 1.0
        return np.zeros(_d), dp
    return Observable(d, lambda q, p: p[i], grad_fn=gfn, name=f"p{i}")


def grad_finite_difference(obs: Observable, state: PhaseState):
    """Central differences, the independent cross-check of the dual engine."""
    q0, p0 = state.q, state.p
    d = q0.shape[0]
    dq = np.zeros(d)
    dp = np.zeros(d)

    def probe(q, p):
        v = dual.value(obs.fn(q, p))
        if not np.isfinite(v):
            raise NonFiniteError(
                f"observable {obs.name or '<anon>'} not finite at a "
                "finite-difference probe point", state=state)
        return v

    for i in range(d):
        h = _FD_STEP * max(1.0, abs(q0[i]))
        qp, qm = q0.copy(), q0.copy()
        qp[i] += h
        qm[i] -= h
        dq[i] = (probe(qp, p0) - probe(qm, p0)) / (2.0 * h)
        h = _FD_STEP * max(1.0, abs(p0[i]))
        pp, pm = p0.copy(), p0.copy()
        pp[i] += h
        pm[i] -= h
        dp[i] = (probe(q0, pp) - probe(q0, pm)) / (2.0 * h)
    return dq, dp


def _grad_arrays(obs: Observable, q: np.ndarray, p: np.ndarray):
    """Gradient on raw arrays: analytic, else dual, else finite differences."""
    if obs.grad_fn is not None:
        dq, dp = obs.grad_fn(q, p)
        return np.asarray(dq, dtype=float), np.asarray(dp, dtype=float)
    try:
        _, (dq, dp) = dual.gradient(obs.fn, q, p)
        return dq, dp
    except (TypeError, AttributeError):
        return grad_finite_difference(obs, PhaseState(q, p))


def grad(obs: Observable, state: PhaseState):
    """Exact-mode derivatives when the observable supports them, otherwise
    central differences. Returns ``(dq, dp)``."""
    v = obs(state)  # finiteness check at the point itself
    del v
    dq, dp = _grad_arrays(obs, state.q, state.p)
    if not (np.all(np.isfinite(dq)) and np.all(np.isfinite(dp))):
        raise NonFiniteError(
            f"gradient of {obs.name or '<anon>'} is not finite", state=state)
    return dq, dp


def poisson_bracket(A: Observable, B: Observable, state: PhaseState) -> float:
    """{A, B} at a state, with the {p, x} = +1 sign convention."""
    dAq, dAp = grad(A, state)
    dBq, dBp = grad(B, state)
    return float(np.dot(dAp, dBq) - np.dot(dAq, dBp))


@dataclass
class Trajectory:
    """Sampled flow: times, states, and named conserved-quantity monitors."""

    times: np.ndarray
    qs: np.ndarray
    ps: np.ndarray
    monitors: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.qs = np.asarray(self.qs, dtype=float)
        self.ps = np.asarray(self.ps, dtype=float)
        n = self.times.shape[0]
        if self.qs.shape[0] != n or self.ps.shape[0] != n:
            raise ValueError("times/states length mismatch")
        if n > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")
        for k, v in self.monitors.items():
            v = np.asarray(v, dtype=float)
            if v.shape[0] != n:
                raise ValueError(f"monitor {k!r} length mismatch")
            self.monitors[k] = v

    def __len__(self):
        return self.times.shape[0]

    def state(self, i: int) -> PhaseState:
        return PhaseState(self.qs[i], self.ps[i])

    @property
    def states(self):
        return [self.state(i) for i in range(len(self))]


def _monitor_rows(monitors, ts, qs, ps):
    if not monitors:
        return {}
    out = {}
    for name, obs in monitors.items():
        vals = np.empty(len(ts))
        for i in range(len(ts)):
            vals[i] = dual.value(obs.fn(qs[i], ps[i]))
        out[name] = vals
    return out


def integrate_verlet(system, s0: PhaseState, dt: float, t_end: float,
                     record_every: int = 1,
                     singular_guard: float = 1e-6) -> Trajectory:
    """Velocity-Verlet flow of a separable system ``H = p^2/2 + V(q)``.

    ``system`` needs a potential observable ``V`` (with gradient), and may
    provide ``singular_distance(q)`` and ``monitors()``. The integrator
    stops with :class:`SingularityApproachError` (reporting the last good
    time) when the configuration comes within ``singular_guard`` of the
    potential's singular set; this is the finite-time-collapse diagnostic.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    V = system.V
    sdist = getattr(system, "singular_distance", None)
    if sdist is not None and sdist(s0.q) <= 1e-8:
        raise SingularityApproachError(
            "initial state is inside the singular exclusion zone",
            last_good_time=0.0, state=s0)

    def force(q, p):
        dVq, _ = _grad_arrays(V, q, p)
        return -dVq

    n_steps = int(round(t_end / dt))
    q = s0.q.copy()
    p = s0.p.copy()
    a = force(q, p)
    ts = [0.0]
    qs = [q.copy()]
    ps = [p.copy()]
    t = 0.0
    for k in range(1, n_steps + 1):
        p_half = p + 0.5 * dt * a
        q_new = q + dt * p_half
        if sdist is not None:
            dist = sdist(q_new)
            # a step comparable to the singular distance cannot resolve
            # the approach: the fixed-step scheme would hop the singularity
            step = float(np.linalg.norm(q_new - q))
            if dist < singular_guard or step > 0.9 * dist:
                raise SingularityApproachError(
                    "trajectory entered the singular exclusion zone near "
                    f"t={t:.6g}", last_good_time=t,
                    state=PhaseState(qs[-1], ps[-1]))
        q = q_new
        if not np.all(np.isfinite(q)):
            raise NonFiniteError("position became non-finite during Verlet "
                                 f"integration near t={t:.6g}")
        a = force(q, p_half)
        p = p_half + 0.5 * dt * a
        t = k * dt
        if k % record_every == 0 or k == n_steps:
            ts.append(t)
            qs.append(q.copy())
            ps.append(p.copy())
    ts = np.asarray(ts)
    qs = np.asarray(qs)
    ps = np.asarray(ps)
    mons = getattr(system, "monitors", None)
    monitors = _monitor_rows(mons() if callable(mons) else {}, ts, qs, ps)
    return Trajectory(ts, qs, ps, monitors)


# Dormand-Prince 5(4) embedded pair.
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784,
                   11 / 84, 0.0])
_DP_ERR = _DP_B5 - np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                             -92097 / 339200, 187 / 2100, 1 / 40])


def _hamilton_rhs(H: Observable):
    def rhs(y, d):
        q = y[:d]
        p = y[d:]
        dq, dp = _grad_arrays(H, q, p)
        return np.concatenate([dp, -dq])
    return rhs


def integrate_adaptive(H: Observable, s0: PhaseState, rtol: float,
                       t_end: float, t_eval=None, atol: float = None,
                       monitors: dict = None, singular_distance=None,
                       singular_guard: float = 1e-6,
                       max_steps: int = 1_000_000) -> Trajectory:
    """Adaptive embedded Runge-Kutta flow of Hamilton's equations
    ``dx/dt = dH/dp``, ``dp/dt = -dH/dx`` for an arbitrary observable H.

    Local error per step is held below ``atol + rtol*|y|`` componentwise
    (``atol`` defaults to ``rtol``). Near a singularity the step size
    collapses and :class:`StepUnderflowError` reports how far the
    integration got; an optional ``singular_distance(q)`` guard reports the
    same diagnostic earlier and more cheaply.
    """
    if not (1e-13 <= rtol <= 1e-3):
        raise ValueError("rtol must lie in [1e-13, 1e-3]")
    if atol is None:
        atol = rtol
    d = s0.d
    rhs = _hamilton_rhs(H)
    y = np.concatenate([s0.q, s0.p])
    t = 0.0

    targets = None
    if t_eval is not None:
        targets = np.asarray(t_eval, dtype=float)
        if targets.ndim != 1 or (len(targets) > 1
                                 and not np.all(np.diff(targets) > 0)):
            raise ValueError("t_eval must be strictly increasing")
        if len(targets) and (targets[0] < 0 or targets[-1] > t_end + 1e-12):
            raise ValueError("t_eval must lie within [0, t_end]")

    ts = [0.0]
    ys = [y.copy()]

    f = rhs(y, d)
    if not np.all(np.isfinite(f)):
        raise NonFiniteError("Hamiltonian vector field not finite at the "
                             "initial state", state=s0)
    # initial step heuristic
    scale = atol + rtol * np.abs(y)
    d0 = np.sqrt(np.mean((y / scale) ** 2))
    d1 = np.sqrt(np.mean((f / scale) ** 2))
    h = min(t_end, 0.01 * d0 / d1 if d1 > 0 else 1e-3)
    h = max(h, 1e-10)

    next_target = 0
    if targets is not None:
        while next_target < len(targets) and targets[next_target] <= 1e-300:
            next_target += 1  # t=0 recorded below if requested

    k = np.empty((7, 2 * d))
    k[0] = f
    steps = 0
    while t < t_end - 1e-14 * max(1.0, t_end):
        steps += 1
        if steps > max_steps:
            raise StepUnderflowError(
                f"step budget exhausted at t={t:.12g}", t_reached=t,
                state=PhaseState(y[:d], y[d:]))
        h = min(h, t_end - t)
        if targets is not None and next_target < len(targets):
            h = min(h, targets[next_target] - t)
        h_min = 1e-14 * max(1.0, abs(t))
        if h < h_min:
            raise StepUnderflowError(
                f"step size underflow at t={t:.12g} (likely a singularity)",
                t_reached=t, state=PhaseState(y[:d], y[d:]))

        bad = False
        for i in range(1, 7):
            yi = y + h * (_DP_A[i] @ k[:i])
            try:
                ki = rhs(yi, d)
            except (DomainError, NonFiniteError):
                # a stage probed past a domain boundary; retry smaller
                bad = True
                break
            if not np.all(np.isfinite(ki)):
                bad = True
                break
            k[i] = ki
        if bad:
            h *= 0.25
            continue
        y_new = y + h * (_DP_B5 @ k)
        err_vec = h * (_DP_ERR @ k)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = np.sqrt(np.mean((err_vec / scale) ** 2))
        if err <= 1.0 and np.all(np.isfinite(y_new)):
            t = t + h
            y = y_new
            k[0] = k[6]  # first-same-as-last
            if singular_distance is not None and \
                    singular_distance(y[:d]) < singular_guard:
                raise StepUnderflowError(
                    "trajectory entered the singular exclusion zone at "
                    f"t={t:.12g}", t_reached=t, state=PhaseState(y[:d], y[d:]))
            record = targets is None
            if targets is not None and next_target < len(targets) and \
                    abs(t - targets[next_target]) <= 1e-12 * max(1.0, t):
                record = True
                next_target += 1
            if record:
                ts.append(t)
                ys.append(y.copy())
        if err == 0.0:
            h *= 5.0
        else:
            h *= min(5.0, max(0.2, 0.9 * err ** -0.2))

    ts = np.asarray(ts)
    ys = np.asarray(ys)
    qs = ys[:, :d]
    ps = ys[:, d:]
    monitor_rows = _monitor_rows(monitors or {}, ts, qs, ps)
    return Trajectory(ts, qs, ps, monitor_rows)
