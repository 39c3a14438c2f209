"""Canonical reduction between Cartesian phase space and the radial pair
(r, p_r) times the cotangent bundle of the unit sphere.

Chart convention: nested hyperspherical angles with the *last* Cartesian
axis as the primary pole, so for d = 3

    x = r (sin t1 cos t2,  sin t1 sin t2,  cos t1),

with polar angles t1..t_{d-2} in (0, pi) and the azimuth t_{d-1} in
(-pi, pi]. This places the distinguished x_d axis of the sphere-potential
models at t1 = 0, so their angular potentials come out in the usual
variables (tan, cot of the first polar angle).

Momenta transform by the point-transformation pullback: with J the position
Jacobian d x / d(r, t), the new momenta are (p_r, pi) = J^T p, which keeps
the chart exactly canonical: {p_r, r} = 1, {pi_a, t^b} = delta_a^b.

d = 1 is supported on the half-line x > 0 (no angles); states with x <= 0
raise :class:`ChartSingularError` (flip the sign, reduce, flip back).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import dual
from .errors import ChartSingularError, NotHomogeneousError
from .phase import Observable, PhaseState


@dataclass(frozen=True)
class ReducedState:
    """(r, p_r, angles, conjugate momenta); angles has length d-1."""

    r: float
    p_r: float
    phi: np.ndarray
    pi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "phi",
                           np.atleast_1d(np.asarray(self.phi, dtype=float))
                           if np.size(self.phi) else np.zeros(0))
        object.__setattr__(self, "pi",
                           np.atleast_1d(np.asarray(self.pi, dtype=float))
                           if np.size(self.pi) else np.zeros(0))
        if self.r <= 0:
            raise ValueError("r must be positive")
        if self.phi.shape != self.pi.shape:
            raise ValueError("phi and pi must have equal length")
        for a in range(self.phi.shape[0] - 1):  # polar angles only
            if not (0.0 < self.phi[a] < np.pi):
                raise ChartSingularError(
                    f"polar angle {a} = {self.phi[a]:g} is outside (0, pi)")

    @property
    def d(self) -> int:
        return self.phi.shape[0] + 1


def _factor_lists(d: int):
    """Sine/cosine factor lists of each Cartesian component of the chart."""
    comps = [None] * d
    if d == 1:
        comps[0] = []
        return comps
    for k in range(d - 2):
        comps[d - 1 - k] = [(j, "s") for j in range(k)] + [(k, "c")]
    sines = [(j, "s") for j in range(d - 2)]
    comps[1] = sines + [(d - 2, "s")]
    comps[0] = sines + [(d - 2, "c")]
    return comps


def _factor(phi, idx, kind):
    return dual.sin(phi[idx]) if kind == "s" else dual.cos(phi[idx])


def unit_from_angles(phi, d: int):
    """Unit vector on the (d-1)-sphere; works on floats and duals."""
    comps = _factor_lists(d)
    out = np.empty(d, dtype=object)
    for i, factors in enumerate(comps):
        v = 1.0
        for idx, kind in factors:
            v = v * _factor(phi, idx, kind)
        out[i] = v
    if all(not isinstance(v, dual.Dual) for v in out):
        return out.astype(float)
    return out


def unit_tangents(phi, d: int):
    """d x (d-1) matrix of tangent vectors du/dt_a (floats or duals)."""
    comps = _factor_lists(d)
    out = np.empty((d, d - 1), dtype=object)
    out[:] = 0.0
    for i, factors in enumerate(comps):
        for which, (didx, dkind) in enumerate(factors):
            v = 1.0
            for pos, (idx, kind) in enumerate(factors):
                if pos == which:
                    f = (dual.cos(phi[idx]) if kind == "s"
                         else -dual.sin(phi[idx]))
                else:
                    f = _factor(phi, idx, kind)
                v = v * f
            out[i, didx] = out[i, didx] + v
    if all(not isinstance(v, dual.Dual) for v in out.ravel()):
        return out.astype(float)
    return out


def angles_from_unit(n, d: int, delta: float = 1e-9):
    """Invert the chart on a unit vector; floats or duals.

    Raises :class:`ChartSingularError` when any polar angle is within
    ``delta`` of a pole (where the azimuthal directions degenerate).
    """
    if d == 1:
        if dual.value(n[0]) <= 0:
            raise ChartSingularError(
                "the 1D chart covers the half-line x > 0 only")
        return np.zeros(0)
    phi = np.empty(d - 1, dtype=object)
    for k in range(d - 2):
        c = n[d - 1 - k]
        # remaining components live on a sphere of radius prod(sin);
        # renormalize so the arccos argument stays in range
        rem = 0.0
        for j in range(d - 1 - k):
            rem = rem + n[j] * n[j]
        s = dual.sqrt(rem + c * c)
        c = c / s
        if not isinstance(c, dual.Dual):
            c = min(1.0, max(-1.0, c))
        theta = dual.arccos(c)
        tv = dual.value(theta)
        if tv < delta or tv > np.pi - delta:
            raise ChartSingularError(
                f"polar angle {k} is within {delta:g} of a pole; "
                "permute/rotate axes and reduce again")
        phi[k] = theta
    phi[d - 2] = dual.arctan2(n[1], n[0])
    if all(not isinstance(v, dual.Dual) for v in phi):
        return phi.astype(float)
    return phi


def position_jacobian(r, phi, d: int):
    """Full d x d Jacobian of x(r, angles): columns [du, r * du/dt_a]."""
    u = unit_from_angles(phi, d)
    J = np.empty((d, d), dtype=object)
    J[:, 0] = u
    if d > 1:
        T = unit_tangents(phi, d)
        for a in range(d - 1):
            J[:, a + 1] = r * T[:, a]
    if all(not isinstance(v, dual.Dual) for v in J.ravel()):
        return J.astype(float)
    return J


def to_hyperspherical(s: PhaseState, delta: float = 1e-9) -> ReducedState:
    """Cartesian -> (r, p_r, angles, momenta), the canonical chart map."""
    q, p = s.q, s.p
    d = s.d
    r = float(np.linalg.norm(q))
    if r <= 0:
        raise ChartSingularError("the chart is undefined at the origin")
    n = q / r
    phi = angles_from_unit(n, d, delta=delta)
    p_r = float(np.dot(p, n))
    if d == 1:
        return ReducedState(r=r, p_r=p_r, phi=np.zeros(0), pi=np.zeros(0))
    T = unit_tangents(phi, d)
    pi = r * (p @ T)
    return ReducedState(r=r, p_r=p_r, phi=phi, pi=np.asarray(pi, dtype=float))


def from_hyperspherical(rs: ReducedState) -> PhaseState:
    """Exact inverse of :func:`to_hyperspherical`."""
    d = rs.d
    u = unit_from_angles(rs.phi, d)
    q = rs.r * u
    if d == 1:
        return PhaseState(q, np.array([rs.p_r]))
    J = position_jacobian(rs.r, rs.phi, d)
    rhs = np.concatenate([[rs.p_r], rs.pi])
    p = np.linalg.solve(J.T, rhs)
    return PhaseState(q, p)


def sphere_metric_diag(phi, d: int):
    """Diagonal of the inverse round metric: 1, 1/sin^2 t1, ... (dual-safe)."""
    diag = np.empty(d - 1, dtype=object)
    acc = 1.0
    for a in range(d - 1):
        diag[a] = 1.0 / acc
        if a < d - 2:
            sa = dual.sin(phi[a])
            acc = acc * sa * sa
    if all(not isinstance(v, dual.Dual) for v in diag):
        return diag.astype(float)
    return diag


def sphere_metric_inverse(phi, d: int, delta: float = 1e-9) -> np.ndarray:
    """Inverse round metric of the unit (d-1)-sphere in the nested chart."""
    if d < 2:
        raise ValueError("the sphere metric needs d >= 2")
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    for a in range(d - 2):
        if not (delta < phi[a] < np.pi - delta):
            raise ChartSingularError(f"polar angle {a} is outside the chart")
    return np.diag(sphere_metric_diag(phi, d))


@dataclass(frozen=True)
class SphericalSystem:
    """Angular Hamiltonian I = pi.g.pi/2 + U on the unit-sphere cotangent
    bundle; the conserved replacement of the 1D coupling constant."""

    d: int
    U: Callable
    metric_diag: Callable

    def metric_inverse(self, phi) -> np.ndarray:
        return np.diag(self.metric_diag(phi))

    def energy(self, phi, pi):
        g = self.metric_diag(phi)
        kin = 0.0
        for a in range(self.d - 1):
            kin = kin + 0.5 * g[a] * pi[a] * pi[a]
        return kin + self.U(phi)

    def hamiltonian_observable(self) -> Observable:
        """I as an observable on the chart phase space (q=angles, p=momenta)."""
        if self.d < 2:
            raise ValueError("no angular dynamics in d = 1")
        return Observable(self.d - 1, lambda q, p: self.energy(q, p),
                          name="I(sphere)")


def spherical_system_from(V: Observable, d: int) -> SphericalSystem:
    """Angular system of a degree minus-two potential: U = V on the unit
    sphere (the radial factor drops out by homogeneity)."""
    zeros = np.zeros(d)

    def U(phi):
        u = unit_from_angles(phi, d)
        return V.fn(u, zeros)

    return SphericalSystem(d=d, U=U,
                           metric_diag=lambda phi: sphere_metric_diag(phi, d))


def angular_potential(V: Observable, rs: ReducedState,
                      rtol: float = 1e-9) -> float:
    """U = r^2 V at the reduced state's angles; must be r-independent.

    Evaluated at r and 2r; disagreement beyond ``rtol`` (relative) raises
    :class:`NotHomogeneousError`.
    """
    d = rs.d
    u = unit_from_angles(rs.phi, d)
    zeros = np.zeros(d)
    v1 = rs.r ** 2 * dual.value(V.fn(rs.r * u, zeros))
    v2 = (2 * rs.r) ** 2 * dual.value(V.fn(2 * rs.r * u, zeros))
    if abs(v1 - v2) > rtol * max(1.0, abs(v1)):
        raise NotHomogeneousError(
            f"r^2 V is not r-independent here: {v1!r} at r vs {v2!r} at 2r")
    return v1


def spherical_energy(sys: SphericalSystem, phi, pi) -> float:
    """pi.g(phi).pi/2 + U(phi); equals the Casimir combination (4HK-D^2)/2
    of the Cartesian state it reduces."""
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    pi = np.atleast_1d(np.asarray(pi, dtype=float))
    for a in range(sys.d - 2):
        if not (0 < phi[a] < np.pi):
            raise ChartSingularError(f"polar angle {a} is outside the chart")
    return float(dual.value(sys.energy(phi, pi)))


def chart_observables(d: int, delta: float = 1e-9) -> dict:
    """The chart functions (r, p_r, angles, momenta) as observables on the
    Cartesian phase space, dual-differentiable for bracket checks."""

    def r_fn(q, p):
        return dual.sqrt(np.dot(q, q))

    def p_r_fn(q, p):
        return np.dot(p, q) / dual.sqrt(np.dot(q, q))

    obs = {
        "r": Observable(d, r_fn, name="r"),
        "p_r": Observable(d, p_r_fn, name="p_r"),
    }

    def phi_fn(q, p, a):
        r = dual.sqrt(np.dot(q, q))
        return angles_from_unit(q / r, d, delta=delta)[a]

    def pi_fn(q, p, a):
        r = dual.sqrt(np.dot(q, q))
        phi = angles_from_unit(q / r, d, delta=delta)
        T = unit_tangents(phi, d)
        acc = 0.0
        for i in range(d):
            acc = acc + p[i] * T[i, a]
        return r * acc

    for a in range(d - 1):
        obs[f"phi_{a}"] = Observable(
            d, (lambda q, p, _a=a: phi_fn(q, p, _a)), name=f"phi_{a}")
        obs[f"pi_{a}"] = Observable(
            d, (lambda q, p, _a=a: pi_fn(q, p, _a)), name=f"pi_{a}")
    return obs
