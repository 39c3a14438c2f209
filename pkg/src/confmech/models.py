"""Catalog of degree minus-two potentials and the relative-coordinate
Calogero construction.

Catalog entries:

* ``free``             -- V = 0
* ``inverse_square``   -- V = kappa / r^2
* ``conformal_higgs``  -- V = omega^2/(2 x_d^2) + omega^2/(2 r^2); its
  angular potential is the sphere (Higgs) oscillator omega^2 tan^2(t)/2
  shifted by the constant omega^2
* ``conformal_coulomb`` -- V = gamma x_d / (r^2 sqrt(r^2 - x_d^2)); its
  angular potential is the sphere Coulomb potential gamma cot(t)
* ``calogero_relative`` -- n particles on a line with pairwise
  inverse-square couplings, center of mass removed by an orthonormal
  Jacobi change of coordinates (classical coupling g^2; the quantum
  replacement g(g-1) is out of scope here)

All potentials are exactly homogeneous of degree -2 and ship analytic
gradients, so they are cheap inside integrator loops.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import dual
from .conformal import ConformalSystem, build_system
from .errors import DomainError, UnsupportedModelError
from .phase import Observable, PhaseState

MODEL_NAMES = ("free", "inverse_square", "conformal_higgs",
               "conformal_coulomb", "calogero_relative")

_ALIASES = {
    "free": "free",
    "inverse_square": "inverse_square",
    "inverse-square": "inverse_square",
    "higgs": "conformal_higgs",
    "conformal_higgs": "conformal_higgs",
    "conformal-higgs": "conformal_higgs",
    "coulomb": "conformal_coulomb",
    "conformal_coulomb": "conformal_coulomb",
    "conformal-coulomb": "conformal_coulomb",
    "calogero": "calogero_relative",
    "calogero_relative": "calogero_relative",
    "calogero-relative": "calogero_relative",
}


@dataclass(frozen=True)
class ModelSpec:
    """A catalog entry: which potential, its parameters, its dimension."""

    name: str
    d: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in MODEL_NAMES:
            raise ValueError(f"unknown model {self.name!r}")
        p = self.params
        if self.name == "inverse_square" and "kappa" not in p:
            raise ValueError("inverse_square needs kappa")
        if self.name == "conformal_higgs":
            if p.get("omega", 0.0) <= 0:
                raise ValueError("conformal_higgs needs omega > 0")
        if self.name == "conformal_coulomb":
            if "gamma" not in p:
                raise ValueError("conformal_coulomb needs gamma")
            if self.d < 2:
                raise ValueError("conformal_coulomb needs d >= 2")
        if self.name == "calogero_relative":
            n = p.get("n", 0)
            if n < 2:
                raise ValueError("calogero_relative needs n >= 2 particles")
            if p.get("g", 0.0) == 0.0:
                raise ValueError("calogero_relative needs g != 0")
            if self.d != n - 1:
                raise ValueError("calogero dimension is n - 1")
        if self.d < 1:
            raise ValueError("dimension must be >= 1")

    @property
    def label(self) -> str:
        bits = [f"{k}={v:g}" for k, v in sorted(self.params.items())]
        return f"{self.name}(d={self.d}" + (", " + ", ".join(bits) if bits
                                            else "") + ")"


def spec(name: str, d: int = None, **params) -> ModelSpec:
    """Build a ModelSpec accepting CLI-style aliases and defaults."""
    try:
        canonical = _ALIASES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown model {name!r}; choose from "
                         f"{sorted(set(_ALIASES))}") from None
    if canonical == "calogero_relative":
        n = int(params.get("n", params.pop("particles", 0)))
        params["n"] = n
        params.setdefault("g", 1.0)
        d = n - 1
    if d is None:
        raise ValueError(f"model {name!r} needs a dimension")
    return ModelSpec(name=canonical, d=int(d), params=params)


def jacobi_matrix(n: int) -> np.ndarray:
    """Orthonormal relative-coordinate rows, translation mode dropped.

    Row k is (x^1 + ... + x^{k+1} - (k+1) x^{k+2}) / sqrt((k+1)(k+2)); the
    rows span the hyperplane orthogonal to (1, ..., 1), so the kinetic form
    stays sum p^2/2 and pairwise differences are linear in the new
    coordinates.
    """
    if n < 2:
        raise ValueError("need at least two particles")
    R = np.zeros((n - 1, n))
    for k in range(n - 1):
        R[k, :k + 1] = 1.0
        R[k, k + 1] = -(k + 1.0)
        R[k] /= np.sqrt((k + 1.0) * (k + 2.0))
    return R


def pair_axes(n: int) -> np.ndarray:
    """Images of the coincidence planes x^i = x^j in relative coordinates:
    rows are R (e_i - e_j) for i < j, each of norm sqrt(2)."""
    R = jacobi_matrix(n)
    rows = []
    for i, j in itertools.combinations(range(n), 2):
        e = np.zeros(n)
        e[i] = 1.0
        e[j] = -1.0
        rows.append(R @ e)
    return np.asarray(rows)


def singular_directions(n: int) -> np.ndarray:
    """Force-center directions of the reduced Calogero angular system.

    Each pair term contributes (g^2/2) sec^2(t_c) to the angular potential,
    a sphere-oscillator well whose center c is the normalized image of
    e_i - e_j under the Jacobi map and whose singular equator is the great
    sphere perpendicular to c (the image of the coincidence plane
    x^i = x^j). Both orientations are returned (2 per particle pair);
    centers counted modulo antipodality match the particle pairs. For n=3
    the six directions sit on the circle spaced pi/3 (three centers at
    2pi/3); for n=4 the twelve form the vertices of a cuboctahedron.
    """
    axes = pair_axes(n)
    units = axes / np.linalg.norm(axes, axis=1)[:, None]
    return np.concatenate([units, -units])


def potential(model: ModelSpec) -> Observable:
    """The catalog potential as an observable with an exact gradient."""
    d = model.d
    name = model.name

    if name == "free":
        def fn(q, p):
            return 0.0

        def gfn(q, p):
            return np.zeros(d), np.zeros(d)

        return Observable(d, fn, grad_fn=gfn, name="V[free]")

    if name == "inverse_square":
        kappa = float(model.params["kappa"])

        def fn(q, p):
            r2 = np.dot(q, q)
            if dual.value(r2) == 0.0:
                raise DomainError("inverse_square potential at r = 0")
            return kappa / r2

        def gfn(q, p):
            r2 = q @ q
            return -2.0 * kappa * q / r2 ** 2, np.zeros(d)

        return Observable(d, fn, grad_fn=gfn, name="V[inverse_square]")

    if name == "conformal_higgs":
        w2 = float(model.params["omega"]) ** 2

        def fn(q, p):
            r2 = np.dot(q, q)
            xd = q[d - 1]
            if dual.value(r2) == 0.0 or dual.value(xd) == 0.0:
                raise DomainError("higgs potential on its singular set")
            return 0.5 * w2 / (xd * xd) + 0.5 * w2 / r2

        def gfn(q, p):
            r2 = q @ q
            xd = q[d - 1]
            dq = -w2 * q / r2 ** 2
            dq[d - 1] += -w2 / xd ** 3
            return dq, np.zeros(d)

        return Observable(d, fn, grad_fn=gfn, name="V[conformal_higgs]")

    if name == "conformal_coulomb":
        gamma = float(model.params["gamma"])

        def fn(q, p):
            r2 = np.dot(q, q)
            xd = q[d - 1]
            rho2 = r2 - xd * xd
            if dual.value(r2) == 0.0 or dual.value(rho2) <= 0.0:
                raise DomainError("coulomb potential on its singular axis")
            return gamma * xd / (r2 * dual.sqrt(rho2))

        def gfn(q, p):
            r2 = q @ q
            xd = q[d - 1]
            rho = np.sqrt(r2 - xd * xd)  # |x_perp|: no x_d dependence
            dq = -gamma * xd * (2.0 / (r2 ** 2 * rho)
                                + 1.0 / (r2 * rho ** 3)) * q
            dq[d - 1] = gamma * (1.0 / (r2 * rho)
                                 - 2.0 * xd ** 2 / (r2 ** 2 * rho))
            return dq, np.zeros(d)

        return Observable(d, fn, grad_fn=gfn, name="V[conformal_coulomb]")

    if name == "calogero_relative":
        g2 = float(model.params["g"]) ** 2
        axes = pair_axes(model.params["n"])

        def fn(q, p):
            total = 0.0
            for a in axes:
                s = np.dot(a, q)
                if dual.value(s) == 0.0:
                    raise DomainError("coincident particles")
                total = total + g2 / (s * s)
            return total

        def gfn(q, p):
            dq = np.zeros(d)
            for a in axes:
                s = a @ q
                dq += -2.0 * g2 * a / s ** 3
            return dq, np.zeros(d)

        return Observable(d, fn, grad_fn=gfn, name="V[calogero]")

    raise ValueError(name)


def singular_distance_fn(model: ModelSpec) -> Callable:
    """Distance from a configuration to the potential's singular set."""
    d = model.d
    name = model.name
    if name == "free":
        return lambda q: np.inf
    if name == "inverse_square":
        return lambda q: float(np.linalg.norm(q))
    if name == "conformal_higgs":
        return lambda q: float(min(np.linalg.norm(q), abs(q[d - 1])))
    if name == "conformal_coulomb":
        def sdist(q):
            r2 = float(q @ q)
            return float(np.sqrt(max(r2 - float(q[d - 1]) ** 2, 0.0)))
        return sdist
    axes = pair_axes(model.params["n"])

    def sdist(q):
        return float(np.min(np.abs(axes @ q)) / np.sqrt(2.0))
    return sdist


def build(model: ModelSpec) -> ConformalSystem:
    """ModelSpec -> ConformalSystem with generators and singular guard."""
    return build_system(potential(model), model.d, name=model.label,
                        params=dict(model.params),
                        singular_distance=singular_distance_fn(model))


def calogero_relative(n: int, g: float = 1.0) -> ConformalSystem:
    """The n-particle line model with pairwise inverse-square couplings,
    reduced to n-1 relative coordinates (translation mode removed exactly).

    For n=2 this is the familiar one-dimensional system with
    V(y) = g^2 / (2 y^2), since x^1 - x^2 = sqrt(2) y.
    """
    return build(spec("calogero", n=n, g=g))


def full_calogero_hamiltonian(n: int, g: float = 1.0) -> Observable:
    """The unreduced n-particle Hamiltonian (for cross-checks against the
    relative-coordinate system)."""
    g2 = float(g) ** 2
    pairs = list(itertools.combinations(range(n), 2))

    def fn(q, p):
        h = 0.5 * np.dot(p, p)
        for i, j in pairs:
            diff = q[i] - q[j]
            if dual.value(diff) == 0.0:
                raise DomainError("coincident particles")
            h = h + g2 / (diff * diff)
        return h

    return Observable(n, fn, name="H[calogero_full]")


def reduce_calogero_state(x: np.ndarray, p: np.ndarray) -> PhaseState:
    """Map a full n-particle phase point to relative Jacobi coordinates."""
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    R = jacobi_matrix(x.shape[0])
    return PhaseState(R @ x, R @ p)


@dataclass(frozen=True)
class SphericalPotentialForm:
    """Closed-form angular potential U(angles) of a catalog model."""

    model: str
    formula: str
    params: dict

    def evaluate(self, phi) -> float:
        phi = np.atleast_1d(np.asarray(phi, dtype=float))
        theta = phi[0] if phi.size else 0.0
        if self.model == "free":
            return 0.0
        if self.model == "inverse_square":
            return float(self.params["kappa"])
        if self.model == "conformal_higgs":
            w2 = float(self.params["omega"]) ** 2
            return 0.5 * w2 * np.tan(theta) ** 2 + w2
        if self.model == "conformal_coulomb":
            return float(self.params["gamma"]) / np.tan(theta)
        raise UnsupportedModelError(self.model)


def spherical_counterpart(model: ModelSpec) -> SphericalPotentialForm:
    """Closed-form U for the models that have one.

    The sphere oscillator correspondence holds up to an additive constant;
    the constant comes out as omega^2 here. The reduced Calogero potential
    has no closed form in this package (numeric U only), so it raises
    :class:`UnsupportedModelError`.
    """
    if model.name == "free":
        return SphericalPotentialForm("free", "0", {})
    if model.name == "inverse_square":
        return SphericalPotentialForm("inverse_square", "kappa",
                                      {"kappa": model.params["kappa"]})
    if model.name == "conformal_higgs":
        return SphericalPotentialForm(
            "conformal_higgs", "omega^2 tan(theta)^2 / 2 + omega^2",
            {"omega": model.params["omega"]})
    if model.name == "conformal_coulomb":
        return SphericalPotentialForm(
            "conformal_coulomb", "gamma cot(theta)",
            {"gamma": model.params["gamma"]})
    raise UnsupportedModelError(
        "the reduced Calogero angular potential has no closed form here; "
        "evaluate it numerically via the reduction module")


def catalog() -> list:
    """The standard model list exercised by the verification suites."""
    return [
        spec("free", d=3),
        spec("inverse-square", d=2, kappa=1.0),
        spec("inverse-square", d=3, kappa=1.0),
        spec("higgs", d=3, omega=1.0),
        spec("coulomb", d=3, gamma=1.0),
        spec("calogero", n=2, g=1.0),
        spec("calogero", n=3, g=1.0),
        spec("calogero", n=4, g=1.0),
    ]


def reference_state(model: ModelSpec) -> PhaseState:
    """A documented off-singularity initial state for each catalog model,
    gentle enough for long conservation runs."""
    name, d = model.name, model.d
    if name == "free":
        q = np.linspace(1.0, 0.4, d)
        p = np.linspace(0.3, 1.0, d)
        return PhaseState(q, p)
    if name == "inverse_square":
        if d == 2:
            return PhaseState([1.0, 0.0], [0.0, 1.0])
        q = np.full(d, 0.3)
        q[0] = 1.0
        p = np.full(d, 0.2)
        p[1] = 1.0
        return PhaseState(q, p)
    if name == "conformal_higgs":
        q = np.full(d, 0.4)
        q[d - 1] = 1.0
        p = np.full(d, 0.3)
        p[0] = -0.2
        return PhaseState(q, p)
    if name == "conformal_coulomb":
        q = np.zeros(d)
        q[0] = 1.0
        q[d - 1] = 0.3
        p = np.zeros(d)
        p[1] = 1.0
        p[d - 1] = 0.2
        return PhaseState(q, p)
    # calogero: spread particles in decreasing order (keeps the n=2 relative
    # coordinate on the positive half-line), translation-free momenta
    n = model.params["n"]
    x = np.linspace(1.0, -1.0, n) * (n - 1) * 0.6
    px = np.linspace(0.25, -0.25, n)
    px -= px.mean()
    return reduce_calogero_state(x, px)
