"""The half-plane (Klein/Lobachevsky) picture of the radial dynamics, the
decoupling inversion w -> -1/w, and its (non-)canonicity analysis.

For I > 0 the radial pair is packed into one complex coordinate on the
upper half-plane,

    w = p_r / r + i sqrt(2 I) / r^2  =  (D + i sqrt(2 I)) / (2 K),

on which H, D, K become the Killing potentials of the hyperbolic (Klein)
metric; the inversion w -> -1/w swaps H and K and flips D. For I < 0 the
same construction survives with sqrt(-2 I) in place of i sqrt(2 I); w and
wbar are then two independent *real* coordinates and the Kahler reading is
lost. I = 0 is excluded: both branches degenerate.

Sign and factor conventions (worked out from w, I, and the {p, x} = +1
bracket; each is verified numerically in the test suite):

* transport under inversion: H -> K, K -> +H, D -> -D. (Statements of a
  K -> -H rule appear in the literature; direct substitution into the
  Killing forms gives +H, which is what this module computes and asserts.)
* mixed brackets: {u^a, w} = (w - wbar) V^a / (4 I) with V^a = {u^a, I};
  the frequently quoted prefactor 1/(2 I) is exactly 2x too large, and
  {u^a, wbar} = -{u^a, w} (not equal to it). Both the self-consistent and
  the quoted values are reported side by side.
* the hyperbolic metric -g dw dwbar/(wbar-w)^2 and the Hessian of the
  potential g log i(wbar - w) agree in magnitude and differ by an overall
  sign; magnitude equality is what is asserted.

The radial-only change of variables p~ = sqrt(2H), r~ = D / sqrt(2H)
(forced by the contract w~ = -1/w; the sign of r~ rides on D) is canonical
in d = 1 and provably not canonical in d > 1, where the new coordinates
acquire nonzero brackets with the angular ones through I(u).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import dual
from .conformal import ConformalSystem, sample_states
from .errors import (
    NonPositiveEnergyError,
    ZeroAngularEnergyError,
    ZeroWError,
)
from .models import ModelSpec, build
from .phase import Observable, PhaseState, poisson_bracket
from .reduction import (
    ReducedState,
    SphericalSystem,
    angles_from_unit,
    chart_observables,
    from_hyperspherical,
    to_hyperspherical,
)

POSITIVE_I = "positive_I"
NEGATIVE_I = "negative_I"

# convention notes surfaced in every report (see module docstring)
SIGN_NOTES = (
    "inversion transport computed from the Killing forms: H->K, K->+H, "
    "D->-D (the -H variant quoted in places does not match direct "
    "substitution)",
    "mixed bracket prefactor is 1/(4I), not the often-quoted 1/(2I); "
    "{u,wbar} = -{u,w}",
    "hyperbolic metric coefficient and Kahler-potential Hessian agree in "
    "magnitude and differ by an overall sign",
)


@dataclass(frozen=True)
class KleinPoint:
    """Half-plane image of a radial state: w, wbar, and sqrt(2|I|).

    ``w`` and ``wbar`` are complex conjugates on the positive-I branch
    (Im w > 0) and two independent reals on the negative-I branch.
    """

    branch: str
    w: complex
    wbar: complex
    sqrt2I: float

    def __post_init__(self):
        if self.branch not in (POSITIVE_I, NEGATIVE_I):
            raise ValueError(f"unknown branch {self.branch!r}")
        if self.sqrt2I <= 0:
            raise ValueError("sqrt2I must be positive")
        if self.branch == POSITIVE_I and self.w.imag <= 0:
            raise ValueError("positive-I points live in the upper half-plane")

    @property
    def sigma(self) -> complex:
        """i sqrt(2I) on the positive branch, sqrt(-2I) on the negative."""
        return 1j * self.sqrt2I if self.branch == POSITIVE_I else self.sqrt2I

    @property
    def I(self) -> float:
        h = 0.5 * self.sqrt2I ** 2
        return h if self.branch == POSITIVE_I else -h


def _radial_pair(source) -> tuple:
    if isinstance(source, ReducedState):
        return source.r, source.p_r
    if isinstance(source, PhaseState):
        if source.d != 1:
            raise ValueError("pass a ReducedState for d > 1")
        rs = to_hyperspherical(source)
        return rs.r, rs.p_r
    r, p_r = source
    return float(r), float(p_r)


def to_klein(source: Union[ReducedState, PhaseState, tuple],
             I: float) -> KleinPoint:
    """Map (r, p_r) and the angular invariant I to the half-plane.

    Accepts a ReducedState, a 1D PhaseState (x > 0), or a bare (r, p_r)
    pair. I = 0 is rejected: w degenerates to a real ray and every formula
    divides by sqrt(2I).
    """
    r, p_r = _radial_pair(source)
    if r <= 0:
        raise ValueError("r must be positive")
    if I == 0.0:
        raise ZeroAngularEnergyError(
            "the half-plane coordinate is undefined at I = 0")
    a = p_r / r
    if I > 0.0:
        s = math.sqrt(2.0 * I)
        return KleinPoint(POSITIVE_I, complex(a, s / r ** 2),
                          complex(a, -s / r ** 2), s)
    s = math.sqrt(-2.0 * I)
    return KleinPoint(NEGATIVE_I, a + s / r ** 2, a - s / r ** 2, s)


def from_klein(kp: KleinPoint) -> tuple:
    """Inverse map: (r, p_r). Requires w - wbar != 0."""
    diff = kp.w - kp.wbar
    r2 = 2.0 * kp.sigma / diff  # = r^2, real for both branches
    r2 = r2.real if isinstance(r2, complex) else r2
    if r2 <= 0:
        raise ValueError("the point does not come from a radial state")
    a = 0.5 * (kp.w + kp.wbar)
    a = a.real if isinstance(a, complex) else a
    r = math.sqrt(r2)
    return r, a * r


def killing_forms(kp: KleinPoint) -> tuple:
    """(H, D, K) evaluated from the half-plane coordinate alone:

        H = sigma w wbar / (w - wbar),   D = sigma (w + wbar) / (w - wbar),
        K = sigma / (w - wbar),

    real on both branches, and equal to the direct p_r^2/2 + I/r^2, p_r r,
    r^2/2 of the source state.
    """
    diff = kp.w - kp.wbar
    if diff == 0:
        raise ZeroWError("w = wbar: the forms are singular")
    h = kp.sigma * kp.w * kp.wbar / diff
    dd = kp.sigma * (kp.w + kp.wbar) / diff
    k = kp.sigma / diff
    out = []
    for z in (h, dd, k):
        if isinstance(z, complex):
            z = z.real
        out.append(float(z))
    return tuple(out)


def invert(kp: KleinPoint) -> KleinPoint:
    """The decoupling transformation w -> -1/w (and wbar -> -1/wbar).

    Preserves the upper half-plane and sqrt(2|I|); exchanges the H and K
    forms and flips D.
    """
    if kp.w == 0 or kp.wbar == 0:
        raise ZeroWError("inversion is undefined at w = 0")
    return KleinPoint(kp.branch, -1.0 / kp.w, -1.0 / kp.wbar, kp.sqrt2I)


def tilde_map(rs: Union[ReducedState, PhaseState, tuple], I: float) -> tuple:
    """Transformed radial pair: p~ = +sqrt(2H), r~ = D / sqrt(2H).

    Deterministic branch choice: p~ is the positive root and r~ carries the
    sign of D. Consistency contract (verified in the tests): the point
    w~ = -r~/p~ + i sqrt(2I)/p~^2 equals invert(to_klein(rs, I)).
    """
    r, p_r = _radial_pair(rs)
    h = 0.5 * p_r ** 2 + I / r ** 2
    if h <= 0:
        raise NonPositiveEnergyError(
            f"tilde map needs H > 0, got H = {h:.6g}")
    p_tilde = math.sqrt(2.0 * h)
    return p_tilde, (p_r * r) / p_tilde


def tilde_point(rs, I: float) -> KleinPoint:
    """w~ assembled from the tilde variables (equals invert(to_klein))."""
    p_t, r_t = tilde_map(rs, I)
    if I == 0.0:
        raise ZeroAngularEnergyError("w~ is undefined at I = 0")
    if I > 0:
        s = math.sqrt(2.0 * I)
        return KleinPoint(POSITIVE_I,
                          complex(-r_t / p_t, s / p_t ** 2),
                          complex(-r_t / p_t, -s / p_t ** 2), s)
    s = math.sqrt(-2.0 * I)
    return KleinPoint(NEGATIVE_I, -r_t / p_t + s / p_t ** 2,
                      -r_t / p_t - s / p_t ** 2, s)


# ---------------------------------------------------------------------------
# Observables on the full Cartesian phase space (for numeric brackets)
# ---------------------------------------------------------------------------

def _casimir_fn(sphere: SphericalSystem, d: int):
    """I as a dual-differentiable function of the Cartesian state, built
    from the angular data alone: I = (r^2 p^2 - (p.q)^2)/2 + U(angles)."""
    def fn(q, p):
        qq = np.dot(q, q)
        pp = np.dot(p, p)
        qp = np.dot(q, p)
        kin = 0.5 * (qq * pp - qp * qp)
        r = dual.sqrt(qq)
        if d == 1:
            return kin + sphere.U(np.zeros(0))
        phi = angles_from_unit(q / r, d)
        return kin + sphere.U(phi)
    return fn


def w_observables(sphere: SphericalSystem, branch: str = POSITIVE_I) -> dict:
    """Re/Im (or w/wbar) of the half-plane coordinate as Cartesian
    observables, dual-differentiable for the bracket engine."""
    d = sphere.d
    ifn = _casimir_fn(sphere, d)

    def re_fn(q, p):
        return np.dot(p, q) / np.dot(q, q)

    def s_fn(q, p):
        i_val = ifn(q, p)
        two_i = 2.0 * i_val if branch == POSITIVE_I else -2.0 * i_val
        return dual.sqrt(two_i) / np.dot(q, q)

    if branch == POSITIVE_I:
        return {
            "re_w": Observable(d, re_fn, name="Re w"),
            "im_w": Observable(d, s_fn, name="Im w"),
        }
    return {
        "w": Observable(d, lambda q, p: re_fn(q, p) + s_fn(q, p), name="w"),
        "wbar": Observable(d, lambda q, p: re_fn(q, p) - s_fn(q, p),
                           name="wbar"),
    }


def casimir_observable(sphere: SphericalSystem) -> Observable:
    return Observable(sphere.d, _casimir_fn(sphere, sphere.d), name="I")


def bracket_ww(sphere: SphericalSystem, s: PhaseState,
               branch: str = POSITIVE_I) -> complex:
    """Numeric {w, wbar} at a Cartesian state (chain rule through the
    half-plane map via the dual engine)."""
    obs = w_observables(sphere, branch)
    if branch == POSITIVE_I:
        return -2j * poisson_bracket(obs["re_w"], obs["im_w"], s)
    return complex(poisson_bracket(obs["w"], obs["wbar"], s))


def formula_ww(kp: KleinPoint) -> complex:
    """{w, wbar} = -(sigma / 2I) (w - wbar)^2, the closed half-plane form
    (reduces to -(i/sqrt(2I))(w-wbar)^2 on the positive branch)."""
    return -(kp.sigma / (2.0 * kp.I)) * (kp.w - kp.wbar) ** 2


@dataclass
class MixedBracketRow:
    """One angular coordinate's bracket with w, three ways."""

    name: str
    eom: float                 # V^a = {u^a, I}
    numeric: complex           # engine value of {u^a, w}
    consistent: complex        # (w - wbar) V^a / (4 I)
    displayed: complex         # (w - wbar) V^a / (2 I), kept for comparison


@dataclass
class BracketTable:
    """Closed-form vs numeric brackets of the half-plane coordinate."""

    branch: str
    ww_numeric: complex
    ww_formula: complex
    mixed: list
    notes: tuple = SIGN_NOTES

    @property
    def ww_residual(self) -> float:
        return abs(self.ww_numeric - self.ww_formula)

    def max_mixed_residual(self) -> float:
        if not self.mixed:
            return 0.0
        return max(abs(row.numeric - row.consistent) for row in self.mixed)


def expected_brackets(kp: KleinPoint, sphere: SphericalSystem,
                      rs: ReducedState) -> BracketTable:
    """Evaluate {w, wbar} and every {u^a, w} both from the closed formulas
    and from the numeric engine on the full Cartesian space.

    The table reports the self-consistent mixed prefactor 1/(4I) alongside
    the commonly displayed 1/(2I) (exactly twice it); the numeric column
    settles which one the canonical structure actually produces.
    """
    d = sphere.d
    s = from_hyperspherical(rs)
    ww_num = bracket_ww(sphere, s, kp.branch)
    ww_form = formula_ww(kp)
    mixed = []
    if d > 1:
        iobs = casimir_observable(sphere)
        wobs = w_observables(sphere, kp.branch)
        charts = chart_observables(d)
        diff = kp.w - kp.wbar
        for a in range(d - 1):
            for kind in ("phi", "pi"):
                name = f"{kind}_{a}"
                u = charts[name]
                v_a = poisson_bracket(u, iobs, s)
                if kp.branch == POSITIVE_I:
                    num = complex(poisson_bracket(u, wobs["re_w"], s),
                                  poisson_bracket(u, wobs["im_w"], s))
                else:
                    num = complex(poisson_bracket(u, wobs["w"], s))
                mixed.append(MixedBracketRow(
                    name=name,
                    eom=v_a,
                    numeric=num,
                    consistent=diff * v_a / (4.0 * kp.I),
                    displayed=diff * v_a / (2.0 * kp.I),
                ))
    return BracketTable(branch=kp.branch, ww_numeric=ww_num,
                        ww_formula=ww_form, mixed=mixed)


# ---------------------------------------------------------------------------
# Canonicity of the tilde map
# ---------------------------------------------------------------------------

def tilde_observables(sys: ConformalSystem) -> dict:
    """p~ and r~ as observables on the original Cartesian phase space."""
    hfn = sys.H.fn
    dfn = sys.D.fn

    def pt_fn(q, p):
        return dual.sqrt(2.0 * hfn(q, p))

    def rt_fn(q, p):
        return dfn(q, p) / dual.sqrt(2.0 * hfn(q, p))

    return {
        "p_tilde": Observable(sys.d, pt_fn, name="p~"),
        "r_tilde": Observable(sys.d, rt_fn, name="r~"),
    }


@dataclass
class CanonicityReport:
    """Numeric brackets of the transformed coordinates under the original
    canonical structure, and the resulting verdict."""

    dimension: int
    brackets: dict
    samples: int
    tol: float
    seed: int
    verdict: str
    sign_notes: tuple = SIGN_NOTES

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "brackets": {k: dict(v) for k, v in self.brackets.items()},
            "samples": self.samples,
            "tol": self.tol,
            "seed": self.seed,
            "verdict": self.verdict,
            "sign_notes": list(self.sign_notes),
        }


def canonicity_report(model: Union[ModelSpec, ConformalSystem],
                      samples: int = 100, tol: float = 1e-8,
                      seed: int = 0) -> CanonicityReport:
    """Decide numerically whether the tilde map is canonical.

    The pair bracket {p~, r~} equals 1 in every dimension (it only uses
    {H, D} = 2H). In d = 1 that is the whole story and the verdict is
    canonical. In d > 1 the transformed radial coordinates fail to commute
    with the angular chart: residuals like {r~, phi} sit at O(1), far above
    any bracket tolerance, at the majority of sampled states.
    """
    sys = build(model) if isinstance(model, ModelSpec) else model
    d = sys.d
    rng = np.random.default_rng(seed)

    def admissible(s):
        try:
            h = sys.H(s)
            i_val = 0.5 * (4.0 * h * sys.K(s) - sys.D(s) ** 2)
        except Exception:
            return False
        if not (h > 1e-2 and i_val > 1e-2):
            return False
        if d == 1:
            return s.q[0] > 1e-2
        try:
            to_hyperspherical(s, delta=1e-3)
        except Exception:
            return False
        return True

    states = sample_states(d, samples, rng,
                           singular_distance=sys.singular_distance,
                           predicate=admissible)

    tobs = tilde_observables(sys)
    names = ["{p~,r~}-1"]
    if d > 1:
        charts = chart_observables(d)
        for a in range(d - 1):
            names += [f"{{r~,phi_{a}}}", f"{{r~,pi_{a}}}",
                      f"{{p~,phi_{a}}}", f"{{p~,pi_{a}}}"]
    names.append("{w,wbar}-formula")

    table = {n: {"max_residual": 0.0, "exceed_count": 0} for n in names}
    sphere = _sphere_for(sys)
    mixed_majority = 0
    for s in states:
        res = abs(poisson_bracket(tobs["p_tilde"], tobs["r_tilde"], s) - 1.0)
        _tally(table["{p~,r~}-1"], res, tol)
        sample_worst = 0.0
        if d > 1:
            for a in range(d - 1):
                for tn, un in ((f"{{r~,phi_{a}}}", f"phi_{a}"),
                               (f"{{r~,pi_{a}}}", f"pi_{a}")):
                    val = abs(poisson_bracket(tobs["r_tilde"], charts[un], s))
                    _tally(table[tn], val, tol)
                    sample_worst = max(sample_worst, val)
                for tn, un in ((f"{{p~,phi_{a}}}", f"phi_{a}"),
                               (f"{{p~,pi_{a}}}", f"pi_{a}")):
                    val = abs(poisson_bracket(tobs["p_tilde"], charts[un], s))
                    _tally(table[tn], val, tol)
                    sample_worst = max(sample_worst, val)
            if sample_worst > 10.0 * tol:
                mixed_majority += 1
        rs = to_hyperspherical(s) if d > 1 else None
        i_val = 0.5 * (4.0 * sys.H(s) * sys.K(s) - sys.D(s) ** 2)
        kp = to_klein(rs if d > 1 else s, i_val)
        res = abs(bracket_ww(sphere, s, kp.branch) - formula_ww(kp))
        _tally(table["{w,wbar}-formula"], res, tol)

    off_block = [n for n in names if n not in ("{p~,r~}-1",
                                               "{w,wbar}-formula")]
    canonical = (table["{p~,r~}-1"]["max_residual"] < tol and
                 all(table[n]["max_residual"] < tol for n in off_block))
    if d > 1 and mixed_majority > len(states) // 2:
        canonical = False
    return CanonicityReport(
        dimension=d, brackets=table, samples=samples, tol=tol, seed=seed,
        verdict="canonical" if canonical else "non-canonical")


def _tally(entry: dict, value: float, tol: float):
    entry["max_residual"] = max(entry["max_residual"], value)
    if value > tol:
        entry["exceed_count"] += 1


def _sphere_for(sys: ConformalSystem) -> SphericalSystem:
    from .reduction import spherical_system_from
    return spherical_system_from(sys.V, sys.d)


# ---------------------------------------------------------------------------
# Symplectic form in half-plane coordinates
# ---------------------------------------------------------------------------

def coordinate_observables(sphere: SphericalSystem) -> list:
    """Ordered (name, Observable) pairs for (Re w, Im w, phi..., pi...)."""
    d = sphere.d
    wobs = w_observables(sphere, POSITIVE_I)
    coords = [("re_w", wobs["re_w"]), ("im_w", wobs["im_w"])]
    if d > 1:
        charts = chart_observables(d)
        coords += [(f"phi_{a}", charts[f"phi_{a}"]) for a in range(d - 1)]
        coords += [(f"pi_{a}", charts[f"pi_{a}"]) for a in range(d - 1)]
    return coords


def bracket_matrix(sphere: SphericalSystem, s: PhaseState) -> np.ndarray:
    """Antisymmetric matrix {xi_j, xi_k} of the half-plane coordinates."""
    coords = coordinate_observables(sphere)
    m = len(coords)
    B = np.zeros((m, m))
    for j in range(m):
        for k in range(j + 1, m):
            B[j, k] = poisson_bracket(coords[j][1], coords[k][1], s)
            B[k, j] = -B[j, k]
    return B


def assemble_omega(rs: Union[ReducedState, PhaseState, tuple],
                   sphere: SphericalSystem, I: float) -> np.ndarray:
    """Matrix of the symplectic 2-form in coordinates
    (Re w, Im w, phi^a, pi_a), positive-I branch.

    The radial block is the hyperbolic (Kahler) 2-form
    sqrt(2I)/(2 Im^2) dRe ^ dIm; the angular invariant couples the blocks
    through d sqrt(2I) = (dI/du^a) du^a / sqrt(2I); the angular block is
    the canonical dphi ^ dpi (gauge A0 = pi dphi). Oriented so that the
    matrix is the exact inverse of :func:`bracket_matrix`:
    assemble_omega @ bracket_matrix = +Id.
    """
    if I <= 0:
        raise ZeroAngularEnergyError("the Kahler block needs I > 0")
    r, p_r = _radial_pair(rs)
    d = sphere.d
    g = math.sqrt(2.0 * I)
    im_w = g / r ** 2
    m = 2 * d
    omega = np.zeros((m, m))
    omega[0, 1] = g / (2.0 * im_w ** 2)
    if d > 1:
        if not isinstance(rs, ReducedState):
            raise ValueError("pass a ReducedState in d > 1")
        _, (dI_dphi, dI_dpi) = dual.gradient(
            lambda f, c: sphere.energy(f, c), rs.phi, rs.pi)
        dg_du = np.concatenate([dI_dphi, dI_dpi]) / g
        for a in range(2 * (d - 1)):
            omega[0, 2 + a] = -dg_du[a] / (2.0 * im_w)
        for a in range(d - 1):
            omega[2 + a, 2 + (d - 1) + a] = 1.0
    return omega - omega.T


# ---------------------------------------------------------------------------
# 1D half-plane geometry helpers (hyperbolic metric, Kahler potential,
# and the bracket induced on functions of w)
# ---------------------------------------------------------------------------

def metric_coefficient(w: complex, g: float) -> float:
    """Coefficient of dw dwbar in the hyperbolic metric -g/(wbar-w)^2
    (real and positive on the upper half-plane)."""
    return (-g / (w.conjugate() - w) ** 2).real


def kahler_potential(w: complex, g: float) -> float:
    """g log( i (wbar - w) ) = g log(2 Im w), real on the half-plane."""
    return g * math.log(2.0 * w.imag)


def kahler_hessian_fd(w: complex, g: float, rel_step: float = 1e-4) -> float:
    """d^2/dw dwbar of the Kahler potential via a finite-difference
    Laplacian (the independent check of :func:`metric_coefficient`).

    Fourth-order stencils on extended-precision floats keep the oracle
    below 1e-10 relative error on the tested grid.
    """
    ld = np.longdouble

    def f(x, y):
        return ld(g) * np.log(ld(2.0) * y)

    x0, y0 = ld(w.real), ld(w.imag)
    h = ld(rel_step) * y0

    def second(fn):
        return (-fn(2 * h) + 16 * fn(h) - ld(30.0) * fn(ld(0.0))
                + 16 * fn(-h) - fn(-2 * h)) / (12 * h * h)

    lap = (second(lambda e: f(x0 + e, y0)) + second(lambda e: f(x0, y0 + e)))
    return float(0.25 * lap)


def _wirtinger(fn, w: complex, h: float = 1e-6) -> tuple:
    """(df/dw, df/dwbar) of a complex-valued fn of (w, conj w) by central
    differences in the real and imaginary directions."""
    fx = (fn(w + h) - fn(w - h)) / (2.0 * h)
    fy = (fn(w + 1j * h) - fn(w - 1j * h)) / (2.0 * h)
    return 0.5 * (fx - 1j * fy), 0.5 * (fx + 1j * fy)


def halfplane_bracket(F, G, w: complex, g: float) -> complex:
    """Bracket of two functions of (w, wbar) induced by
    {w, wbar} = -(i/g)(w - wbar)^2 as the only nonzero bracket."""
    ww = -(1j / g) * (w - w.conjugate()) ** 2
    Fw, Fwb = _wirtinger(F, w)
    Gw, Gwb = _wirtinger(G, w)
    return (Fw * Gwb - Fwb * Gw) * ww


def killing_form_functions(g: float) -> dict:
    """The closed-form H, D, K as functions of w on the upper half-plane."""
    def h_fn(w):
        return 1j * g * w * w.conjugate() / (w - w.conjugate())

    def d_fn(w):
        return 1j * g * (w + w.conjugate()) / (w - w.conjugate())

    def k_fn(w):
        return 1j * g / (w - w.conjugate())

    return {"H": h_fn, "D": d_fn, "K": k_fn}
