"""Algebra closure, homogeneity checks, and the Casimir invariant."""

import numpy as np
import pytest

import confmech.dual as dual
from confmech import models
from confmech.conformal import (
    build_system,
    casimir_I,
    check_homogeneity,
    verify_algebra,
)
from confmech.phase import Observable, PhaseState, integrate_verlet
from confmech.reduction import spherical_energy, spherical_system_from, \
    to_hyperspherical

from conftest import chart_interior, model_states


def _cubic_potential(d):
    # homogeneous of degree -3: breaks exactly one algebra relation
    def fn(q, p):
        r = dual.sqrt(np.dot(q, q))
        return 1.0 / (r * r * r)
    return Observable(d, fn, name="V[r^-3]")


class TestBuildSystem:
    def test_free(self):
        sys_ = models.build(models.spec("free", d=3))
        s = PhaseState([1.0, 2.0, 0.5], [0.3, -1.0, 0.2])
        assert sys_.H(s) == pytest.approx(0.5 * (0.09 + 1.0 + 0.04))

    def test_eq1_values(self):
        sys_ = models.build(models.spec("inverse-square", d=1, kappa=0.5))
        s = PhaseState([2.0], [1.0])
        assert sys_.H(s) == pytest.approx(0.625)
        assert sys_.D(s) == pytest.approx(2.0)
        assert sys_.K(s) == pytest.approx(2.0)

    def test_inverse_square_d3(self):
        sys_ = models.build(models.spec("inverse-square", d=3, kappa=1.0))
        s = PhaseState([1.0, 1.0, 0.0], [0.0, 0.0, 0.0])
        assert sys_.H(s) == pytest.approx(0.5)


class TestHomogeneity:
    def test_inverse_square_passes(self):
        for d in (1, 2, 3):
            V = models.potential(models.spec("inverse-square", d=d,
                                             kappa=2.0))
            rep = check_homogeneity(V, d, samples=50, tol=1e-9, seed=0)
            assert rep.passed and rep.max_residual < 1e-10

    def test_cubic_fails(self):
        d = 2
        rep = check_homogeneity(_cubic_potential(d), d, samples=50,
                                tol=1e-9, seed=0)
        assert not rep.passed
        # residual |q.gradV + 2V| / max(1,|V|) = |V| / max(1,|V|) for
        # degree -3, so it sits at the |V| scale
        assert rep.max_residual > 1e-2

    def test_calogero_passes(self):
        c3 = models.calogero_relative(3, 1.0)
        rep = check_homogeneity(c3.V, 2, samples=50, tol=1e-9, seed=1,
                                singular_distance=c3.singular_distance)
        assert rep.passed

    def test_report_dict(self):
        V = models.potential(models.spec("inverse-square", d=2, kappa=1.0))
        rep = check_homogeneity(V, 2, samples=10, tol=1e-9, seed=5)
        d = rep.to_dict()
        assert set(d) == {"max_residual", "samples", "tol", "seed", "pass"}
        assert d["seed"] == 5


class TestVerifyAlgebra:
    def test_inverse_square_d3(self):
        sys_ = models.build(models.spec("inverse-square", d=3, kappa=1.0))
        rep = verify_algebra(sys_, samples=200, tol=1e-8, seed=0)
        assert rep.passed
        assert all(v < 1e-8 for v in rep.residuals.values())

    def test_free_d2(self):
        rep = verify_algebra(models.build(models.spec("free", d=2)),
                             samples=100, tol=1e-8, seed=0)
        assert rep.passed

    def test_cubic_fails_only_hd(self):
        d = 2
        sys_ = build_system(_cubic_potential(d), d,
                            singular_distance=lambda q:
                            float(np.linalg.norm(q)))
        rep = verify_algebra(sys_, samples=100, tol=1e-8, seed=0)
        assert not rep.passed
        assert rep.failing() == ["{H,D}-2H"]
        assert rep.residuals["{H,K}-D"] < 1e-8
        assert rep.residuals["{K,D}+2K"] < 1e-8

    def test_report_json_keys(self):
        rep = verify_algebra(models.build(models.spec("free", d=2)),
                             samples=10, tol=1e-8, seed=3)
        d = rep.to_dict()
        assert list(d) == ["relations", "residuals", "samples", "tol",
                           "seed", "pass"]


class TestCasimir:
    def test_eq1_value(self):
        sys_ = models.build(models.spec("inverse-square", d=1, kappa=0.5))
        assert casimir_I(sys_, PhaseState([2.0], [1.0])) == \
            pytest.approx(0.5, abs=1e-14)

    def test_free_angular_momentum(self):
        sys_ = models.build(models.spec("free", d=2))
        s = PhaseState([1.0, 0.0], [0.0, 1.0])
        assert casimir_I(sys_, s) == pytest.approx(0.5, abs=1e-14)

    def test_matches_spherical_energy(self, catalog_systems):
        for ms, sys_ in catalog_systems:
            if sys_.d < 2:
                continue
            sphere = spherical_system_from(sys_.V, sys_.d)
            for s in model_states(sys_, 20, seed=11,
                                  predicate=chart_interior):
                rs = to_hyperspherical(s)
                i_direct = casimir_I(sys_, s)
                i_sphere = spherical_energy(sphere, rs.phi, rs.pi)
                assert abs(i_direct - i_sphere) < 1e-10 * max(
                    1.0, abs(i_direct))


class TestConservation:
    def test_invariant_and_evolution_laws(self):
        sys_ = models.build(models.spec("inverse-square", d=2, kappa=1.0))
        s0 = models.reference_state(models.spec("inverse-square", d=2,
                                                kappa=1.0))
        traj = integrate_verlet(sys_, s0, 1e-3, 10.0)
        I = traj.monitors["I"]
        assert np.max(np.abs(I - I[0])) / max(1.0, abs(I[0])) < 1e-6
        # dD/dt = 2H and d(2K)/dt = 2D make D linear and 2K quadratic
        H0, D0, K0 = (traj.monitors["H"][0], traj.monitors["D"][0],
                      traj.monitors["K"][0])
        t = traj.times
        npt_tol = 1e-4
        assert np.max(np.abs(traj.monitors["D"] - (D0 + 2 * H0 * t))) < \
            npt_tol * max(1.0, np.max(np.abs(traj.monitors["D"])))
        two_k = 2 * traj.monitors["K"]
        exact = 2 * K0 + 2 * D0 * t + 2 * H0 * t * t
        assert np.max(np.abs(two_k - exact)) < npt_tol * max(
            1.0, np.max(np.abs(two_k)))
