"""Hyperspherical reduction and the sphere counterparts of the catalog.

Splitting off r and p_r leaves a Hamiltonian system on the unit sphere
whose energy I = pi.g.pi/2 + U(angles) replaces the 1D coupling constant:
I always equals the Casimir combination (4HK - D^2)/2 of the Cartesian
state. The conformal oscillator and Coulomb potentials reduce to the
sphere (Higgs) oscillator and the sphere Coulomb potential.
"""

import numpy as np

from confmech import PhaseState, casimir_I, models
from confmech.reduction import (
    angular_potential,
    from_hyperspherical,
    spherical_energy,
    spherical_system_from,
    to_hyperspherical,
)

print("== the chart and its inverse ==")
s = PhaseState([2.0, 0.0, 1.0], [1.0, 1.0, 0.0])
rs = to_hyperspherical(s)
print(f"q={s.q}, p={s.p}")
print(f"  -> r={rs.r:.6f}, p_r={rs.p_r:.6f}, angles={np.round(rs.phi, 6)},"
      f" momenta={np.round(rs.pi, 6)}")
back = from_hyperspherical(rs)
print(f"round trip error: {np.max(np.abs(back.q - s.q)):.1e} (q), "
      f"{np.max(np.abs(back.p - s.p)):.1e} (p)")

print("\n== I equals the Casimir combination for every model ==")
rng = np.random.default_rng(1)
for ms in models.catalog():
    if ms.d < 2:
        continue
    sys_ = models.build(ms)
    sphere = spherical_system_from(sys_.V, sys_.d)
    worst = 0.0
    count = 0
    while count < 25:
        q = rng.uniform(-2, 2, ms.d)
        p = rng.uniform(-2, 2, ms.d)
        if sys_.singular_distance(q) < 0.05:
            continue
        try:
            r = to_hyperspherical(PhaseState(q, p), delta=1e-2)
        except Exception:
            continue
        st = PhaseState(q, p)
        worst = max(worst, abs(casimir_I(sys_, st)
                               - spherical_energy(sphere, r.phi, r.pi)))
        count += 1
    print(f"{ms.label:42s} max |I_casimir - I_sphere| = {worst:.2e}")

print("\n== sphere counterparts in the first polar angle ==")
omega, gamma = 1.0, 2.0
V_h = models.potential(models.spec("higgs", d=3, omega=omega))
V_c = models.potential(models.spec("coulomb", d=3, gamma=gamma))
print("  theta     U_higgs   w^2 tan^2/2 + w^2    U_coulomb   g cot(theta)")
from confmech.reduction import ReducedState
for theta in (np.pi / 6, np.pi / 4, np.pi / 3, 1.2):
    rs = ReducedState(r=1.0, p_r=0.0, phi=[theta, 0.0], pi=[0.0, 0.0])
    uh = angular_potential(V_h, rs)
    uc = angular_potential(V_c, rs)
    print(f"  {theta:.4f}  {uh:9.5f}  {0.5 * np.tan(theta)**2 + 1:12.5f}"
          f"      {uc:9.5f}  {gamma / np.tan(theta):12.5f}")
print("(the oscillator correspondence holds up to the constant omega^2;")
print(" the oscillator wall sits on the equator theta = pi/2, where the")
print(" sphere Coulomb potential crosses zero)")
