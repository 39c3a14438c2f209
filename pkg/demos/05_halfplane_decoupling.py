"""The half-plane picture of the radial dynamics and the decoupling map.

For I > 0 the pair (r, p_r) packs into w = p_r/r + i sqrt(2I)/r^2 on the
upper half-plane; H, D, K become Killing potentials of the hyperbolic
metric, and the inversion w -> -1/w swaps H with K and flips D. The induced
change of radial variables p~ = sqrt(2H), r~ = D/sqrt(2H) is canonical in
d = 1 but provably not canonical in d > 1: the new coordinates pick up
order-one brackets with the angular ones through I(u).
"""

import numpy as np

from confmech import PhaseState, casimir_I, models
from confmech.lobachevsky import (
    assemble_omega,
    bracket_matrix,
    canonicity_report,
    expected_brackets,
    invert,
    killing_forms,
    tilde_map,
    to_klein,
)
from confmech.reduction import spherical_system_from, to_hyperspherical

print("== the map and the Killing forms ==")
kp = to_klein((1.0, 1.0), 0.5)  # r = 1, p_r = 1, I = 1/2
print(f"w = {kp.w}")
print(f"(H, D, K) from w alone: {killing_forms(kp)}")
print(f"direct: H = p_r^2/2 + I/r^2 = 1.0,  D = p_r r = 1.0,  K = r^2/2 = 0.5")

print("\n== inversion transport ==")
ki = invert(kp)
print(f"-1/w = {ki.w}")
print(f"forms after inversion: {killing_forms(ki)}   (H <-> K, D -> -D)")
p_t, r_t = tilde_map((1.0, 1.0), 0.5)
print(f"tilde variables: p~ = sqrt(2H) = {p_t:.7f}, r~ = D/sqrt(2H) = {r_t:.7f}")
print(f"w~ = -r~/p~ + i sqrt(2I)/p~^2 = {-r_t / p_t + 1j * 1.0 / p_t**2}"
      " = -1/w")

print("\n== bracket structure on the half-plane ==")
free2 = models.build(models.spec("free", d=2))
sphere = spherical_system_from(free2.V, 2)
s = PhaseState([1.0, 0.0], [1.0, 1.0])
rs = to_hyperspherical(s)
kp = to_klein(rs, casimir_I(free2, s))
table = expected_brackets(kp, sphere, rs)
print(f"{{w, wbar}} engine:  {table.ww_numeric}")
print(f"{{w, wbar}} formula: {table.ww_formula}   (-(i/sqrt(2I))(w-wbar)^2)")
row = {r.name: r for r in table.mixed}["phi_0"]
print(f"{{phi, w}}  engine:      {row.numeric}")
print(f"(w-wbar) V^phi / (4I) = {row.consistent}   <- self-consistent")
print(f"(w-wbar) V^phi / (2I) = {row.displayed}   <- often quoted; 2x off")

omega = assemble_omega(rs, sphere, casimir_I(free2, s))
B = bracket_matrix(sphere, s)
print(f"\nsymplectic form in (Re w, Im w, phi, pi):\n{np.round(omega, 6)}")
print(f"omega @ bracket matrix = identity to "
      f"{np.max(np.abs(omega @ B - np.eye(4))):.1e}")

print("\n== canonicity verdicts ==")
for ms in (models.spec("inverse-square", d=1, kappa=0.5),
           models.spec("free", d=2),
           models.spec("inverse-square", d=3, kappa=1.0)):
    rep = canonicity_report(ms, samples=40, tol=1e-8, seed=0)
    worst_mixed = max((v["max_residual"] for k, v in rep.brackets.items()
                       if k.startswith("{r~,") or k.startswith("{p~,phi")),
                      default=0.0)
    print(f"d = {rep.dimension}: {rep.verdict:14s} "
          f"|{{p~,r~}}-1| = {rep.brackets['{p~,r~}-1']['max_residual']:.1e}, "
          f"worst mixed bracket = {worst_mixed:.1e}")
print("\nthe d=1 change of variables is canonical; in d > 1 the decoupling")
print("necessarily stirs the angular sector, so it is not canonical there")
