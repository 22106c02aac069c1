"""The limiting one-point density and its moments.

Prints the support, a coarse profile of the density and compares its
moments with the closed-form limit. Also shows the density recovered by
inverting the resolvent on the real axis.
"""

from qrmt.density import density_curve, density_moment, rho, stieltjes_inversion, support
from qrmt.moments import mu0

lam = 1.0
sp = support(lam)
print(f"lambda = {lam}: support [{sp.z_minus:.6f}, {sp.z_plus:.6f}]")
cur = density_curve(lam, 12)
print(f"mass on the grid quadrature: {cur.mass:.12f}")
for x, r in zip(cur.grid, cur.values):
    print(f"  x = {x:8.5f}  rho = {r:8.5f}  " + "#" * int(40 * r / max(cur.values)))

print("\nmoments of rho against the closed form")
for l in range(1, 6):
    print(f"  l={l}: {density_moment(l, lam):.12g}  vs  {mu0(l, lam):.12g}")

x = sp.z_minus + 0.4 * sp.width
print(f"\nresolvent inversion at x = {x:.4f}: {stieltjes_inversion(x, lam):.10f}  (direct {rho(x, lam):.10f})")
