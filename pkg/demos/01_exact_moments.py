"""Exact power-sum moments and their large-N limit.

Computes q^{N l} m_l for a small ensemble by three independent routes,
then follows the scaled moments toward the limiting values as N grows
with q = exp(-lambda/N).
"""

from qrmt.ensemble import QParams
from qrmt.moments import cross_route_reldiff, mu0, mu2, power_sum_moment, scaled_moment

p = QParams.from_q(4, 0.5)
print("N = 4, q = 1/2")
for l in range(1, 6):
    m = power_sum_moment(l, p)
    print(f"  l={l}: q^(N l) m_l = {float(m.value):.12g}   route spread {cross_route_reldiff(l, p):.1e}")

lam = 1.0
print("\nscaled moments at lambda = 1: finite N minus the limit, times N^2")
for l in (1, 2, 3):
    row = [(scaled_moment(l, N, lam) - mu0(l, lam)) * N * N for N in (20, 40, 80, 160)]
    print(f"  l={l}: " + "  ".join(f"{v:.6f}" for v in row) + f"   -> mu2 = {mu2(l, lam):.6f}")
