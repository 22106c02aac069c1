"""Gap probability at the soft edge.

Evaluates the probability that no particle lies left of s, the density of
the leftmost particle, and the two-dimensional gas analogue with its cubic
right tail.
"""

import math

import numpy as np

from qrmt.ensemble import QParams
from qrmt.gap import gap2d_log_product, gap_probability, gap_series_bracket, leftmost_pdf, right_tail_exponent

p = QParams.from_cL(1, 1.0, 2 * math.pi)
print("   s     E(s)          bracket                 leftmost pdf")
for s in np.arange(-3.0, 3.01, 1.0):
    lo, hi = gap_series_bracket(s, p)
    print(f"{s:5.1f}  {gap_probability(s, p):.8f}  [{lo:.6f}, {hi:.6f}]  {leftmost_pdf(s, p):.6e}")

print("\ntwo-dimensional gas, L = 2 pi")
for s in (5.0, 10.0, 15.0, 20.0):
    v = -gap2d_log_product(s, 2 * math.pi)
    print(f"  s = {s:4.1f}  -log E = {v:10.4f}  s^3 L/(24 pi) = {s**3 / 12:10.4f}")
fit = right_tail_exponent(2 * math.pi)
print(f"fitted cubic coefficient {fit.coefficient:.5f} vs {fit.target:.5f} (ratio {fit.ratio:.4f})")
