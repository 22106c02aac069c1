"""Correlation kernels and their scaling limits.

Checks that the kernel integrates to N, then watches the rescaled bulk
kernel approach the sine kernel and the rescaled edge kernel approach the
Airy kernel as the cylinder circumference grows.
"""

import math

from qrmt.ensemble import QParams
from qrmt.kernels import airy_limit_error, kernel_trace, sine_limit_error

for N in (1, 3, 5):
    print(f"trace of the finite-N kernel, N={N}: {kernel_trace(QParams.from_q(N, 0.5)):.10f}")

print("\nbulk kernel vs sine kernel (c = 1)")
Ls = [5.3, 8.0, 12.0, 18.0, 24.0]
for L, e in zip(Ls, sine_limit_error(Ls)):
    eps = 2 * math.pi**2 / L**2
    print(f"  L = {L:5.1f}  eps = {eps:.4f}  sup error = {e:.4e}  error/eps = {e / eps:.3f}")

print("\nedge kernel vs Airy kernel")
for eps in (4e-3, 2e-3, 1e-3, 5e-4):
    e = airy_limit_error(eps)
    print(f"  eps = {eps:.0e}  sup error = {e:.3e}  error/eps^(2/3) = {e / eps ** (2 / 3):.3f}")
