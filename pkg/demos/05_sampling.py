"""Metropolis sampling of the log-gas compared with exact results.

Runs independent chains for N = 4 at q = 1/2 and compares the sampled
one-point histogram and power-sum moments with their exact values.
"""

import math

from qrmt.ensemble import QParams
from qrmt.moments import power_sum_moment
from qrmt.sampler import bin_average_density, default_edges, run_chain

p = QParams.from_cL(4, 1 / (2 * math.log(2)), 2 * math.pi)
edges = default_edges(p, 20)
st = run_chain(p, 5000, seed=7, n_chains=40, edges=edges)
exact = bin_average_density(edges, p)
print(f"acceptance {st.acceptance_rate:.3f}, {st.n_batches} batches, {st.audits} energy audits")
print("   x-bin              sampled             exact")
for a, b, d, e, x in zip(edges[:-1], edges[1:], st.density, st.density_se, exact):
    print(f"  [{a:6.2f},{b:6.2f})  {d:.4f} +- {e:.4f}   {x:.4f}")
for l, (m, se) in sorted(st.moments.items()):
    print(f"moment l={l}: {m:.4f} +- {se:.4f}  exact {float(power_sum_moment(l, p).value):.4f}")
