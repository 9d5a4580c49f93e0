"""From energy minimizers to best packing.

As s grows, g(s)^{1/s} approaches 1/delta_N and the minimizers approach a
best-packing configuration.
"""
import math

from slogenergy import best_packing, infinity_limit_probe, make_circle

circle = make_circle(0.05, "geodesic")
n = 4
packing = best_packing(circle, n)
print("best packing distance", packing.delta, "expected", 2 * math.pi * 0.05 / n)

schedule = [2.0**k for k in range(1, 11)]
rows = infinity_limit_probe(circle, n, 1.0, schedule, packing_config=packing.config)
print(f"{'s':>6} {'g^(1/s)':>12} {'1/delta':>10} {'error':>10} {'bound':>10}")
for r in rows:
    print(f"{r.s:6.0f} {r.g_pow:12.6f} {r.target:10.6f} {r.error:10.2e} {r.error_bound:10.2e}")
