"""Equal spacing on small circles.

Minimize the energy of N points on a geodesic circle and compare the result
with N equally spaced points, for a few exponents.
"""
from slogenergy import KernelParams, circle_optimality_check, energy, equally_spaced, make_circle, minimize_energy
from slogenergy.configurations import config_distance

circle = make_circle(0.1, "geodesic")
params = KernelParams(s=1.0, t=0.0)

# 16 random starts; the best one wins
result = minimize_energy(circle, 5, params)
eq = equally_spaced(circle, 5)
print("optimizer energy      ", result.energy.linear)
print("equally spaced energy ", energy(eq, params).linear)
print("signature gap         ", config_distance(result.config, eq))
print("starts agreeing       ", result.starts_agreeing, "of 16")

# the same comparison wrapped with a check of the convexity hypothesis
for s, t in [(0.5, 1.0), (2.0, 1.0), (3.0, 0.0)]:
    rep = circle_optimality_check(circle, 6, KernelParams(s, t))
    print(f"s={s} t={t}: pass={rep.passed} gap={rep.max_signature_gap:.1e} under [{rep.hypothesis}]")
