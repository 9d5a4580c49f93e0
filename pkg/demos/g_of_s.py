"""The minimal energy as a function of the exponent.

Sweep g(s) on a segment and look at the one-sided derivatives at s0 = 1.
Each difference quotient is bracketed by log^{t+1} energies of the
minimizers at its two ends.
"""
import numpy as np

from slogenergy import derivative_probe, make_segment, sweep_g

seg = make_segment(0.0, 0.9)
s_list = np.round(np.linspace(0, 3, 13), 12)
records = sweep_g(seg, 4, 1.0, s_list)

print(f"{'s':>5} {'g(s)':>14} {'E_log^(t+1)':>14} {'separation':>11}")
for r in records:
    print(f"{r.s:5.2f} {r.g.linear:14.6f} {r.e_logt1:14.6f} {r.separation:11.6f}")

probe = derivative_probe(seg, 4, 1.0, 1.0)
print()
print("right quotient ", probe.fd_plus, "bracket", probe.plus_bracket)
print("left quotient  ", probe.fd_minus, "bracket", probe.minus_bracket)
print("extrapolated   ", probe.d_plus, probe.d_minus)
