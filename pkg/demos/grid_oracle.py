"""Checking the continuous solver against exhaustive search on a grid.

The grid minimum can differ from the continuous one by at most
N(N-1) * L_k * mesh, where L_k bounds the kernel slope.
"""
from slogenergy import KernelParams, compare_with_grid, make_circle, make_segment

for space, m in [(make_segment(0.0, 0.9), 120), (make_circle(0.1, "geodesic"), 120)]:
    for n in (2, 3, 4):
        cmp = compare_with_grid(space, n, KernelParams(2.0, 1.0), m)
        print(f"{space.id:36s} N={n} continuous={cmp.continuous:12.6f} grid={cmp.grid:12.6f} "
              f"gap={cmp.gap:.1e} eps={cmp.eps_grid:.1e} ok={cmp.passes}")
