import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slogenergy.energy import energy_from_distances
from slogenergy.kernels import KernelParams
from slogenergy.oracle import (
    BudgetExceeded,
    GridBudget,
    compare_with_grid,
    grid_epsilon,
    grid_minimize,
    grid_pack,
    kernel_lipschitz,
)
from slogenergy.spaces import discretize, make_circle, make_finite, make_segment

SEG_GRID = discretize(make_segment(0.0, 0.9), 10)
GEO60 = discretize(make_circle(0.1, "geodesic"), 60)


def brute_force(space, n, params):
    best = None
    for idx in itertools.combinations(range(space.size), n):
        D = space.matrix[np.ix_(idx, idx)]
        e = energy_from_distances(D[np.triu_indices(n, 1)], params).log
        if best is None or e < best[0]:
            best = (e, list(idx))
    return best


def test_segment_grid_examples():
    two = grid_minimize(SEG_GRID, 2, KernelParams(1, 0))
    assert two.config.points.tolist() == [0, 9]
    assert two.energy.linear == pytest.approx(2 / 0.9, rel=1e-14)
    three = grid_minimize(SEG_GRID, 3, KernelParams(1, 0))
    # 0.4 and 0.5 tie; the lexicographically smaller index set wins
    assert three.config.points.tolist() == [0, 4, 9]
    assert three.energy.linear == pytest.approx(2 * (1 / 0.4 + 1 / 0.5 + 1 / 0.9), rel=1e-14)
    assert three.energy.linear == pytest.approx(11.2222222, abs=1e-6)


def test_circle_grid_example():
    res = grid_minimize(GEO60, 3, KernelParams(1, 0))
    assert res.config.points.tolist() == [0, 20, 40]
    assert res.energy.linear == pytest.approx(90 / math.pi, rel=1e-14)


def test_grid_pack_examples():
    assert grid_pack(SEG_GRID, 4).delta == pytest.approx(0.3)
    assert grid_pack(GEO60, 5).delta == pytest.approx(2 * math.pi * 0.1 * 12 / 60, rel=1e-14)
    with pytest.raises(ValueError, match="exceeds"):
        grid_pack(SEG_GRID, 11)


def test_budget():
    grid = discretize(make_circle(0.1, "geodesic"), 360)
    with pytest.raises(BudgetExceeded) as err:
        grid_minimize(grid, 4, KernelParams(1, 0))
    assert err.value.combinations == math.comb(360, 4)
    with pytest.raises(ValueError):
        GridBudget(0)


def test_needs_finite_space():
    with pytest.raises(TypeError):
        grid_minimize(make_segment(0, 0.9), 2, KernelParams(1, 0))


@settings(max_examples=60)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 4), s=st.floats(0, 6), t=st.floats(0, 3))
def test_matches_brute_force(seed, n, s, t):
    rng = np.random.default_rng(seed)
    pts = np.sort(rng.uniform(0, 0.9, size=9))
    D = np.abs(pts[:, None] - pts[None, :])
    if np.any(D[np.triu_indices(9, 1)] < 1e-6):
        return
    space = make_finite(D)
    p = KernelParams(s, t)
    res = grid_minimize(space, n, p)
    ref = brute_force(space, n, p)
    assert res.energy.log == pytest.approx(ref[0], rel=1e-12, abs=1e-12)


@settings(max_examples=30)
@given(seed=st.integers(0, 2**32 - 1))
def test_relabeling_invariance(seed):
    rng = np.random.default_rng(seed)
    perm = rng.permutation(GEO60.size)
    shuffled = make_finite(GEO60.matrix[np.ix_(perm, perm)])
    p = KernelParams(1.5, 0.5)
    assert grid_minimize(shuffled, 3, p).energy.linear == pytest.approx(grid_minimize(GEO60, 3, p).energy.linear,
                                                                      rel=1e-12)
    assert grid_pack(shuffled, 4).delta == grid_pack(GEO60, 4).delta


def test_kernel_lipschitz():
    assert kernel_lipschitz(KernelParams(1, 0), 0.1, 0.9) == pytest.approx(100.0, rel=1e-12)
    assert kernel_lipschitz(KernelParams(0, 0), 0.1, 0.9) == 0.0


def test_grid_epsilon_needs_fine_mesh():
    eps, lip = grid_epsilon(3, KernelParams(1, 0), 0.4, 0.9, 0.01)
    assert eps == pytest.approx(6 * lip * 0.01)
    with pytest.raises(ValueError):
        grid_epsilon(3, KernelParams(1, 0), 0.4, 0.9, 0.3)


def test_compare_with_grid():
    cmp = compare_with_grid(make_segment(0, 0.9), 3, KernelParams(1, 0), 120)
    assert cmp.passes
    assert cmp.continuous <= cmp.grid + 1e-12
