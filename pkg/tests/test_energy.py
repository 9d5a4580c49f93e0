import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slogenergy.configurations import Configuration, separation
from slogenergy.energy import EnergyValue, energy, log_lower_bound, lower_bound, sandwich_check
from slogenergy.kernels import KernelParams
from slogenergy.spaces import discretize, equally_spaced, make_circle, make_segment, make_sphere

SPACES = [
    make_segment(0.0, 0.9),
    make_circle(0.1, "geodesic"),
    make_circle(0.3, "chord"),
    make_sphere(0.3),
    discretize(make_segment(0.0, 0.9), 40),
]
SEG = SPACES[0]


def random_config(space, seed, n):
    rng = np.random.default_rng(seed)
    if not space.continuous:
        return Configuration(space, rng.choice(space.size, size=n, replace=False))
    return Configuration(space, space.sample(n, rng))


def test_energy_examples():
    pair = Configuration(SEG, [0.1, 0.6])
    assert energy(pair, KernelParams(1, 0)).linear == pytest.approx(4.0, rel=1e-15)
    for n in (2, 3, 7):
        assert energy(random_config(SEG, n, n), KernelParams(0, 0)).linear == n * (n - 1)
    tri = equally_spaced(make_circle(0.1, "geodesic"), 3)
    assert energy(tri, KernelParams(1, 0)).linear == pytest.approx(90 / math.pi, rel=1e-14)


def test_lower_bound_examples():
    assert lower_bound(make_segment(0, 0.5), 3, KernelParams(1, 0)) == pytest.approx(12.0)
    assert lower_bound(SEG, 3, KernelParams(1, 1)) == pytest.approx(6 / 0.9 * math.log(1 / 0.9), rel=1e-14)
    assert lower_bound(SEG, 3, KernelParams(1, 1)) == pytest.approx(0.702403, abs=1e-6)
    for space in SPACES:
        assert lower_bound(space, 2, KernelParams(0, 0)) == 2.0
    assert log_lower_bound(SEG, 3, KernelParams(1, 1)) == pytest.approx(math.log(0.7024036), abs=1e-6)


def test_large_s_log_domain():
    cfg = Configuration(SEG, [0.0, 0.3, 0.9])
    value = energy(cfg, KernelParams(1024, 0))
    assert value.linear == math.inf and not value.finite
    # dominated by the single pair at distance 0.3
    assert value.log == pytest.approx(math.log(2) + 1024 * math.log(1 / 0.3), rel=1e-12)


def test_coincident_points():
    cfg = Configuration(SEG, [0.2, 0.2, 0.5])
    assert energy(cfg, KernelParams(1, 0)).linear == math.inf
    assert energy(cfg, KernelParams(0, 0)).linear == 6
    with pytest.raises(ValueError, match="coincident"):
        sandwich_check(cfg, 1, 2, 0)


def test_energy_value():
    v = EnergyValue.from_log(2.0)
    assert v.linear == pytest.approx(math.exp(2.0))
    assert float(v) == v.linear
    assert EnergyValue.from_log(800).linear == math.inf


def test_sandwich_example():
    pair = Configuration(SEG, [0.1, 0.6])
    rep = sandwich_check(pair, 1, 2, 0)
    assert rep.lhs == pytest.approx(4 * math.log(2), rel=1e-14)
    assert rep.mid == pytest.approx(4.0, rel=1e-14)
    assert rep.rhs == pytest.approx(8 * math.log(2), rel=1e-14)
    assert rep.holds
    with pytest.raises(ValueError):
        sandwich_check(pair, 2, 2, 0)


def test_sandwich_taylor_limit():
    cfg = Configuration(SEG, [0.0, 0.25, 0.9])
    h = 1e-6
    rep = sandwich_check(cfg, 1.5, 1.5 + h, 1.0)
    assert rep.holds
    assert rep.mid == pytest.approx(rep.rhs, rel=10 * h * math.log(1 / 0.25))


# -- properties ------------------------------------------------------------------


@settings(max_examples=1000)
@given(k=st.integers(0, len(SPACES) - 1), seed=st.integers(0, 2**32 - 1), n=st.integers(2, 7),
       s=st.floats(0, 8), t=st.floats(0, 4))
def test_energy_above_lower_bound(k, seed, n, s, t):
    space = SPACES[k]
    cfg = random_config(space, seed, n)
    p = KernelParams(s, t)
    assert energy(cfg, p).log >= log_lower_bound(space, n, p) - 1e-12


@settings(max_examples=1000)
@given(k=st.integers(0, len(SPACES) - 1), seed=st.integers(0, 2**32 - 1), n=st.integers(2, 6),
       r=st.floats(0, 4), gap=st.floats(1e-6, 4), t=st.floats(0, 3))
def test_sandwich_holds(k, seed, n, r, gap, t):
    cfg = random_config(SPACES[k], seed, n)
    assert sandwich_check(cfg, r, r + gap, t).holds


@given(k=st.integers(0, len(SPACES) - 1), seed=st.integers(0, 2**32 - 1), n=st.integers(2, 6), t=st.floats(0, 3))
def test_scaled_energy_monotone_in_s(k, seed, n, t):
    space = SPACES[k]
    cfg = random_config(space, seed, n)
    sep = separation(cfg)
    s_grid = np.linspace(0, 40, 41)
    logs = np.array([energy(cfg, KernelParams(s, t)).log for s in s_grid])
    up = logs + s_grid * math.log(space.diameter)
    down = logs + s_grid * math.log(sep)
    assert np.all(np.diff(up) >= -1e-10)
    assert np.all(np.diff(down) <= 1e-10)


@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 6), s=st.floats(0, 30), t=st.floats(0, 3))
def test_log_linear_consistency(seed, n, s, t):
    value = energy(random_config(SPACES[1], seed, n), KernelParams(s, t))
    if value.finite:
        assert math.exp(value.log) == pytest.approx(value.linear, rel=1e-12)
