import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slogenergy.kernels import (
    DomainError,
    KernelParams,
    h_eval,
    k2_chord,
    k2_geodesic,
    kernel_eval,
    log_kernel_eval,
    log_kernel_slope,
    p_eval,
    q_chord,
)

mpmath.mp.dps = 40

unit = st.floats(1e-9, 1 - 1e-9)
# exponents far below 1e-3 make k(x) round to 1 and hide strict monotonicity
expo = st.one_of(st.just(0.0), st.floats(1e-3, 6))


def mp_kernel(s, t, x):
    x = mpmath.mpf(x)
    return x ** (-s) * mpmath.log(1 / x) ** t


# -- examples ------------------------------------------------------------------


def test_kernel_examples():
    assert kernel_eval(KernelParams(1, 0), 0.5) == 2.0
    assert kernel_eval(KernelParams(0, 1), math.exp(-1)) == pytest.approx(1.0, rel=1e-15)
    value = kernel_eval(KernelParams(2, 1), 0.1)
    assert value == pytest.approx(float(mp_kernel(2, 1, "0.1")), rel=1e-14)
    assert value == pytest.approx(230.25850929940458, rel=1e-14)


def test_kernel_at_zero_and_trivial():
    assert kernel_eval(KernelParams(1, 0), 0.0) == math.inf
    assert kernel_eval(KernelParams(0, 0), 0.0) == 1.0
    assert kernel_eval(KernelParams(0, 0), 0.7) == 1.0


@pytest.mark.parametrize("d", [-0.1, 1.0, 1.5])
def test_kernel_domain(d):
    with pytest.raises(DomainError):
        kernel_eval(KernelParams(1, 1), d)


def test_params_validation():
    with pytest.raises(DomainError):
        KernelParams(-1, 0)
    with pytest.raises(DomainError):
        KernelParams(0, math.nan)
    assert not KernelParams(0, 0).nontrivial
    assert KernelParams(0, 0.5).nontrivial


def test_log_kernel_examples():
    assert log_kernel_eval(KernelParams(1, 0), 0.5) == pytest.approx(math.log(2), rel=1e-15)
    assert log_kernel_eval(KernelParams(0, 0), 0.3) == 0.0
    big = KernelParams(1000, 0)
    assert log_kernel_eval(big, 0.5) == pytest.approx(1000 * math.log(2), rel=1e-15)
    # 2^1000 is past the linear cap; 2^1100 overflows outright
    assert kernel_eval(big, 0.5) > 1e300
    assert math.isinf(kernel_eval(KernelParams(1100, 0), 0.5))
    assert log_kernel_eval(KernelParams(1100, 0), 0.5) == pytest.approx(1100 * math.log(2), rel=1e-15)
    assert log_kernel_eval(KernelParams(1, 1), 0.0) == math.inf


def test_h_and_p_examples():
    assert h_eval(1, math.exp(-1)) == pytest.approx(math.exp(-1), rel=1e-15)
    assert h_eval(0, 0.3) == pytest.approx(0.3, rel=1e-15)
    assert h_eval(1, 0.1) == pytest.approx(0.1 / math.log(10), rel=1e-15)
    assert h_eval(1, 0.1) < h_eval(1, 0.2) == pytest.approx(0.124267, abs=1e-6)
    assert p_eval(KernelParams(1, 1), math.exp(-1)) == pytest.approx(math.e, rel=1e-15)
    assert p_eval(KernelParams(1, 0), 0.25) == 4.0
    assert p_eval(KernelParams(0, 2), 0.1) == pytest.approx(math.log(10) ** 2, rel=1e-15)
    with pytest.raises(DomainError):
        p_eval(KernelParams(0, 0), 0.5)
    with pytest.raises(DomainError):
        h_eval(1, 0.0)


def test_k2_geodesic_examples():
    assert k2_geodesic(KernelParams(1, 0), 0.5) == pytest.approx(16.0, rel=1e-14)
    assert k2_geodesic(KernelParams(0, 1), 0.5) == pytest.approx(4.0, rel=1e-14)


def test_k2_chord_examples():
    p = KernelParams(0, 1)
    assert k2_chord(p, 0.3, math.pi / 4) > 0
    assert k2_chord(KernelParams(2, 1), 0.3, math.pi / 2 - 1e-9) > 0
    q = KernelParams(1, 1)
    h = 1e-5
    fd = (q_chord(q, 0.3, 0.5 + h) - 2 * q_chord(q, 0.3, 0.5) + q_chord(q, 0.3, 0.5 - h)) / h**2
    assert k2_chord(q, 0.3, 0.5) == pytest.approx(fd, rel=1e-6)


@pytest.mark.parametrize(
    "args",
    [(KernelParams(1, 0.5), 0.3, 0.5), (KernelParams(1, 1), 0.5, 0.5), (KernelParams(1, 1), 0.3, 0.0),
     (KernelParams(1, 1), 0.3, math.pi / 2)],
)
def test_k2_chord_domain(args):
    with pytest.raises(DomainError):
        k2_chord(*args)


def test_vector_inputs():
    d = np.array([0.1, 0.2, 0.5])
    out = kernel_eval(KernelParams(1, 0), d)
    np.testing.assert_allclose(out, 1 / d, rtol=1e-15)
    assert isinstance(kernel_eval(KernelParams(1, 0), 0.5), float)


# -- properties ------------------------------------------------------------------


@settings(max_examples=1000)
@given(beta=expo, x1=unit, x2=unit)
def test_h_increasing(beta, x1, x2):
    lo, hi = sorted((x1, x2))
    if hi <= lo * (1 + 1e-9):
        return
    assert h_eval(beta, lo) < h_eval(beta, hi)


@settings(max_examples=1000)
@given(s=expo, t=expo, x1=st.floats(1e-6, 1 - 1e-6), x2=st.floats(1e-6, 1 - 1e-6))
def test_p_decreasing(s, t, x1, x2):
    lo, hi = sorted((x1, x2))
    # adjacent doubles are not separated by log
    if hi <= lo * (1 + 1e-9) or (s == 0 and t == 0):
        return
    assert p_eval(KernelParams(s, t), lo) > p_eval(KernelParams(s, t), hi)


@given(s=expo, t=expo, x=unit)
def test_log_linear_consistency(s, t, x):
    p = KernelParams(s, t)
    lin = kernel_eval(p, x)
    if 0 < lin < 1e300:
        assert math.exp(log_kernel_eval(p, x)) == pytest.approx(lin, rel=1e-12)


@given(s=expo, t=expo, x=st.floats(1e-3, 0.99))
def test_log_slope_matches_derivative(s, t, x):
    p = KernelParams(s, t)
    mp_slope = mpmath.diff(lambda u: mpmath.log(mp_kernel(s, t, u)), mpmath.mpf(x))
    assert log_kernel_slope(p, x) == pytest.approx(float(mp_slope), rel=1e-9, abs=1e-12)


@given(s=expo, t=st.floats(1, 6), x=unit)
def test_k2_positive_log_power(s, t, x):
    assert k2_geodesic(KernelParams(s, t), x) > 0


@given(s=expo, t=expo, x=st.floats(1e-9, math.exp(-1) - 1e-9))
def test_k2_positive_small(s, t, x):
    if s == 0 and t == 0:
        return
    assert k2_geodesic(KernelParams(s, t), x) > 0


@settings(max_examples=200)
@given(s=st.floats(0, 4), t=st.floats(0, 4), x=st.floats(0.02, 0.95))
def test_k2_geodesic_against_high_precision(s, t, x):
    exact = mpmath.diff(lambda u: mp_kernel(s, t, u), mpmath.mpf(x), 2)
    assert k2_geodesic(KernelParams(s, t), x) == pytest.approx(float(exact), rel=1e-9, abs=1e-12)


@settings(max_examples=200)
@given(s=st.floats(0, 4), t=st.floats(1, 4), alpha=st.floats(0.02, 0.49), x=st.floats(0.02, 1.55))
def test_k2_chord_against_high_precision(s, t, alpha, x):
    def q(u):
        return mp_kernel(s, t, 2 * alpha * mpmath.sin(u))

    exact = mpmath.diff(q, mpmath.mpf(x), 2)
    value = k2_chord(KernelParams(s, t), alpha, x)
    assert value > 0
    assert value == pytest.approx(float(exact), rel=1e-9)
