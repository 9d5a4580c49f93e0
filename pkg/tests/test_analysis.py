import math

import numpy as np
import pytest

from slogenergy.analysis import (
    CHORD_LOG_POWER,
    GEODESIC_LOG_POWER,
    GEODESIC_SMALL_RADIUS,
    HypothesisNotCovered,
    circle_hypotheses,
    circle_optimality_check,
    cluster_probe,
    derivative_probe,
    infinity_limit_probe,
    sweep_g,
)
from slogenergy.configurations import signature
from slogenergy.energy import lower_bound
from slogenergy.kernels import KernelParams
from slogenergy.spaces import equally_spaced, make_circle, make_segment, make_sphere

GEO = make_circle(0.1, "geodesic")
SMALL = make_circle(0.05, "geodesic")
SEG = make_segment(0.0, 0.9)


def test_sweep_examples():
    recs = sweep_g(GEO, 3, 0.0, [0.0, 1.0])
    assert recs[0].g.linear == 6.0
    assert recs[1].g.linear == pytest.approx(90 / math.pi, rel=1e-10)
    np.testing.assert_allclose(recs[1].minimizer_signature, signature(equally_spaced(GEO, 3)), atol=1e-6)


@pytest.mark.parametrize("space", [SEG, GEO, make_sphere(0.3)], ids=lambda s: s.id)
def test_sweep_identity_at_zero(space):
    for n in (2, 4, 6):
        assert sweep_g(space, n, 0.0, [0.0])[0].g.linear == n * (n - 1)


def test_sweep_invariants():
    s_list = np.round(np.arange(0.25, 3.01, 0.25), 12)
    recs = sweep_g(GEO, 4, 1.0, s_list)
    for r in recs:
        assert r.g.linear >= lower_bound(GEO, 4, KernelParams(r.s, r.t))
        assert r.separation > 0
    for a, b in zip(recs, recs[1:]):
        quotient = (b.g.linear - a.g.linear) / (b.s - a.s)
        lo, hi = sorted((a.e_logt1, b.e_logt1))
        assert lo * (1 - 1e-8) <= quotient <= hi * (1 + 1e-8)


def test_sweep_rejects_negative_s():
    with pytest.raises(ValueError):
        sweep_g(GEO, 3, 0.0, [1.0, -1.0])


def test_derivative_probe_closed_form():
    p = derivative_probe(SMALL, 2, 0.0, 1.0)
    ref = 2 / (math.pi * 0.05) * math.log(1 / (math.pi * 0.05))
    assert p.e_logt1_at_min == pytest.approx(ref, rel=1e-10)
    assert abs(p.fd_plus - ref) <= 1e-2 and abs(p.fd_minus - ref) <= 1e-2
    assert p.fd_central == pytest.approx(ref, rel=1e-8)
    assert p.d_plus == pytest.approx(ref, rel=1e-8) and p.d_minus == pytest.approx(ref, rel=1e-8)
    # g'' = 2 (pi alpha)^{-s} log(1/(pi alpha))^2 for the antipodal pair
    g2 = ref * math.log(1 / (math.pi * 0.05))
    assert abs(p.fd_plus - p.fd_minus) <= 10 * p.h_fd * g2
    assert p.plus_bracket[0] <= p.fd_plus <= p.plus_bracket[1]
    assert p.minus_bracket[0] <= p.fd_minus <= p.minus_bracket[1]
    assert p.ordered()


def test_derivative_probe_at_zero():
    p = derivative_probe(GEO, 3, 1.0, 0.0)
    assert math.isnan(p.fd_minus) and math.isfinite(p.fd_plus)


def test_infinity_limit_examples():
    rows = infinity_limit_probe(SMALL, 2, 0.0, [2.0, 100.0, 1024.0])
    r100 = rows[1]
    assert r100.g_pow == pytest.approx(2**0.01 / (math.pi * 0.05), rel=1e-10)
    assert r100.target == pytest.approx(1 / (math.pi * 0.05), rel=1e-10)
    last = rows[-1]
    assert last.error <= 2 ** (1 / 1024) - 1 + 1e-6
    assert all(b.error <= a.error + 1e-9 for a, b in zip(rows, rows[1:]))
    assert all(r.chain_holds() for r in rows)


def test_infinity_limit_validation():
    with pytest.raises(ValueError):
        infinity_limit_probe(SMALL, 2, 0.0, [4.0, 2.0])


def test_cluster_examples():
    halves = [2.0**-k for k in range(1, 11)]
    tr = cluster_probe(GEO, 4, 1.0, 1.0, [1 + h for h in halves] + [1 - h for h in halves])
    assert max(tr.signature_distances) <= 1e-5
    seg = cluster_probe(SEG, 3, 0.0, 2.0, [2 - h for h in halves])
    assert abs(seg.energies_at_s0[-1] - seg.g_s0) <= 1e-6 * seg.g_s0
    inf = cluster_probe(SEG, 4, 0.0, math.inf, [2.0**k for k in range(1, 11)])
    np.testing.assert_allclose(signature(inf.reference), [0.3, 0.3, 0.3, 0.6, 0.6, 0.9], atol=1e-9)
    assert inf.signature_distances[-1] <= 1e-4
    assert inf.energies_at_s0 == []


def test_cluster_schedule_validation():
    with pytest.raises(ValueError):
        cluster_probe(SEG, 3, 0.0, 2.0, [1.9, 1.5])
    with pytest.raises(ValueError):
        cluster_probe(SEG, 3, 0.0, math.inf, [8.0, 4.0])


@pytest.mark.parametrize(
    "alpha, kind, n, s, t, hypothesis",
    [
        (0.2, "geodesic", 4, 0.5, 1.0, GEODESIC_LOG_POWER),
        (0.1, "geodesic", 5, 1.0, 0.0, GEODESIC_SMALL_RADIUS),
        (0.3, "chord", 6, 2.0, 1.0, CHORD_LOG_POWER),
    ],
)
def test_circle_optimality_examples(alpha, kind, n, s, t, hypothesis):
    rep = circle_optimality_check(make_circle(alpha, kind), n, KernelParams(s, t))
    assert rep.passed and rep.hypothesis == hypothesis
    assert rep.max_signature_gap <= 1e-6


def test_circle_hypotheses_overlap():
    both = circle_hypotheses(GEO, KernelParams(0.0, 2.0))
    assert both == [GEODESIC_LOG_POWER, GEODESIC_SMALL_RADIUS]


@pytest.mark.parametrize(
    "circle, params",
    [
        (make_circle(0.2, "geodesic"), KernelParams(1.0, 0.5)),
        (make_circle(0.3, "chord"), KernelParams(2.0, 0.0)),
        (GEO, KernelParams(0.0, 0.0)),
    ],
)
def test_circle_optimality_not_covered(circle, params):
    with pytest.raises(HypothesisNotCovered, match="hypothesis not covered; optimality unknown"):
        circle_optimality_check(circle, 3, params)
