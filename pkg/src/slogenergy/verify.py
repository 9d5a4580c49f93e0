"""Acceptance suites shared by ``slogenergy verify`` and the test-suite.

Each criterion function returns a list of :class:`Check` rows; a suite
passes when every row does.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .analysis import (
    circle_optimality_check,
    cluster_probe,
    derivative_probe,
    infinity_limit_probe,
    sweep_g,
)
from .configurations import Configuration, config_distance
from .energy import energy, lower_bound, sandwich_check
from .kernels import KernelParams, h_eval, k2_chord, k2_geodesic, kernel_eval, p_eval, q_chord
from .oracle import GridBudget, compare_with_grid, grid_pack
from .spaces import discretize, make_circle, make_segment, make_sphere

MIN_AGREEING = 12
DRAWS = 1000
ORACLE_BUDGET = GridBudget(10**9)
PACKING_BUDGET = GridBudget(10**11)


@dataclass
class Check:
    criterion: int
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.criterion}. {self.name}: {self.detail} ({self.seconds:.1f}s)"


class _Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


def builtin_spaces():
    seg = make_segment(0.0, 0.9)
    return {
        "segment": seg,
        "circle-geo": make_circle(0.1, "geodesic"),
        "circle-chord": make_circle(0.3, "chord"),
        "sphere": make_sphere(0.3),
        "finite": discretize(seg, 40),
    }


# -- 1. circle optimality -------------------------------------------------------

CIRCLE_SCENARIOS = (
    [(0.2, "geodesic", s, 1.0) for s in (0.0, 0.5, 2.0)]
    + [(0.1, "geodesic", s, 0.0) for s in (0.5, 1.0, 3.0)]
    + [(0.1, "geodesic", 0.0, 2.0)]
    + [(0.3, "chord", s, 1.0) for s in (0.0, 1.0, 2.0)]
)
CIRCLE_SIZES = (2, 3, 5, 7)


def criterion_circle() -> list:
    checks = []
    for alpha, kind, s, t in CIRCLE_SCENARIOS:
        circle = make_circle(alpha, kind)
        worst_gap, worst_energy, fails = 0.0, -math.inf, []
        with _Timer() as tm:
            for n in CIRCLE_SIZES:
                rep = circle_optimality_check(circle, n, KernelParams(s, t))
                worst_gap = max(worst_gap, rep.max_signature_gap)
                worst_energy = max(worst_energy, rep.energy_gap)
                if not rep.passed or rep.starts_agreeing < MIN_AGREEING:
                    fails.append(n)
        detail = f"max sig gap {worst_gap:.1e}, max E(eq)-E(opt) {worst_energy:.1e}"
        if fails:
            detail += f", failing N={fails}"
        name = f"circle {kind} alpha={alpha} s={s} t={t}"
        checks.append(Check(1, name, not fails, detail, tm.seconds))
    return checks


# -- 2. s -> infinity ------------------------------------------------------------

LIMIT_SCHEDULE = [2.0**k for k in range(1, 11)]


def criterion_limits() -> list:
    checks = []
    circle = make_circle(0.05, "geodesic")
    for n in (2, 4):
        with _Timer() as tm:
            delta = grid_pack(discretize(circle, 720), n, PACKING_BUDGET).delta
        expected = 2 * math.pi * 0.05 / n
        checks.append(
            Check(2, f"packing N={n}", abs(delta - expected) <= 1e-9,
                  f"delta {delta:.12f} vs 2 pi alpha/N {expected:.12f}", tm.seconds)
        )
        for t in (0.0, 1.0):
            with _Timer() as tm:
                rows = infinity_limit_probe(circle, n, t, LIMIT_SCHEDULE, delta=delta)
            bounded = all(r.error <= r.error_bound + 1e-6 for r in rows)
            final = rows[-1].error <= 1e-2
            chain = all(r.chain_holds() for r in rows)
            detail = f"error at s=1024 {rows[-1].error:.2e} (bound {rows[-1].error_bound:.2e}), chain {chain}"
            checks.append(Check(2, f"limit N={n} t={t:g}", bounded and final and chain, detail, tm.seconds))
    return checks


# -- 3. one-sided derivatives -----------------------------------------------------


def derivative_reference(alpha=0.05):
    """Derivative in ``s`` of ``2 (pi alpha)^{-s}`` at ``s = 1``."""
    d = math.pi * alpha
    return 2 / d * math.log(1 / d)


def criterion_derivatives() -> list:
    checks = []
    circle = make_circle(0.05, "geodesic")
    ref = derivative_reference()
    with _Timer() as tm:
        p = derivative_probe(circle, 2, 0.0, 1.0)
    ok = abs(p.fd_plus - ref) <= 1e-2 and abs(p.fd_minus - ref) <= 1e-2 and p.starts_agreeing >= MIN_AGREEING
    checks.append(
        Check(3, "difference quotients at s0=1", ok,
              f"fd+ {p.fd_plus:.6f}, fd- {p.fd_minus:.6f}, reference {ref:.6f}", tm.seconds)
    )
    for s0 in (0.5, 1.0, 2.0):
        with _Timer() as tm:
            p = derivative_probe(circle, 2, 0.0, s0)
        inside = (p.plus_bracket[0] * (1 - 1e-9) <= p.fd_plus <= p.plus_bracket[1] * (1 + 1e-9)
                  and p.minus_bracket[0] * (1 - 1e-9) <= p.fd_minus <= p.minus_bracket[1] * (1 + 1e-9))
        detail = (f"d+ - d- {p.d_plus - p.d_minus:.1e} (raw fd+ - fd- {p.fd_plus - p.fd_minus:.1e}), "
                  f"brackets hold {inside}")
        checks.append(Check(3, f"right <= left derivative at s0={s0:g}", p.ordered(1e-3) and inside, detail, tm.seconds))
    return checks


# -- 4. cluster convergence --------------------------------------------------------

EQUAL_PACKING_SIGNATURE = np.array([0.3, 0.3, 0.3, 0.6, 0.6, 0.9])


def criterion_clusters() -> list:
    checks = []
    circle = make_circle(0.1, "geodesic")
    seg = make_segment(0.0, 0.9)
    halves = [2.0**-k for k in range(1, 11)]
    scenarios = [
        ("circle N=4 t=1 s0=1", circle, 4, 1.0, 1.0, [1 + h for h in halves] + [1 - h for h in halves]),
        ("segment N=3 t=0 s0=2", seg, 3, 0.0, 2.0, [2 - h for h in halves]),
        ("segment N=4 t=0 s0=inf", seg, 4, 0.0, math.inf, LIMIT_SCHEDULE),
    ]
    for name, space, n, t, s0, schedule in scenarios:
        with _Timer() as tm:
            tr = cluster_probe(space, n, t, s0, schedule)
        # last entry on each side of s0
        ends = [max(k for k, s in enumerate(schedule) if (s > s0) == side)
                for side in {s > s0 for s in schedule}]
        final = max(tr.signature_distances[k] for k in ends)
        ok = final <= 1e-4
        detail = f"final signature distance {final:.1e}"
        if math.isfinite(s0):
            rel = max(abs(tr.energies_at_s0[k] - tr.g_s0) / tr.g_s0 for k in ends)
            ok = ok and rel <= 1e-6 and tr.starts_agreeing >= MIN_AGREEING
            detail += f", energy at s0 rel. gap {rel:.1e}"
        else:
            gap = config_distance(tr.reference, EQUAL_PACKING_SIGNATURE)
            ok = ok and gap <= 1e-9
            detail += f", packing vs equal spacing {gap:.1e}"
        checks.append(Check(4, name, ok, detail, tm.seconds))
    return checks


# -- 5. inequality and convexity properties -------------------------------------


def _random_config(space, rng):
    n = int(rng.integers(2, 7))
    if not space.continuous:
        return Configuration(space, rng.choice(space.size, size=n, replace=False))
    return Configuration(space, space.sample(n, rng))


def criterion_properties(draws=DRAWS, seed=20240531) -> list:
    checks = []
    rng = np.random.default_rng(seed)
    spaces = builtin_spaces()
    with _Timer() as tm:
        bad = []
        for name, space in spaces.items():
            for _ in range(draws):
                cfg = _random_config(space, rng)
                r = float(rng.uniform(0, 3))
                s = r + float(rng.uniform(1e-3, 3))
                t = float(rng.uniform(0, 3))
                if not sandwich_check(cfg, r, s, t).holds:
                    bad.append((name, r, s, t))
    checks.append(Check(5, "sandwich inequality", not bad, f"{draws} draws x {len(spaces)} spaces, {len(bad)} violations", tm.seconds))

    with _Timer() as tm:
        x = np.sort(rng.uniform(1e-6, 1 - 1e-6, size=(draws, 2)), axis=1)
        x = x[x[:, 0] < x[:, 1]]
        beta = rng.uniform(0, 4, size=len(x))
        h_ok = all(h_eval(b, a) < h_eval(b, c) for b, (a, c) in zip(beta, x))
        pars = [KernelParams(float(s), float(t)) for s, t in rng.uniform(0, 4, size=(len(x), 2))]
        p_ok = all(p_eval(q, a) > p_eval(q, c) for q, (a, c) in zip(pars, x))
    checks.append(Check(5, "h increasing, p decreasing", h_ok and p_ok, f"{len(x)} ordered pairs each", tm.seconds))

    with _Timer() as tm:
        bad = 0
        for space in spaces.values():
            for _ in range(draws // len(spaces) + 1):
                cfg = _random_config(space, rng)
                q = KernelParams(float(rng.uniform(0, 4)), float(rng.uniform(0, 4)))
                if energy(cfg, q).linear < lower_bound(space, cfg.n, q) * (1 - 1e-12):
                    bad += 1
    checks.append(Check(5, "energy >= lower bound", bad == 0, f"{bad} violations", tm.seconds))

    with _Timer() as tm:
        grid1 = np.linspace(0, 1, DRAWS + 2)[1:-1]
        grid2 = np.linspace(0, math.exp(-1), DRAWS + 2)[1:-1]
        grid3 = np.linspace(0, math.pi / 2, DRAWS + 2)[1:-1]
        pos = all(np.all(k2_geodesic(KernelParams(s, t), grid1) > 0) for s in (0, 0.5, 2) for t in (1, 2))
        pos &= all(np.all(k2_geodesic(KernelParams(s, t), grid2) > 0)
                   for s, t in ((0.5, 0), (1, 0), (3, 0), (0, 2), (0, 0.5)))
        pos &= all(np.all(k2_chord(KernelParams(s, 1), 0.3, grid3) > 0) for s in (0, 1, 2))
    checks.append(Check(5, "kernel convexity on grids", bool(pos), f"{DRAWS} points per grid", tm.seconds))

    with _Timer() as tm:
        worst = max(_k2_fd_error(rng), _k2_chord_fd_error(rng))
    checks.append(Check(5, "second derivatives vs finite differences", worst <= 1e-6, f"max rel. error {worst:.1e}", tm.seconds))
    return checks


def _second_difference(f, x, h):
    # fourth-order stencil
    return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h)


def _k2_fd_error(rng, samples=200):
    worst = 0.0
    for _ in range(samples):
        q = KernelParams(float(rng.uniform(0, 3)), float(rng.uniform(0, 3)))
        x = float(rng.uniform(0.05, 0.9))
        fd = _second_difference(lambda u: kernel_eval(q, u), x, 1e-3 * x)
        exact = k2_geodesic(q, x)
        worst = max(worst, abs(fd - exact) / abs(exact))
    return worst


def _k2_chord_fd_error(rng, samples=200):
    worst = 0.0
    for _ in range(samples):
        q = KernelParams(float(rng.uniform(0, 3)), float(rng.uniform(1, 3)))
        alpha = float(rng.uniform(0.05, 0.45))
        x = float(rng.uniform(0.05, 1.5))
        fd = _second_difference(lambda u: q_chord(q, alpha, u), x, 1e-3 * x)
        exact = k2_chord(q, alpha, x)
        worst = max(worst, abs(fd - exact) / abs(exact))
    return worst


# -- 6. oracle equivalence ------------------------------------------------------------


def criterion_oracle() -> list:
    checks = []
    cases = [(make_segment(0.0, 0.9), 120), (make_circle(0.1, "geodesic"), 360)]
    for space, m in cases:
        for n in (2, 3, 4):
            for s, t in ((1.0, 0.0), (2.0, 1.0)):
                with _Timer() as tm:
                    cmp = compare_with_grid(space, n, KernelParams(s, t), m, budget=ORACLE_BUDGET)
                detail = f"|gap| {cmp.gap:.2e} <= eps_grid {cmp.eps_grid:.2e} (M={m})"
                checks.append(Check(6, f"{space.id} N={n} s={s:g} t={t:g}", cmp.passes, detail, tm.seconds))
    return checks


# -- 7. g(0) identity --------------------------------------------------------------------


def criterion_identity() -> list:
    checks = []
    for name, space in builtin_spaces().items():
        with _Timer() as tm:
            vals = {n: sweep_g(space, n, 0.0, [0.0])[0].g.linear for n in (2, 3, 5)}
        ok = all(v == n * (n - 1) for n, v in vals.items())
        checks.append(Check(7, f"g(0) on {name}", ok, ", ".join(f"N={n}: {v!r}" for n, v in vals.items()), tm.seconds))
    return checks


CRITERIA = {
    1: criterion_circle,
    2: criterion_limits,
    3: criterion_derivatives,
    4: criterion_clusters,
    5: criterion_properties,
    6: criterion_oracle,
    7: criterion_identity,
}

SUITES = {
    "circle": (1,),
    "limits": (2,),
    "derivatives": (3,),
    "clusters": (4,),
    "lemmas": (5, 7),
    "oracle": (6,),
    "all": tuple(CRITERIA),
}


def run_suite(name: str) -> list:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    checks = []
    for c in SUITES[name]:
        checks.extend(CRITERIA[c]())
    return checks
