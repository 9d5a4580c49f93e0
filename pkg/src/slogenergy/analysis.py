"""Instruments for the exponent dependence of the minimal energy.

``g(s)`` below is the minimal energy at fixed ``t`` as a function of ``s``;
every value is the optimizer's best estimate, so the checks built on these
records inherit the solver's accuracy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .configurations import Configuration, config_distance, separation, signature
from .energy import EnergyValue, energy
from .kernels import KernelParams, k2_chord, k2_geodesic, log_kernel_eval
from .optimizer import SolveOptions, SolveResult, best_packing, minimize_energy
from .spaces import CircleSpace, equally_spaced

DEFAULT_RESTARTS = 3


@dataclass
class SweepRecord:
    s: float
    t: float
    g: EnergyValue
    minimizer_signature: np.ndarray
    separation: float
    e_logt1: float
    e_logt1_range: tuple = (math.nan, math.nan)
    converged: bool = True
    starts_agreeing: int = 0
    config: Configuration | None = field(default=None, repr=False)

    def row(self) -> dict:
        return {
            "s": self.s,
            "t": self.t,
            "g": self.g.linear,
            "log_g": self.g.log,
            "separation": self.separation,
            "e_logt1": self.e_logt1,
            "e_logt1_min": self.e_logt1_range[0],
            "e_logt1_max": self.e_logt1_range[1],
            "converged": int(self.converged),
            "starts_agreeing": self.starts_agreeing,
        }


def _e_logt1_range(result: SolveResult, s, t):
    """min/max of E^s_{log^{t+1}} over the agreeing minimizers with distinct signatures."""
    seen, values = [], []
    up = KernelParams(s, t + 1)
    for cfg in result.agreeing_configs():
        sig = signature(cfg)
        if any(config_distance(sig, other) <= 1e-7 for other in seen):
            continue
        seen.append(sig)
        values.append(energy(cfg, up).linear)
    return (min(values), max(values)) if values else (math.nan, math.nan)


def _record(result: SolveResult, s, t) -> SweepRecord:
    cfg = result.config
    return SweepRecord(
        s=s,
        t=t,
        g=result.energy,
        minimizer_signature=signature(cfg),
        separation=separation(cfg),
        e_logt1=energy(cfg, KernelParams(s, t + 1)).linear,
        e_logt1_range=_e_logt1_range(result, s, t),
        converged=result.converged,
        starts_agreeing=result.starts_agreeing,
        config=cfg,
    )


def _warm(opts: SolveOptions, restarts: int) -> SolveOptions:
    return replace(opts, starts=1 + restarts)


def sweep_g(space, n, t, s_list, opts: SolveOptions | None = None, restarts=DEFAULT_RESTARTS):
    """One record per ``s``; each solve after the first is warm-started from the
    previous minimizer plus ``restarts`` fresh random starts."""
    opts = opts or SolveOptions()
    records, init = [], None
    for k, s in enumerate(s_list):
        if s < 0:
            raise ValueError(f"s must be >= 0, got {s}")
        stage = opts if k == 0 else _warm(opts, restarts)
        result = minimize_energy(space, n, KernelParams(s, t), stage, init=init)
        records.append(_record(result, float(s), float(t)))
        init = result.config.points
    return records


@dataclass
class ProbeReport:
    s0: float
    fd_plus: float
    fd_minus: float
    e_logt1_at_min: float
    h_fd: float
    fd_central: float = math.nan
    e_logt1_range: tuple = (math.nan, math.nan)
    plus_bracket: tuple = (math.nan, math.nan)
    minus_bracket: tuple = (math.nan, math.nan)
    d_plus: float = math.nan
    d_minus: float = math.nan
    starts_agreeing: int = 0

    def ordered(self, tol=1e-3) -> bool:
        """Right derivative at most the left one, on the extrapolated estimates."""
        return not self.d_plus > self.d_minus + tol

    def to_dict(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.__dict__.items()}


class SolverFailure(RuntimeError):
    pass


def derivative_probe(space, n, t, s0, opts: SolveOptions | None = None, h=1e-4, h_central=1e-5,
                     restarts=DEFAULT_RESTARTS) -> ProbeReport:
    """One-sided difference quotients of ``g`` at ``s0`` and the brackets for them.

    With ``w0``, ``w+``, ``w-`` the minimizers at ``s0``, ``s0 + h``, ``s0 - h``,
    comparing energies of the same configuration at two exponents gives
    ``E^{s0}_{log^{t+1}}(w+) <= fd_plus <= E^{s0+h}_{log^{t+1}}(w0)`` and
    ``E^{s0-h}_{log^{t+1}}(w0) <= fd_minus <= E^{s0}_{log^{t+1}}(w-)``.

    The raw quotients differ from the one-sided derivatives by about
    ``h g''/2``, so ``d_plus``/``d_minus`` also report the Richardson
    extrapolation ``2 D(h/2) - D(h)``, whose error is second order in ``h``.
    """
    opts = opts or SolveOptions()
    if s0 < 0 or h <= 0:
        raise ValueError(f"need s0 >= 0 and h > 0, got s0={s0}, h={h}")
    warm = _warm(opts, restarts)

    def solve(s, stage, init=None):
        r = minimize_energy(space, n, KernelParams(s, t), stage, init=init)
        if not r.converged:
            raise SolverFailure(f"solver did not converge at s={s}")
        return r

    def up(cfg, s):
        return energy(cfg, KernelParams(s, t + 1)).linear

    r0 = solve(s0, opts)
    w0 = r0.config
    g0 = r0.energy.linear
    rp = solve(s0 + h, warm, w0.points)
    fd_plus = (rp.energy.linear - g0) / h
    plus = (up(rp.config, s0), up(w0, s0 + h))
    d_plus = 2 * (solve(s0 + h / 2, warm, w0.points).energy.linear - g0) / (h / 2) - fd_plus
    fd_minus, minus, fd_central, d_minus = math.nan, (math.nan, math.nan), math.nan, math.nan
    if s0 - h >= 0:
        rm = solve(s0 - h, warm, w0.points)
        fd_minus = (g0 - rm.energy.linear) / h
        minus = (up(w0, s0 - h), up(rm.config, s0))
        d_minus = 2 * (g0 - solve(s0 - h / 2, warm, w0.points).energy.linear) / (h / 2) - fd_minus
    if s0 - h_central >= 0:
        a = solve(s0 + h_central, warm, w0.points).energy.linear
        b = solve(s0 - h_central, warm, w0.points).energy.linear
        fd_central = (a - b) / (2 * h_central)
    return ProbeReport(
        s0=s0,
        fd_plus=fd_plus,
        fd_minus=fd_minus,
        e_logt1_at_min=up(w0, s0),
        h_fd=h,
        fd_central=fd_central,
        e_logt1_range=_e_logt1_range(r0, s0, t),
        plus_bracket=plus,
        minus_bracket=minus,
        d_plus=d_plus,
        d_minus=d_minus,
        starts_agreeing=r0.starts_agreeing,
    )


@dataclass
class LimitRow:
    s: float
    g_pow: float
    target: float
    separation: float
    lower_packing: float
    lower_separation: float
    upper_energy: float
    upper_packing: float
    error: float
    error_bound: float

    def chain_holds(self, rtol=1e-9) -> bool:
        """The bounds squeezing ``g(s)^{1/s}`` hold in order."""
        chain = [self.lower_packing, self.lower_separation, self.g_pow, self.upper_energy, self.upper_packing]
        return all(a <= b * (1 + rtol) for a, b in zip(chain, chain[1:]))

    def row(self) -> dict:
        return dict(self.__dict__)


def infinity_limit_probe(space, n, t, s_schedule, opts: SolveOptions | None = None, delta=None,
                         packing_config=None) -> list:
    """``g(s)^{1/s}`` along an increasing schedule, against ``1/delta_N``.

    ``delta``/``packing_config`` default to :func:`best_packing`. Each row also
    carries the bounds squeezing ``g(s)^{1/s}``: below by the separation ``c``
    of the ``s``-minimizer, ``(1/delta_N) log(1/c)^{t/s} <=
    (1/c) log(1/c)^{t/s}``; above by the packing configuration ``w``,
    ``E^s(w)^{1/s} <= (1/delta_N) E^0_{log^t}(w)^{1/s}``.
    """
    opts = opts or SolveOptions()
    s_schedule = [float(s) for s in s_schedule]
    if any(b <= a for a, b in zip(s_schedule, s_schedule[1:])) or s_schedule[0] <= 0:
        raise ValueError("s_schedule must be positive and strictly increasing")
    if packing_config is None:
        packing = best_packing(space, n, opts)
        packing_config = packing.config
    if delta is None:
        delta = separation(packing_config)
    log_e0_pack = energy(packing_config, KernelParams(0.0, t)).log
    rows, init = [], None
    for k, s in enumerate(s_schedule):
        stage = opts if k == 0 else replace(opts, starts=1)
        r = minimize_energy(space, n, KernelParams(s, t), stage, init=init)
        init = r.config.points
        c = separation(r.config)
        log_inv_c_t = t * math.log(-math.log(c)) if t else 0.0
        g_pow = math.exp(r.energy.log / s)
        rows.append(
            LimitRow(
                s=s,
                g_pow=g_pow,
                target=1 / delta,
                separation=c,
                lower_packing=math.exp(log_inv_c_t / s) / delta,
                lower_separation=math.exp(log_inv_c_t / s) / c,
                upper_energy=math.exp(energy(packing_config, KernelParams(s, t)).log / s),
                upper_packing=math.exp(log_e0_pack / s) / delta,
                error=abs(g_pow * delta - 1),
                error_bound=math.exp((math.log(n * (n - 1)) + (t * math.log(-math.log(delta)) if t else 0.0)) / s)
                - 1,
            )
        )
    return rows


@dataclass
class ClusterTrace:
    target_s0: float
    schedule: list
    signature_distances: list
    energies_at_s0: list
    separations: list
    g_s0: float = math.nan
    starts_agreeing: int = 0
    reference: Configuration | None = field(default=None, repr=False)

    def row(self, k) -> dict:
        return {
            "s": self.schedule[k],
            "signature_distance": self.signature_distances[k],
            "energy_at_s0": self.energies_at_s0[k] if self.energies_at_s0 else math.nan,
            "separation": self.separations[k],
        }


def cluster_probe(space, n, t, s0, s_schedule, opts: SolveOptions | None = None) -> ClusterTrace:
    """Follow minimizers along ``s_k -> s0`` and compare them with an ``s0``-minimizer.

    ``s0 = inf`` compares with a best-packing configuration. The schedule may
    approach from both sides; each side is warm-started along its own chain.
    """
    opts = opts or SolveOptions()
    s_schedule = [float(s) for s in s_schedule]
    finite = math.isfinite(s0)
    if finite:
        gaps = [abs(s - s0) for s in s_schedule]
        sides = [math.copysign(1, s - s0) for s in s_schedule]
        for side in (-1, 1):
            g_side = [gp for gp, sd in zip(gaps, sides) if sd == side]
            if any(b >= a for a, b in zip(g_side, g_side[1:])):
                raise ValueError("schedule must approach s0 strictly monotonically on each side")
        ref = minimize_energy(space, n, KernelParams(s0, t), opts)
        reference, g_s0, agreeing = ref.config, ref.energy.linear, ref.starts_agreeing
    else:
        agreeing = 0
        sides = [1] * len(s_schedule)
        if any(b <= a for a, b in zip(s_schedule, s_schedule[1:])):
            raise ValueError("schedule toward infinity must be strictly increasing")
        reference, g_s0 = best_packing(space, n, opts).config, math.nan
    ref_sig = signature(reference)
    inits = {}
    dists, energies, seps = [], [], []
    for s, side in zip(s_schedule, sides):
        init = inits.get(side)
        stage = opts if init is None else replace(opts, starts=1)
        r = minimize_energy(space, n, KernelParams(s, t), stage, init=init)
        inits[side] = r.config.points
        dists.append(config_distance(signature(r.config), ref_sig))
        seps.append(separation(r.config))
        if finite:
            energies.append(energy(r.config, KernelParams(s0, t)).linear)
    return ClusterTrace(s0, s_schedule, dists, energies, seps, g_s0, agreeing, reference)


# -- circles ---------------------------------------------------------------


class HypothesisNotCovered(ValueError):
    pass


GEODESIC_LOG_POWER = "geodesic: t >= 1, alpha < 1/pi"
GEODESIC_SMALL_RADIUS = "geodesic: alpha < 1/(e*pi), s > 0 or (s = 0, t > 0)"
CHORD_LOG_POWER = "chord: t >= 1, alpha < 1/2"


def circle_hypotheses(circle: CircleSpace, params: KernelParams) -> list:
    """Which of the known equal-spacing optimality conditions apply."""
    s, t, a = params.s, params.t, circle.alpha
    found = []
    if circle.metric_kind == "geodesic":
        if t >= 1 and a < 1 / math.pi:
            found.append(GEODESIC_LOG_POWER)
        if a < 1 / (math.e * math.pi) and (s > 0 or t > 0):
            found.append(GEODESIC_SMALL_RADIUS)
    elif t >= 1 and a < 0.5:
        found.append(CHORD_LOG_POWER)
    return found


def _convexity_grid(hypothesis, circle, params, points=1000):
    if hypothesis == CHORD_LOG_POWER:
        x = np.linspace(0, np.pi / 2, points + 2)[1:-1]
        return np.asarray(k2_chord(params, circle.alpha, x))
    hi = 1.0 if hypothesis == GEODESIC_LOG_POWER else math.exp(-1)
    x = np.linspace(0, hi, points + 2)[1:-1]
    return np.asarray(k2_geodesic(params, x))


@dataclass
class CircleReport:
    passed: bool
    max_signature_gap: float
    hypothesis: str
    hypotheses: list
    convex: bool
    energy_gap: float
    optimizer_energy: float
    equal_energy: float
    starts_agreeing: int = 0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def circle_optimality_check(circle: CircleSpace, n, params: KernelParams, opts: SolveOptions | None = None,
                            sig_tol=1e-6, energy_tol=1e-10) -> CircleReport:
    """Optimizer against ``n`` equally spaced points, under a covering hypothesis.

    Passes when the signatures agree within ``sig_tol``, the second derivative
    of the distance kernel is positive on a 1000-point grid for every covering
    hypothesis, and equal spacing is no worse than the optimizer (``energy_tol``).
    """
    found = circle_hypotheses(circle, params)
    if not found:
        raise HypothesisNotCovered(
            f"hypothesis not covered; optimality unknown for {circle.id}, s={params.s}, t={params.t}"
        )
    convex = all(bool(np.all(_convexity_grid(h, circle, params) > 0)) for h in found)
    result = minimize_energy(circle, n, params, opts)
    eq = equally_spaced(circle, n)
    gap = config_distance(signature(result.config), signature(eq))
    e_eq = energy(eq, params).linear
    e_opt = result.energy.linear
    ok = gap <= sig_tol and convex and e_eq <= e_opt + energy_tol
    return CircleReport(bool(ok), gap, found[0], found, convex, e_eq - e_opt, e_opt, e_eq, result.starts_agreeing)


def log_energy_pow(value: EnergyValue, s: float) -> float:
    """``value^{1/s}`` computed from the log field."""
    return math.exp(value.log / s)


__all__ = [
    "SweepRecord",
    "ProbeReport",
    "LimitRow",
    "ClusterTrace",
    "CircleReport",
    "sweep_g",
    "derivative_probe",
    "infinity_limit_probe",
    "cluster_probe",
    "circle_optimality_check",
    "circle_hypotheses",
    "HypothesisNotCovered",
    "SolverFailure",
]
