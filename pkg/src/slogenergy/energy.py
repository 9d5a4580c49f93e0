"""Pair energies of configurations, carried in both linear and log form."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .configurations import Configuration
from .kernels import KernelParams, kernel_eval, log_kernel_eval

LINEAR_CAP = 1e300


@dataclass(frozen=True)
class EnergyValue:
    """Extended-real energy. ``linear`` is ``inf`` once it passes 1e300 (or the
    configuration is degenerate); ``log`` stays finite in the first case."""

    linear: float
    log: float

    @property
    def finite(self) -> bool:
        return math.isfinite(self.linear)

    @classmethod
    def from_log(cls, log_value: float) -> "EnergyValue":
        log_value = float(log_value)
        if log_value > math.log(LINEAR_CAP):
            return cls(math.inf, log_value)
        return cls(math.exp(log_value), log_value)

    def __float__(self):
        return self.linear


def _pair_distances(config: Configuration) -> np.ndarray:
    D = config.distances()
    return D[np.triu_indices(len(D), k=1)]


def pair_log_terms(distances, params: KernelParams) -> np.ndarray:
    return np.atleast_1d(log_kernel_eval(params, distances))


def energy_from_distances(distances, params: KernelParams) -> EnergyValue:
    """Energy over ordered pairs given the unordered pair distances."""
    d = np.asarray(distances, dtype=float)
    logs = pair_log_terms(d, params)
    if np.isinf(logs).any():
        return EnergyValue(math.inf, math.inf)
    log_value = math.log(2.0) + float(logsumexp(logs))
    if logs.max() < math.log(LINEAR_CAP / d.size):
        linear = 2.0 * math.fsum(np.atleast_1d(kernel_eval(params, d)).tolist())
        if linear <= LINEAR_CAP:
            return EnergyValue(linear, log_value)
    return EnergyValue.from_log(log_value)


def energy(config: Configuration, params: KernelParams) -> EnergyValue:
    """Sum of the kernel over ordered pairs ``x != y`` (twice the unordered sum)."""
    return energy_from_distances(_pair_distances(config), params)


def log_lower_bound(space, n: int, params: KernelParams) -> float:
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    return math.log(n * (n - 1)) + float(log_kernel_eval(params, space.diameter))


def lower_bound(space, n: int, params: KernelParams) -> float:
    """``n(n-1) k(diam)``: every pair is at most the diameter apart."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    return n * (n - 1) * float(kernel_eval(params, space.diameter))


@dataclass(frozen=True)
class SandwichReport:
    lhs: float
    mid: float
    rhs: float
    holds: bool


def sandwich_check(config: Configuration, r: float, s: float, t: float, rtol=1e-10) -> SandwichReport:
    """Compare the difference quotient in the exponent with the log^{t+1} energies.

    ``lhs = E^r_{log^{t+1}}``, ``mid = (E^s_{log^t} - E^r_{log^t}) / (s - r)``,
    ``rhs = E^s_{log^{t+1}}``. The quotient is summed pair by pair as
    ``d^{-r} L^t expm1((s - r) L) / (s - r)`` so it does not cancel when
    ``s - r`` is small.
    """
    if not s > r >= 0:
        raise ValueError(f"need s > r >= 0, got r={r}, s={s}")
    if t < 0:
        raise ValueError(f"need t >= 0, got {t}")
    d = _pair_distances(config)
    if np.any(d == 0):
        raise ValueError("coincident points: the energies are infinite")
    L = -np.log(d)
    lhs = energy_from_distances(d, KernelParams(r, t + 1)).linear
    rhs = energy_from_distances(d, KernelParams(s, t + 1)).linear
    h = s - r
    mid = 2.0 * math.fsum((d ** -r * L ** t * np.expm1(h * L) / h).tolist())
    slack_lo = rtol * max(abs(lhs), abs(mid))
    slack_hi = rtol * max(abs(mid), abs(rhs))
    holds = lhs <= mid + slack_lo and mid <= rhs + slack_hi
    return SandwichReport(lhs, mid, rhs, bool(holds))
