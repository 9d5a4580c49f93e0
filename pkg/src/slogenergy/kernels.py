"""The s,log^t kernel ``d^{-s} (log 1/d)^t`` and the calculus facts about it.

All evaluators accept scalars or numpy arrays of distances in ``[0, 1)``.
Distances at or above 1 are rejected: outside that range ``log(1/d)`` is
zero or negative and the kernel loses its monotonicity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class DomainError(ValueError):
    """An argument lies outside the domain on which a formula is valid."""


@dataclass(frozen=True)
class KernelParams:
    """Exponent ``s`` on ``1/d`` and power ``t`` on ``log(1/d)``."""

    s: float
    t: float = 0.0

    def __post_init__(self):
        s, t = float(self.s), float(self.t)
        if not (math.isfinite(s) and math.isfinite(t)):
            raise DomainError(f"kernel parameters must be finite, got s={s}, t={t}")
        if s < 0 or t < 0:
            raise DomainError(f"kernel parameters must be >= 0, got s={s}, t={t}")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "t", t)

    @property
    def nontrivial(self) -> bool:
        return (self.s, self.t) != (0.0, 0.0)

    def with_s(self, s: float) -> "KernelParams":
        return KernelParams(s, self.t)

    def with_t(self, t: float) -> "KernelParams":
        return KernelParams(self.s, t)


def _as_distance(d, *, allow_zero=True):
    arr = np.asarray(d, dtype=float)
    lo_ok = arr >= 0 if allow_zero else arr > 0
    if not np.all(lo_ok & (arr < 1)):
        bad = arr[~(lo_ok & (arr < 1))].ravel()[0]
        rng = "[0, 1)" if allow_zero else "(0, 1)"
        raise DomainError(f"distance {bad!r} outside {rng}; the kernel needs diam(A) < 1")
    return arr


def _unbox(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def kernel_eval(params: KernelParams, d):
    """Kernel value ``d^{-s} (log 1/d)^t``; ``+inf`` at ``d = 0`` unless s = t = 0."""
    d = _as_distance(d)
    if not params.nontrivial:
        return _unbox(np.ones_like(d))
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        logs = -np.log(d)
        out = np.where(d > 0, d ** -params.s * logs ** params.t, np.inf)
    return _unbox(out)


def log_kernel_eval(params: KernelParams, d):
    """Natural log of :func:`kernel_eval`, finite for every ``0 < d < 1``.

    Stays representable when the linear kernel overflows (large ``s``).
    Returns ``+inf`` at ``d = 0`` for nontrivial parameters.
    """
    d = _as_distance(d)
    if not params.nontrivial:
        return _unbox(np.zeros_like(d))
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = -np.log(d)
        out = params.s * logs
        if params.t:
            out = out + params.t * np.log(logs)
        out = np.where(d > 0, out, np.inf)
    return _unbox(out)


def log_kernel_slope(params: KernelParams, d):
    """Derivative of ``log k(d)`` with respect to ``d``: ``-s/d - t/(d log(1/d))``."""
    d = np.asarray(d, dtype=float)
    logs = -np.log(d)
    out = -params.s / d
    if params.t:
        out = out - params.t / (d * logs)
    return out


def h_eval(beta: float, x):
    """``x (log 1/x)^{-beta}``, strictly increasing on (0, 1) for beta >= 0."""
    if beta < 0:
        raise DomainError(f"beta must be >= 0, got {beta}")
    x = _as_distance(x, allow_zero=False)
    return _unbox(x * (-np.log(x)) ** -beta)


def p_eval(params: KernelParams, x):
    """``x^{-s} (log 1/x)^t`` on (0, 1); strictly decreasing when (s, t) != (0, 0)."""
    if not params.nontrivial:
        raise DomainError("p(x) is only defined for (s, t) != (0, 0)")
    x = _as_distance(x, allow_zero=False)
    return kernel_eval(params, x)


def k2_geodesic(params: KernelParams, x):
    """Second derivative of ``k(x) = x^{-s} (log 1/x)^t`` on (0, 1).

    ``x^{-(s+2)} [t(t-1) L^{t-2} + (t + 2st) L^{t-1} + s(1+s) L^t]`` with
    ``L = log(1/x)``. Written term by term so that ``t in {0, 1}`` does not
    produce ``0 * inf`` for ``L`` near 0.
    """
    x = _as_distance(x, allow_zero=False)
    s, t = params.s, params.t
    L = -np.log(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        a = t * (t - 1) * L ** (t - 2) if t not in (0.0, 1.0) else 0.0
        b = (t + 2 * s * t) * L ** (t - 1) if t != 0.0 else 0.0
    c = s * (1 + s) * L ** t
    return _unbox(x ** -(s + 2) * (a + b + c))


def _check_chord_args(params, alpha, x):
    if not 0 < alpha < 0.5:
        raise DomainError(f"chord radius must satisfy 0 < alpha < 1/2, got {alpha}")
    x = np.asarray(x, dtype=float)
    if not np.all((x > 0) & (x < np.pi / 2)):
        raise DomainError("chord angle must lie in (0, pi/2)")
    return x


def q_chord(params: KernelParams, alpha: float, x):
    """``(2 alpha sin x)^{-s} (log 1/(2 alpha sin x))^t`` for x in (0, pi/2).

    The chord kernel written in half the central angle, so that a chord of
    angular gap ``theta`` corresponds to ``x = theta / 2``.
    """
    x = _check_chord_args(params, alpha, x)
    return kernel_eval(params, 2 * alpha * np.sin(x))


def k2_chord(params: KernelParams, alpha: float, x):
    """Second derivative of :func:`q_chord` in ``x``.

    Three-term closed form; requires ``t >= 1`` so that each term is
    non-negative and the sum is positive on (0, pi/2).
    """
    if params.t < 1:
        raise DomainError(f"the chord convexity formula needs t >= 1, got t={params.t}")
    x = _check_chord_args(params, alpha, x)
    s, t = params.s, params.t
    u = 2 * alpha * np.sin(x)
    L = -np.log(u)
    cot2 = 1 / np.tan(x) ** 2
    csc2 = 1 / np.sin(x) ** 2
    base = u ** -s
    tail = s * L + t
    first = s * cot2 * base * L ** (t - 1)
    second = (t - 1) * cot2 * base * L ** (t - 2) * tail if t != 1.0 else 0.0
    third = (csc2 + s * cot2) * base * L ** (t - 1) * tail
    return _unbox(first + second + third)
