"""Minimal-energy and best-packing configurations by multi-start descent.

Continuous spaces are handled by projected gradient descent on the log of
the energy (so ``s`` in the thousands does not overflow) with a
Barzilai-Borwein trial step and Armijo backtracking. Finite spaces use a
single-point exchange local search with the same multi-start driver.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import lsq_linear
from scipy.special import logsumexp, softmax

from .configurations import Configuration, separation
from .energy import EnergyValue, energy
from .kernels import KernelParams, log_kernel_slope

DEFAULT_SEED = 0xC0FFEE
ARMIJO = 1e-4
FD_STEP = 1e-7


def default_seed() -> int:
    env = os.environ.get("SLOG_ENERGY_SEED")
    return int(env, 0) if env else DEFAULT_SEED


@dataclass(frozen=True)
class SolveOptions:
    starts: int = 16
    max_iters: int = 10_000
    grad_tol: float = 1e-10
    seed: int = field(default_factory=default_seed)
    anneal: bool = False
    threads: int = 1

    def __post_init__(self):
        if self.starts < 1:
            raise ValueError(f"starts must be >= 1, got {self.starts}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if not self.grad_tol > 0:
            raise ValueError(f"grad_tol must be > 0, got {self.grad_tol}")
        if self.threads < 1:
            raise ValueError(f"threads must be >= 1, got {self.threads}")


@dataclass
class StartResult:
    index: int
    points: np.ndarray
    log_energy: float
    converged: bool
    iterations: int


@dataclass
class SolveResult:
    config: Configuration
    energy: EnergyValue
    converged: bool
    starts_agreeing: int
    params: KernelParams
    starts: list = field(default_factory=list, repr=False)

    def agreeing_configs(self, rtol=1e-8):
        """Final configurations of the starts within ``rtol`` of the best energy."""
        best = self.energy.log
        return [
            Configuration(self.config.space, r.points)
            for r in self.starts
            if abs(r.log_energy - best) <= rtol
        ]


@dataclass
class PackingResult:
    config: Configuration
    delta: float
    converged: bool = True


# -- objective ---------------------------------------------------------------


def _pieces(space, points, params):
    """``log E`` with the pair-weight matrix ``C`` and distance Jacobian ``J``.

    ``grad log E = sum_j C[i, j] J[i, j]``. ``C`` and ``J`` are ``None`` when
    the space has no analytic Jacobian; ``f`` is ``inf`` for coincident points.
    """
    n = len(points)
    iu = np.triu_indices(n, k=1)
    analytic = space.pairwise_grad(points)
    D = analytic[0] if analytic is not None else space.pairwise(points)
    d = D[iu]
    if not params.nontrivial:
        J = analytic[1] if analytic is not None else None
        return math.log(n * (n - 1)), (np.zeros((n, n)) if J is not None else None), J, D
    if np.any(d <= 0):
        return math.inf, None, None, D
    L = -np.log(d)
    logs = params.s * L + (params.t * np.log(L) if params.t else 0.0)
    f = math.log(2.0) + float(logsumexp(logs))
    if analytic is None:
        return f, None, None, D
    C = np.zeros((n, n))
    C[iu] = softmax(logs) * log_kernel_slope(params, d)
    return f, C + C.T, analytic[1], D


def log_energy_and_grad(space, points, params: KernelParams):
    """``log E`` and its gradient in the space's point parameterization.

    On the geodesic circle the gradient at an exactly antipodal pair is a
    one-sided derivative.
    """
    points = np.asarray(points, dtype=float)
    f, C, J, _ = _pieces(space, points, params)
    if not math.isfinite(f):
        return f, np.zeros_like(points)
    if C is None:
        return f, _fd_gradient(space, points, params)
    return f, np.einsum("ij,ij...->i...", C, J)


def _min_norm_gradient(space, points, params, pieces, eps):
    """Smallest gradient over all one-sided choices at near-corner pairs.

    Pairs flagged by ``space.kink_mask`` contribute ``sigma * |dD/dx|`` with
    ``sigma`` free in [-1, 1]; the minimum-norm element of that set is a
    bounded least-squares problem. Returns ``(grad, has_kinks)``.
    """
    f, C, J, D = pieces
    if C is None:
        return _fd_gradient(space, points, params), False
    mask = space.kink_mask(D, eps)
    if mask is None or not mask.any() or space.point_shape != ():
        return np.einsum("ij,ij...->i...", C, J), False
    g0 = np.einsum("ij,ij->i", np.where(mask | mask.T, 0.0, C), J)
    pairs = np.argwhere(mask)
    A = np.zeros((len(points), len(pairs)))
    for p, (i, j) in enumerate(pairs):
        c = C[i, j] * abs(J[i, j])
        A[i, p] = c
        A[j, p] = -c
    sol = lsq_linear(A, -g0, bounds=(-1.0, 1.0), method="bvls")
    return g0 + A @ sol.x, True


def _gradient_scale(pieces):
    """Norm of the gradient with every pair pulling the same way; the
    stationarity test is relative to it, since ``|grad log E|`` grows like
    ``s / d``."""
    C, J = pieces[1], pieces[2]
    if C is None:
        return 1.0
    return max(1.0, float(np.linalg.norm(np.einsum("ij,ij...->i...", np.abs(C), np.abs(J)))))


def _log_energy(space, points, params):
    n = len(points)
    d = space.pairwise(points)[np.triu_indices(n, k=1)]
    if not params.nontrivial:
        return math.log(n * (n - 1))
    if np.any(d <= 0):
        return math.inf
    L = -np.log(d)
    logs = params.s * L + (params.t * np.log(L) if params.t else 0.0)
    return math.log(2.0) + float(logsumexp(logs))


def _fd_gradient(space, points, params):
    grad = np.zeros_like(points)
    flat = grad.reshape(-1)
    for k in range(flat.size):
        e = np.zeros(points.size)
        e[k] = FD_STEP
        e = e.reshape(points.shape)
        hi = _log_energy(space, points + e, params)
        lo = _log_energy(space, points - e, params)
        flat[k] = (hi - lo) / (2 * FD_STEP)
    return grad


# -- continuous descent ------------------------------------------------------

KINK_EPS = 1e-3
KINK_EPS_MIN = 1e-14


def _descend(space, x, params, opts: SolveOptions):
    """Projected gradient descent from ``x``; returns (x, f, converged, iters).

    Near a corner of the metric the descent direction is the minimum-norm
    element of the ``eps``-subdifferential. ``eps`` shrinks whenever that
    element vanishes, and convergence is declared only with ``eps`` at its
    floor.
    """
    bounded = getattr(space, "bounded", False)
    x = space.retract(x)
    pieces = _pieces(space, x, params)
    f = pieces[0]
    scale = space.diameter
    eps = KINK_EPS
    step = None
    prev = None
    g = None
    for it in range(1, opts.max_iters + 1):
        if not math.isfinite(f):
            return x, f, False, it
        if g is None:
            g, kinked = _min_norm_gradient(space, x, params, pieces, eps)
        stat = space.stationarity(x, g) / _gradient_scale(pieces)
        if stat <= opts.grad_tol:
            if not kinked or eps <= KINK_EPS_MIN:
                return x, f, True, it
            eps = max(eps * 1e-2, KINK_EPS_MIN)
            g, prev = None, None
            continue
        d = -space.tangent(x, g)
        dnorm = float(np.linalg.norm(d))
        if step is None:
            step = 0.1 * scale / dnorm
        elif prev is not None:
            sx, sg = prev
            sy = float(np.sum(sx * sg))
            step = float(np.sum(sx * sx)) / sy if sy > 0 else 2 * step
        step = min(step, scale / dnorm)
        t = step
        accepted = False
        while t * dnorm > 1e-15 * scale:
            x_new = space.retract(x + t * d)
            f_new = _log_energy(space, x_new, params)
            if bounded:
                decrease = -float(np.sum(g * (x_new - x)))
            else:
                decrease = t * dnorm * dnorm
            if f_new <= f - ARMIJO * decrease and f_new < f:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            if kinked and eps > KINK_EPS_MIN:
                eps = max(eps * 1e-2, KINK_EPS_MIN)
                g, prev = None, None
                continue
            # no resolvable descent step left; trust it only near stationarity
            return x, f, stat <= 1e-6, it
        pieces = _pieces(space, x_new, params)
        g_new, kinked_new = _min_norm_gradient(space, x_new, params, pieces, eps)
        prev = (t * d, space.tangent(x_new, g_new) - space.tangent(x, g))
        x, f, g, kinked = x_new, pieces[0], g_new, kinked_new
    return x, f, False, opts.max_iters


# -- finite local search -----------------------------------------------------


def _exchange(space, idx, params, opts):
    idx = np.array(idx, dtype=int)
    f = _log_energy(space, idx, params)
    for it in range(1, opts.max_iters + 1):
        improved = False
        for i in range(len(idx)):
            cand = np.setdiff1d(np.arange(space.size), idx)
            best_j, best_f = None, f
            for j in cand:
                trial = idx.copy()
                trial[i] = j
                ft = _log_energy(space, trial, params)
                if ft < best_f - 1e-15 * abs(best_f):
                    best_j, best_f = j, ft
            if best_j is not None:
                idx[i], f, improved = best_j, best_f, True
        if not improved:
            return idx, f, True, it
    return idx, f, False, opts.max_iters


def _initial_points(space, n, rng):
    if not space.continuous:
        return rng.choice(space.size, size=n, replace=False)
    return space.sample(n, rng)


def _run_start(space, n, params, opts, k, init):
    rng = np.random.default_rng([opts.seed, k])
    x0 = np.array(init, dtype=float) if init is not None else _initial_points(space, n, rng)
    if space.continuous:
        x, f, ok, iters = _descend(space, x0, params, opts)
    else:
        x, f, ok, iters = _exchange(space, x0, params, opts)
    if opts.anneal:
        x, f = _anneal(space, x, f, params, opts, rng)
    return StartResult(k, x, f, ok, iters)


def _anneal(space, x, f, params, opts, rng, rounds=8):
    """Perturb-and-redescend polish; keeps the perturbed minimum only if lower."""
    if not space.continuous:
        return x, f
    sigma = 0.05 * space.diameter
    for _ in range(rounds):
        trial = space.retract(x + sigma * rng.standard_normal(np.shape(x)))
        y, fy, _, _ = _descend(space, trial, params, opts)
        if fy < f:
            x, f = y, fy
        sigma *= 0.5
    return x, f


def minimize_energy(space, n: int, params: KernelParams, opts: SolveOptions | None = None, init=None) -> SolveResult:
    """Best of ``opts.starts`` descents; start 0 begins at ``init`` when given."""
    opts = opts or SolveOptions()
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if not space.continuous and n > space.size:
        raise ValueError(f"n={n} exceeds the {space.size} points of {space.id}")
    inits = [init] + [None] * (opts.starts - 1)

    def job(k):
        return _run_start(space, n, params, opts, k, inits[k])

    if opts.threads > 1:
        with ThreadPoolExecutor(opts.threads) as pool:
            runs = list(pool.map(job, range(opts.starts)))
    else:
        runs = [job(k) for k in range(opts.starts)]
    # lowest energy wins; ties go to the lowest start index
    best = min(runs, key=lambda r: (r.log_energy, r.index))
    config = Configuration(space, best.points)
    value = energy(config, params)
    agreeing = sum(abs(r.log_energy - best.log_energy) <= 1e-8 for r in runs)
    return SolveResult(
        config=config,
        energy=value,
        converged=any(r.converged for r in runs),
        starts_agreeing=agreeing,
        params=params,
        starts=runs,
    )


# -- best packing ------------------------------------------------------------

PACKING_SCHEDULE = tuple(2.0**k for k in range(1, 11))


def maximin_polish(config: Configuration, tol=1e-12, max_sweeps=100_000) -> Configuration:
    """Move points one at a time to enlarge their nearest-neighbour distance."""
    space = config.space
    pts = np.array(config.points)
    for _ in range(max_sweeps):
        moved = 0.0
        for i in range(len(pts)):
            new = space.maximin_move(pts, i)
            shift = space.distance(pts[i], new)
            pts[i] = new
            moved = max(moved, shift)
        if moved <= tol:
            break
    polished = Configuration(space, pts)
    return polished if separation(polished) >= separation(config) else config


def best_packing(space, n: int, opts: SolveOptions | None = None, schedule=PACKING_SCHEDULE) -> PackingResult:
    """Energy minimizers along an increasing ``s`` schedule, then maximin polish."""
    opts = opts or SolveOptions()
    result = None
    converged = True
    for k, s in enumerate(schedule):
        stage = opts if k == 0 else replace(opts, starts=1)
        init = None if result is None else result.config.points
        result = minimize_energy(space, n, KernelParams(s, 0.0), stage, init=init)
        converged = converged and result.converged
    config = maximin_polish(result.config)
    return PackingResult(config, separation(config), converged)
