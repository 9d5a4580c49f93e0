"""Exhaustive ground truth over all n-subsets of a finite space.

Subsets are visited in lexicographic index order. The innermost two levels
are evaluated as one array operation; outer levels are pruned as soon as a
partial result can no longer beat the incumbent. Only strict improvements
replace the incumbent, so exact ties resolve to the lexicographically
smallest index set.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .configurations import Configuration, separation
from .energy import energy
from .kernels import KernelParams, log_kernel_eval
from .optimizer import PackingResult, SolveOptions, SolveResult, minimize_energy


class BudgetExceeded(ValueError):
    def __init__(self, m, n, combos, budget):
        super().__init__(f"C({m}, {n}) = {combos} subsets exceeds the budget of {budget}")
        self.combinations = combos


@dataclass(frozen=True)
class GridBudget:
    max_combinations: int = 10**7

    def __post_init__(self):
        if self.max_combinations <= 0:
            raise ValueError("max_combinations must be positive")


def _check(space, n, budget):
    if getattr(space, "continuous", True):
        raise TypeError(f"the grid oracle needs a finite space, got {space.id}")
    m = space.size
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if n > m:
        raise ValueError(f"n={n} exceeds the {m} points of {space.id}")
    combos = math.comb(m, n)
    budget = budget or GridBudget()
    if combos > budget.max_combinations:
        raise BudgetExceeded(m, n, combos, budget.max_combinations)


def _scaled_kernel(space, params):
    """Kernel matrix divided by its largest off-diagonal entry (no overflow)."""
    D = space.matrix
    off = ~np.eye(space.size, dtype=bool)
    logK = np.zeros_like(D)
    logK[off] = log_kernel_eval(params, D[off])
    shift = logK[off].max()
    K = np.exp(logK - shift)
    K[~off] = 0.0
    return K


def grid_minimize(space, n: int, params: KernelParams, budget: GridBudget | None = None) -> SolveResult:
    """Exact minimum of the energy over every ``n``-subset of ``space``."""
    _check(space, n, budget)
    K = _scaled_kernel(space, params)
    m = space.size
    kmin = K[~np.eye(m, dtype=bool)].min()
    total_pairs = n * (n - 1) // 2
    best = [math.inf, None]

    def last_two(prefix, partial, start):
        cand = np.arange(start, m)
        if cand.size < 2:
            return
        a = K[np.ix_(prefix, cand)].sum(axis=0) if prefix else np.zeros(cand.size)
        E = a[:, None] + a[None, :] + K[np.ix_(cand, cand)]
        E[np.tril_indices(cand.size)] = np.inf
        flat = int(np.argmin(E))
        value = partial + E.flat[flat]
        if value < best[0]:
            k, l = divmod(flat, cand.size)
            best[0], best[1] = value, prefix + [int(cand[k]), int(cand[l])]

    def walk(prefix, partial, start):
        remaining = n - len(prefix)
        if remaining == 2:
            last_two(prefix, partial, start)
            return
        placed = len(prefix) + 1
        rest_pairs = total_pairs - placed * (placed - 1) // 2
        for i in range(start, m - remaining + 1):
            new = partial + (K[prefix, i].sum() if prefix else 0.0)
            if new + rest_pairs * kmin >= best[0]:
                continue
            walk(prefix + [i], new, i + 1)

    walk([], 0.0, 0)
    config = Configuration(space, np.array(best[1]))
    return SolveResult(config, energy(config, params), True, 1, params)


def grid_pack(space, n: int, budget: GridBudget | None = None) -> PackingResult:
    """Exact best-packing subset: the largest separation over every ``n``-subset."""
    _check(space, n, budget)
    D = space.matrix
    m = space.size
    best = [-1.0, None]

    def walk(prefix, sep, cand, reach):
        # reach[c] is the distance from candidate c to its nearest chosen point
        remaining = n - len(prefix)
        if cand.size < remaining:
            return
        if remaining == 1:
            vals = np.minimum(sep, reach)
            k = int(np.argmax(vals))
            if vals[k] > best[0]:
                best[0], best[1] = float(vals[k]), prefix + [int(cand[k])]
            return
        if remaining == 2:
            S = np.minimum(np.minimum(reach[:, None], reach[None, :]), D[np.ix_(cand, cand)])
            S = np.minimum(S, sep)
            S[np.tril_indices(cand.size)] = -1.0
            flat = int(np.argmax(S))
            if S.flat[flat] > best[0]:
                k, l = divmod(flat, cand.size)
                best[0], best[1] = float(S.flat[flat]), prefix + [int(cand[k]), int(cand[l])]
            return
        for pos, i in enumerate(cand):
            new_sep = min(sep, reach[pos])
            if new_sep <= best[0]:
                continue
            nxt = cand[pos + 1 :]
            new_reach = np.minimum(reach[pos + 1 :], D[i, nxt])
            keep = new_reach > best[0]
            walk(prefix + [int(i)], new_sep, nxt[keep], new_reach[keep])

    walk([], math.inf, np.arange(m), np.full(m, math.inf))
    config = Configuration(space, np.array(best[1]))
    return PackingResult(config, separation(config))


# -- continuous vs grid --------------------------------------------------------


def kernel_lipschitz(params: KernelParams, lo: float, hi: float, samples=4001) -> float:
    """Largest ``|k'(d)|`` over ``[lo, hi]``, from a dense geometric grid."""
    d = np.geomspace(lo, hi, samples)
    L = -np.log(d)
    slope = d ** (-params.s - 1) * L ** (params.t - 1) * (params.s * L + params.t) if params.nontrivial else 0 * d
    return float(np.max(slope))


@dataclass(frozen=True)
class GridComparison:
    continuous: float
    grid: float
    eps_grid: float
    mesh: float
    lipschitz: float
    m: int

    @property
    def gap(self) -> float:
        return abs(self.continuous - self.grid)

    @property
    def passes(self) -> bool:
        return self.gap <= self.eps_grid


def grid_epsilon(n: int, params: KernelParams, separation_: float, diameter: float, mesh: float):
    """``n(n-1) L_k h``: snapping each point to its nearest grid point moves every
    distance by at most the mesh ``h``; ``L_k`` bounds ``|k'|`` on
    ``[separation/2, diameter]``, valid while ``h <= separation/2``."""
    if mesh > separation_ / 2:
        raise ValueError(f"mesh {mesh} too coarse for separation {separation_}")
    lip = kernel_lipschitz(params, separation_ / 2, diameter)
    return n * (n - 1) * lip * mesh, lip


def compare_with_grid(space, n, params, m, opts: SolveOptions | None = None, budget=None) -> GridComparison:
    """Continuous minimum against the exact minimum on an ``m``-point grid."""
    from .spaces import discretize

    cont = minimize_energy(space, n, params, opts)
    grid = discretize(space, m)
    exact = grid_minimize(grid, n, params, budget)
    eps, lip = grid_epsilon(n, params, separation(cont.config), space.diameter, grid.mesh)
    return GridComparison(cont.energy.linear, exact.energy.linear, eps, grid.mesh, lip, m)
