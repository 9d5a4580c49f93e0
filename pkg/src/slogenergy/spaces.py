"""Compact metric spaces of diameter below 1.

Every space stores points in a parameterization that the optimizer moves
directly: a float per point on the segment and circles, a 3-vector on the
sphere, an integer index on finite spaces. Spaces are immutable; samplers
take an explicit seed or generator.
"""
from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .configurations import Configuration

DIAMETER_MARGIN = 1e-9
TWO_PI = 2 * np.pi


class SpaceError(ValueError):
    """Invalid space construction or an invalid point for a space."""


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _fmt(x: float) -> str:
    return repr(float(x))


class MetricSpace:
    """Common contract for the built-in spaces.

    Subclasses provide ``pairwise``, ``pairwise_grad``, ``retract``,
    ``sample`` and set ``id``, ``dim``, ``diameter`` and ``point_shape``.
    """

    id: str
    dim: int
    diameter: float
    point_shape: tuple = ()
    continuous = True

    def _check_diameter(self):
        if not self.diameter < 1 - DIAMETER_MARGIN:
            raise SpaceError(f"{self.id}: diameter {self.diameter!r} >= 1; need diam(A) < 1")

    def distance(self, x, y) -> float:
        pts = np.asarray([x, y], dtype=self._dtype)
        return float(self.pairwise(pts)[0, 1])

    _dtype = float

    def pairwise(self, points) -> np.ndarray:
        raise NotImplementedError

    def pairwise_grad(self, points):
        """Distance matrix ``D`` and ``J[i, j] = dD_ij / dx_i``, or ``None``."""
        return None

    def retract(self, raw):
        raise NotImplementedError

    def tangent(self, points, grad):
        """Project a raw gradient onto the directions the space allows."""
        return grad

    def stationarity(self, points, grad) -> float:
        return float(np.linalg.norm(self.tangent(points, grad)))

    def kink_mask(self, D, eps):
        return None

    def sample(self, n: int, seed=None):
        raise NotImplementedError

    def contains(self, points) -> bool:
        pts = np.asarray(points, dtype=self._dtype)
        return bool(np.allclose(self.retract(pts), pts, rtol=0, atol=1e-12))

    def maximin_move(self, points, i: int):
        """A position for point ``i`` with strictly larger distance to its nearest
        neighbour, or the current position if no improving move was found."""
        points = np.asarray(points, dtype=float)
        others = np.delete(np.arange(len(points)), i)
        D, J = self.pairwise_grad(points)
        d_i = D[i, others]
        current = d_i.min()
        close = others[d_i <= current * (1 + 1e-9)]
        direction = self.tangent(points[i : i + 1], J[i, close].sum(axis=0)[None])[0]
        norm = np.linalg.norm(direction)
        if norm == 0:
            return points[i]
        step = 0.5 * current / norm
        for _ in range(40):
            trial = points.copy()
            trial[i] = self.retract((points[i] + step * direction)[None])[0]
            new = self.pairwise(trial)[i, others].min()
            if new > current:
                return trial[i]
            step *= 0.5
        return points[i]

    def points_to_json(self, points) -> list:
        return np.asarray(points).tolist()

    def points_from_json(self, data):
        return np.asarray(data, dtype=self._dtype)

    def __repr__(self):
        return f"<{type(self).__name__} {self.id}>"


class SegmentSpace(MetricSpace):
    dim = 1
    bounded = True

    def __init__(self, a: float, b: float):
        a, b = float(a), float(b)
        if not a < b:
            raise SpaceError(f"segment needs a < b, got a={a}, b={b}")
        self.a, self.b = a, b
        self.diameter = b - a
        self.id = f"segment:a={_fmt(a)},b={_fmt(b)}"
        self._check_diameter()

    def pairwise(self, points):
        x = np.asarray(points, dtype=float)
        return np.abs(x[:, None] - x[None, :])

    def pairwise_grad(self, points):
        x = np.asarray(points, dtype=float)
        diff = x[:, None] - x[None, :]
        return np.abs(diff), np.sign(diff)

    def retract(self, raw):
        return np.clip(np.asarray(raw, dtype=float), self.a, self.b)

    def tangent(self, points, grad):
        # drop components that would push an endpoint out of [a, b]
        x = np.asarray(points, dtype=float)
        blocked = ((x <= self.a) & (grad > 0)) | ((x >= self.b) & (grad < 0))
        return np.where(blocked, 0.0, grad)

    def sample(self, n, seed=None):
        return _rng(seed).uniform(self.a, self.b, size=n)

    def maximin_move(self, points, i):
        x = np.asarray(points, dtype=float)
        others = np.delete(x, i)
        left = others[others <= x[i]]
        right = others[others > x[i]]
        lo = left.max() if left.size else None
        hi = right.min() if right.size else None
        if lo is None:
            return self.a
        if hi is None:
            return self.b
        return 0.5 * (lo + hi)


class CircleSpace(MetricSpace):
    """Circle of radius ``alpha`` with the shorter-arc or the chord metric.

    Points are angles in ``[0, 2 pi)``; both metrics are computed from the
    wrapped angular gap.
    """

    dim = 1

    def __init__(self, alpha: float, metric_kind: str = "geodesic"):
        alpha = float(alpha)
        if metric_kind not in ("geodesic", "chord"):
            raise SpaceError(f"metric_kind must be 'geodesic' or 'chord', got {metric_kind!r}")
        if not alpha > 0:
            raise SpaceError(f"circle radius must be > 0, got {alpha}")
        if metric_kind == "geodesic" and not math.pi * alpha < 1 - DIAMETER_MARGIN:
            raise SpaceError(
                f"geodesic circle needs 0 < alpha < 1/pi (diameter pi*alpha < 1), got alpha={alpha}"
            )
        if metric_kind == "chord" and not 2 * alpha < 1 - DIAMETER_MARGIN:
            raise SpaceError(
                f"chord circle needs 0 < alpha < 1/2 (diameter 2*alpha < 1), got alpha={alpha}"
            )
        self.alpha = alpha
        self.metric_kind = metric_kind
        self.diameter = math.pi * alpha if metric_kind == "geodesic" else 2 * alpha
        self.id = f"circle:alpha={_fmt(alpha)},metric={metric_kind}"
        self._check_diameter()

    @staticmethod
    def _gap(points):
        th = np.asarray(points, dtype=float)
        # th_i - th_j is exactly antisymmetric, so folding it keeps distances
        # independent of the order in which points are listed
        d = th[:, None] - th[None, :]
        a = np.abs(d)
        far = a > np.pi
        return np.where(far, -np.sign(d), np.sign(d)) * np.where(far, TWO_PI - a, a)

    def pairwise(self, points):
        w = np.abs(self._gap(points))
        if self.metric_kind == "geodesic":
            return self.alpha * w
        return 2 * self.alpha * np.sin(w / 2)

    def pairwise_grad(self, points):
        w = self._gap(points)
        aw = np.abs(w)
        if self.metric_kind == "geodesic":
            return self.alpha * aw, self.alpha * np.sign(w)
        return 2 * self.alpha * np.sin(aw / 2), self.alpha * np.cos(aw / 2) * np.sign(w)

    def kink_mask(self, D, eps):
        """Pairs within relative ``eps`` of antipodal, where the shorter-arc
        distance has a corner (upper triangle only)."""
        if self.metric_kind != "geodesic":
            return None
        return np.triu(D >= self.diameter * (1 - eps), k=1)

    def retract(self, raw):
        th = np.mod(np.asarray(raw, dtype=float), TWO_PI)
        # mod of a tiny negative angle rounds up to exactly 2 pi
        return np.where(th >= TWO_PI, 0.0, th)

    def contains(self, points):
        th = np.asarray(points, dtype=float)
        return bool(np.all((th >= 0) & (th < TWO_PI)))

    def sample(self, n, seed=None):
        return _rng(seed).uniform(0, TWO_PI, size=n)

    def maximin_move(self, points, i):
        th = np.asarray(points, dtype=float)
        rel = np.mod(np.delete(th, i) - th[i], TWO_PI)
        if rel.size == 0:
            return th[i]
        nxt = rel[rel > 0].min() if np.any(rel > 0) else TWO_PI
        prev = rel.max()
        prev = prev - TWO_PI if prev > 0 else prev
        return float(np.mod(th[i] + 0.5 * (prev + nxt), TWO_PI))


class SphereSpace(MetricSpace):
    """Sphere of radius ``alpha`` in R^3 with the chord metric."""

    dim = 2
    point_shape = (3,)

    def __init__(self, alpha: float):
        alpha = float(alpha)
        if not 0 < 2 * alpha < 1 - DIAMETER_MARGIN:
            raise SpaceError(f"sphere needs 0 < alpha < 1/2 (diameter 2*alpha < 1), got {alpha}")
        self.alpha = alpha
        self.diameter = 2 * alpha
        self.id = f"sphere:alpha={_fmt(alpha)}"

    def pairwise(self, points):
        x = np.asarray(points, dtype=float)
        diff = x[:, None, :] - x[None, :, :]
        return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))

    def pairwise_grad(self, points):
        x = np.asarray(points, dtype=float)
        diff = x[:, None, :] - x[None, :, :]
        D = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        with np.errstate(invalid="ignore", divide="ignore"):
            J = np.where(D[..., None] > 0, diff / D[..., None], 0.0)
        return D, J

    def retract(self, raw):
        v = np.asarray(raw, dtype=float)
        return self.alpha * v / np.linalg.norm(v, axis=-1, keepdims=True)

    def tangent(self, points, grad):
        u = np.asarray(points, dtype=float) / self.alpha
        return grad - np.sum(grad * u, axis=-1, keepdims=True) * u

    def contains(self, points):
        x = np.asarray(points, dtype=float)
        return bool(np.allclose(np.linalg.norm(x, axis=-1), self.alpha, rtol=0, atol=1e-12))

    def sample(self, n, seed=None):
        return self.retract(_rng(seed).standard_normal((n, 3)))


class FiniteSpace(MetricSpace):
    """Finite metric space given by a distance matrix; points are indices.

    ``coords`` optionally records the source-space point behind each index
    (set by :func:`discretize`).
    """

    dim = 0
    continuous = False
    _dtype = int

    def __init__(self, distances, *, coords=None, source=None, validate=True, tol=1e-12):
        D = np.array(distances, dtype=float)
        if validate:
            _validate_matrix(D, tol)
        self.matrix = D
        self.matrix.setflags(write=False)
        self.size = D.shape[0]
        self.diameter = float(D.max()) if self.size > 1 else 0.0
        self.coords = coords
        self.source = source
        tag = f"of={source.id}," if source is not None else ""
        self.id = f"finite:{tag}m={self.size}"
        self._check_diameter()

    def pairwise(self, points):
        idx = np.asarray(points, dtype=int)
        return self.matrix[np.ix_(idx, idx)]

    def retract(self, raw):
        return np.clip(np.rint(np.asarray(raw, dtype=float)), 0, self.size - 1).astype(int)

    def sample(self, n, seed=None):
        rng = _rng(seed)
        return rng.choice(self.size, size=n, replace=n > self.size)

    def maximin_move(self, points, i):
        idx = np.asarray(points, dtype=int)
        others = np.delete(idx, i)
        current = self.matrix[idx[i], others].min()
        reach = self.matrix[:, others].min(axis=1)
        best = int(np.argmax(reach))
        return best if reach[best] > current else int(idx[i])

    def lift(self, points):
        """Map indices back to points of the source space."""
        if self.coords is None:
            raise SpaceError(f"{self.id} has no source coordinates")
        return np.asarray(self.coords)[np.asarray(points, dtype=int)]


def _validate_matrix(D, tol):
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise SpaceError(f"distance matrix must be square, got shape {D.shape}")
    if D.shape[0] < 2:
        raise SpaceError("a finite space needs at least two points")
    if not np.all(np.isfinite(D)):
        raise SpaceError("distance matrix has non-finite entries")
    asym = np.argwhere(np.abs(D - D.T) > tol)
    if asym.size:
        i, j = asym[0]
        raise SpaceError(f"matrix not symmetric at ({i}, {j}): {D[i, j]} != {D[j, i]}")
    diag = np.flatnonzero(np.abs(np.diag(D)) > tol)
    if diag.size:
        raise SpaceError(f"nonzero diagonal entry at ({diag[0]}, {diag[0]})")
    off = D[~np.eye(len(D), dtype=bool)]
    if np.any(off <= 0):
        i, j = np.argwhere((D <= 0) & ~np.eye(len(D), dtype=bool))[0]
        raise SpaceError(f"non-positive distance between distinct points ({i}, {j})")
    bad = np.argwhere((D < 0) | (D >= 1))
    if bad.size:
        i, j = bad[0]
        raise SpaceError(f"entry ({i}, {j}) = {D[i, j]} outside [0, 1)")
    for k in range(len(D)):
        viol = np.argwhere(D > D[:, k : k + 1] + D[k : k + 1, :] + tol)
        if viol.size:
            i, j = viol[0]
            raise SpaceError(
                f"triangle inequality fails for ({i}, {j}, {k}): "
                f"d({i},{j})={D[i, j]} > d({i},{k})+d({k},{j})={D[i, k] + D[k, j]}"
            )


def make_segment(a: float, b: float) -> SegmentSpace:
    return SegmentSpace(a, b)


def make_circle(alpha: float, metric_kind: str = "geodesic") -> CircleSpace:
    return CircleSpace(alpha, metric_kind)


def make_sphere(alpha: float) -> SphereSpace:
    return SphereSpace(alpha)


def make_finite(distances) -> FiniteSpace:
    return FiniteSpace(distances)


def discretize(space: MetricSpace, m: int) -> FiniteSpace:
    """Finite grid of ``m`` points of a segment or circle, evenly spaced.

    The grid's ``mesh`` attribute is the largest distance between adjacent
    grid points; every point of the source lies within ``mesh / 2`` of it.
    """
    if m < 2:
        raise SpaceError(f"need at least 2 grid points, got {m}")
    if isinstance(space, SegmentSpace):
        coords = np.linspace(space.a, space.b, m)
        mesh = (space.b - space.a) / (m - 1)
    elif isinstance(space, CircleSpace):
        coords = TWO_PI * np.arange(m) / m
        mesh = float(space.pairwise(coords[:2])[0, 1])
    else:
        raise SpaceError(f"cannot discretize {space.id}")
    grid = FiniteSpace(space.pairwise(coords), coords=coords, source=space, validate=False)
    grid.mesh = mesh
    return grid


def load_distance_csv(path) -> FiniteSpace:
    """Read a square distance matrix from CSV; a non-numeric first row is a header."""
    with open(Path(path), newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise SpaceError(f"{path}: empty distance matrix")
    try:
        [float(c) for c in rows[0]]
    except ValueError:
        rows = rows[1:]
    try:
        data = [[float(c) for c in r] for r in rows]
    except ValueError as exc:
        raise SpaceError(f"{path}: {exc}") from None
    return FiniteSpace(data)


def save_distance_csv(space: FiniteSpace, path) -> None:
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh)
        for row in space.matrix:
            w.writerow([repr(float(v)) for v in row])


def space_from_id(space_id: str, matrix=None) -> MetricSpace:
    """Rebuild a built-in space from its ``id`` string."""
    kind, _, rest = space_id.partition(":")
    fields = dict(kv.split("=", 1) for kv in rest.split(",") if "=" in kv)
    if kind == "segment":
        return SegmentSpace(float(fields["a"]), float(fields["b"]))
    if kind == "circle":
        return CircleSpace(float(fields["alpha"]), fields.get("metric", "geodesic"))
    if kind == "sphere":
        return SphereSpace(float(fields["alpha"]))
    if kind == "finite":
        if matrix is None:
            raise SpaceError("finite space ids need the distance matrix")
        return FiniteSpace(matrix)
    raise SpaceError(f"unknown space id {space_id!r}")


def equally_spaced(circle: CircleSpace, n: int, phase: float = 0.0) -> Configuration:
    """``n`` points at angles ``phase + 2 pi k / n``."""
    if n < 2:
        raise SpaceError(f"need n >= 2, got {n}")
    return Configuration(circle, circle.retract(phase + TWO_PI * np.arange(n) / n))
