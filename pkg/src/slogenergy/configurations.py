"""N-point configurations, separation distance and isometry-invariant signatures."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Configuration:
    """An ordered set of ``n >= 2`` points of ``space``.

    ``points`` uses the space's own parameterization (see ``spaces``).
    """

    space: object
    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=getattr(self.space, "_dtype", float))
        if pts.ndim == 0 or len(pts) < 2:
            raise ConfigurationError("a configuration needs at least 2 points")
        if not self.space.contains(pts):
            raise ConfigurationError(f"points are not valid in {self.space.id}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return len(self.points)

    def distances(self) -> np.ndarray:
        return self.space.pairwise(self.points)

    def replace(self, points) -> "Configuration":
        return Configuration(self.space, points)

    def to_dict(self) -> dict:
        doc = {
            "space_id": self.space.id,
            "n": self.n,
            "points": self.space.points_to_json(self.points),
            "signature": signature(self).tolist(),
            "separation": separation(self),
        }
        if not getattr(self.space, "continuous", True):
            doc["matrix"] = self.space.matrix.tolist()
        return doc

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, doc: dict, space=None) -> "Configuration":
        if space is None:
            from .spaces import space_from_id

            space = space_from_id(doc["space_id"], doc.get("matrix"))
        cfg = cls(space, space.points_from_json(doc["points"]))
        if cfg.n != doc.get("n", cfg.n):
            raise ConfigurationError(f"document says n={doc['n']} but has {cfg.n} points")
        return cfg


def _upper(D):
    return D[np.triu_indices(len(D), k=1)]


def separation(config: Configuration) -> float:
    """Smallest distance between two of the points; 0 if two coincide."""
    return float(_upper(config.distances()).min())


def signature(config: Configuration) -> np.ndarray:
    """Ascending vector of the ``n(n-1)/2`` pairwise distances."""
    return np.sort(_upper(config.distances()), kind="stable")


def config_distance(a, b) -> float:
    """L-infinity distance between two signatures (or configurations)."""
    a = signature(a) if isinstance(a, Configuration) else np.asarray(a, dtype=float)
    b = signature(b) if isinstance(b, Configuration) else np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ConfigurationError(f"signatures of different length: {a.size} vs {b.size}")
    return float(np.max(np.abs(a - b))) if a.size else 0.0


def matched_distance(a: Configuration, b: Configuration) -> float:
    """Smallest, over relabelings of ``b``, of the largest point-to-point distance.

    A pointwise comparison for spaces without a continuous symmetry group
    (the segment), where signature agreement alone is weaker.
    """
    if a.n != b.n:
        raise ConfigurationError(f"configurations of different size: {a.n} vs {b.n}")
    if a.space.id != b.space.id:
        raise ConfigurationError("configurations live in different spaces")
    joint = a.space.pairwise(np.concatenate([a.points, b.points]))
    cross = joint[: a.n, a.n :]
    if a.n > 8:
        raise ConfigurationError("matched_distance enumerates relabelings; n <= 8 only")
    rows = np.arange(a.n)
    return float(min(cross[rows, list(p)].max() for p in itertools.permutations(range(a.n))))
