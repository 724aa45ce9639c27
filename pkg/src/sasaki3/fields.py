"""Scalar fields on the (u, v) plane, metric evaluators, and domains."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegenerateMetricError, DomainError
from .jets import Jet, MAX_ORDER

# coordinate order used everywhere: x = (r, u, v)
COORDS = ("r", "u", "v")
DEGENERACY_THRESHOLD = 1e-12


class ScalarJetField:
    """A smooth function of (u, v) that can be queried for its jet.

    Parameters
    ----------
    evaluator : callable
        ``evaluator(u, v, order) -> Jet`` over two variables (u, v).  ``u``
        and ``v`` may be arrays of equal shape; the jet then has that
        leading shape.
    """

    def __init__(self, evaluator: Callable[[np.ndarray, np.ndarray, int], Jet], name: str = ""):
        self._evaluator = evaluator
        self.name = name

    @classmethod
    def from_function(cls, fn: Callable[[Jet, Jet], Jet], name: str = "") -> "ScalarJetField":
        """Wrap ``fn(u, v)`` written with :mod:`sasaki3.jets` math functions."""

        def evaluator(u, v, order):
            uj, vj = (Jet.variable(x, k, 2, order) for k, x in enumerate(np.broadcast_arrays(u, v)))
            out = fn(uj, vj)
            if not isinstance(out, Jet):
                out = Jet.constant(np.broadcast_to(out, uj.shape), 2, order)
            return out

        return cls(evaluator, name)

    @classmethod
    def constant(cls, c: float, name: str = "") -> "ScalarJetField":
        return cls(lambda u, v, order: Jet.constant(np.full(np.broadcast(u, v).shape, float(c)), 2, order),
                   name or repr(c))

    def jet(self, u, v, order: int = MAX_ORDER) -> Jet:
        return self._evaluator(np.asarray(u, dtype=float), np.asarray(v, dtype=float), order)

    __call__ = jet

    def values(self, u, v) -> np.ndarray:
        return self.jet(u, v, 0).value

    def __repr__(self):
        return f"ScalarJetField({self.name})" if self.name else "ScalarJetField()"


class MetricEvaluator:
    """Point -> metric components with derivatives, in coordinates (r, u, v).

    Parameters
    ----------
    evaluator : callable
        ``evaluator(point, order) -> Jet`` of shape (3, 3) over the three
        coordinates, expanded about ``point``.
    labels : tuple of str
        Coordinate names, for reports.
    """

    def __init__(self, evaluator: Callable[[np.ndarray, int], Jet], labels=COORDS, max_order: int = MAX_ORDER):
        self._evaluator = evaluator
        self.labels = tuple(labels)
        self.max_order = max_order

    @classmethod
    def from_coordinates(cls, fn, labels=COORDS) -> "MetricEvaluator":
        """Wrap ``fn(x0, x1, x2) -> 3x3 nested sequence`` of jets or numbers."""

        def evaluator(p, order):
            xs = Jet.variables(p, order)
            rows = fn(*xs)
            entries = [[e if isinstance(e, Jet) else Jet.constant(e, 3, order) for e in row] for row in rows]
            return Jet.stack([Jet.stack(row) for row in entries])

        return cls(evaluator, labels)

    @classmethod
    def constant(cls, matrix, labels=COORDS) -> "MetricEvaluator":
        m = np.asarray(matrix, dtype=float)
        return cls(lambda p, order: Jet.constant(m, 3, order), labels)

    @classmethod
    def euclidean(cls) -> "MetricEvaluator":
        return cls.constant(np.eye(3), labels=("x", "y", "z"))

    def jet(self, p, order: int = MAX_ORDER) -> Jet:
        """Metric jet at ``p``; raises :class:`DegenerateMetricError` if singular."""
        g = self._evaluator(np.asarray(p, dtype=float), order)
        check_nondegenerate(g.value, p)
        return g

    def __call__(self, p) -> np.ndarray:
        return self.jet(p, 0).value

    def components(self, p, order: int = 2):
        """Return ``(g, dg, d2g, ...)`` as plain arrays.

        ``dg[i, j, k] = d_k g_ij`` and ``d2g[i, j, k, l] = d_k d_l g_ij``.
        """
        g = self.jet(p, order)
        out = [g.value]
        cur = g
        for n in range(1, order + 1):
            cur = cur.grad()
            # cur holds the n-th derivative tensor; its order is (order - n)
            out.append(cur.value)
        return tuple(out)


def check_nondegenerate(g: np.ndarray, p=None) -> None:
    g = np.asarray(g)
    if not np.all(np.isfinite(g)):
        raise DegenerateMetricError(f"non-finite metric at {p}")
    scale = np.trace(g) / 3.0
    det = np.linalg.det(g)
    if scale <= 0 or det < DEGENERACY_THRESHOLD * scale**3:
        raise DegenerateMetricError(f"metric degenerate at {p}: det={det:.3e}")


# domains --------------------------------------------------------------

@dataclass(frozen=True)
class Rectangle:
    umin: float
    umax: float
    vmin: float
    vmax: float

    def contains(self, u, v):
        u, v = np.asarray(u), np.asarray(v)
        return (u >= self.umin) & (u <= self.umax) & (v >= self.vmin) & (v <= self.vmax)

    def grid(self, n: int = 64):
        uu, vv = np.meshgrid(np.linspace(self.umin, self.umax, n), np.linspace(self.vmin, self.vmax, n), indexing="ij")
        return uu.ravel(), vv.ravel()

    def sample(self, n: int, rng: np.random.Generator, margin: float = 0.0):
        du = margin * (self.umax - self.umin)
        dv = margin * (self.vmax - self.vmin)
        return (rng.uniform(self.umin + du, self.umax - du, n),
                rng.uniform(self.vmin + dv, self.vmax - dv, n))

    def __str__(self):
        return f"[{self.umin}, {self.umax}] x [{self.vmin}, {self.vmax}]"


@dataclass(frozen=True)
class Disk:
    """Open disk u^2 + v^2 < radius^2."""

    radius: float = 1.0

    def contains(self, u, v):
        return np.asarray(u) ** 2 + np.asarray(v) ** 2 < self.radius**2

    def grid(self, n: int = 64):
        uu, vv = np.meshgrid(*(np.linspace(-self.radius, self.radius, n + 2)[1:-1],) * 2, indexing="ij")
        keep = self.contains(uu, vv)
        return uu[keep], vv[keep]

    def sample(self, n: int, rng: np.random.Generator, margin: float = 0.0):
        rad = self.radius * (1 - margin) * np.sqrt(rng.uniform(0, 1, n))
        ang = rng.uniform(0, 2 * np.pi, n)
        return rad * np.cos(ang), rad * np.sin(ang)

    def __str__(self):
        return f"disk(radius={self.radius})"


def require_inside(domain, u, v) -> None:
    if not np.all(domain.contains(u, v)):
        raise DomainError(f"point (u={u}, v={v}) lies outside {domain}")


@dataclass(frozen=True)
class Plane:
    """The whole (u, v) plane; grids and samples use the box [-extent, extent]^2."""

    extent: float = 1.5

    def contains(self, u, v):
        return np.isfinite(np.asarray(u)) & np.isfinite(np.asarray(v))

    def grid(self, n: int = 64):
        return Rectangle(-self.extent, self.extent, -self.extent, self.extent).grid(n)

    def sample(self, n: int, rng: np.random.Generator, margin: float = 0.0):
        return Rectangle(-self.extent, self.extent, -self.extent, self.extent).sample(n, rng, margin)

    def __str__(self):
        return "plane"
