"""Minkowski cones over metric spaces and the cone-isometry residual.

The cone over a metric space (X, d) has points (s, x) with radius
s >= 0 (s = 0 is the apex, the base point being irrelevant there) and
time separation

    l_C((s, x), (t, y)) = sqrt(s^2 + t^2 - 2 s t cosh d(x, y))

whenever the radicand is non-negative and s <= t, else 0.  Flat space
R^{1,n} is isometric to the cone over its space of future unit timelike
directions with the boost-angle metric; curved model spaces are not,
and the residual of the radius-direction map quantifies the failure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import Event, Relation
from .minkowski import MinkowskiSpace, minkowski_inner
from .modelspaces import log_map

__all__ = [
    "MetricSpaceHandle",
    "ConePoint",
    "cone_time_sep",
    "cone_relation",
    "flat_direction_space",
    "cone_isometry_residual",
]


@dataclass(frozen=True)
class MetricSpaceHandle:
    """A metric space given by a distance oracle.

    ``dist`` must be symmetric, vanish on the diagonal, and satisfy the
    triangle inequality; :meth:`spot_check` verifies those axioms on a
    given sample of points (they cannot be proved for an oracle).
    """

    dist: Callable[[object, object], float]
    name: str = "metric"

    def __call__(self, x, y) -> float:
        v = float(self.dist(x, y))
        if not (v >= 0.0):
            raise ValueError(f"metric oracle returned a negative distance {v!r}")
        return v

    def spot_check(self, points: Sequence, tol: float = 1e-9) -> None:
        pts = list(points)
        for i, a in enumerate(pts):
            if self(a, a) > tol:
                raise ValueError("metric oracle violates d(x, x) = 0")
            for b in pts[i + 1 :]:
                if abs(self(a, b) - self(b, a)) > tol:
                    raise ValueError("metric oracle is not symmetric")
        for a in pts:
            for b in pts:
                for c in pts:
                    if self(a, c) > self(a, b) + self(b, c) + tol:
                        raise ValueError("metric oracle violates the triangle inequality")


@dataclass(frozen=True)
class ConePoint:
    """A point (radius, base-point) of the cone; radius 0 is the apex."""

    s: float
    x: object = None

    def __post_init__(self) -> None:
        if not (self.s >= 0.0):
            raise ValueError(f"cone radius must be >= 0, got {self.s!r}")


def _cone_radicand(a: ConePoint, b: ConePoint, d: MetricSpaceHandle) -> float:
    if a.s == 0.0 or b.s == 0.0:
        # apex pairs: the cross term collapses regardless of base points
        return a.s * a.s + b.s * b.s
    return a.s * a.s + b.s * b.s - 2.0 * a.s * b.s * math.cosh(d(a.x, b.x))


def cone_time_sep(a: ConePoint, b: ConePoint, d: MetricSpaceHandle) -> float:
    """sqrt(s^2 + t^2 - 2st cosh d(x,y)) when that is >= 0 and s <= t, else 0."""
    rad = _cone_radicand(a, b, d)
    if rad >= 0.0 and a.s <= b.s:
        return math.sqrt(rad)
    return 0.0


def cone_relation(a: ConePoint, b: ConePoint, d: MetricSpaceHandle) -> Relation:
    """Causal iff radicand >= 0 and s <= t; chronological iff the separation > 0."""
    rad = _cone_radicand(a, b, d)
    if rad >= 0.0:
        if a.s <= b.s:
            return Relation.chronological(True) if rad > 0.0 else Relation.causal(True)
        return Relation.chronological(False) if rad > 0.0 else Relation.causal(False)
    return Relation.unrelated()


def flat_direction_space(n: int) -> MetricSpaceHandle:
    """Unit future timelike directions of R^{1,n} with the boost-angle metric.

    d(v, w) = arcosh(<v, w>).  Inputs must be unit future timelike
    vectors (checked to 1e-9); the boost angle is the flat space's angle
    between the corresponding rays.
    """
    if n < 1:
        raise ValueError("direction space needs n >= 1")

    def dist(v, w) -> float:
        vv = np.asarray(v, dtype=float)
        ww = np.asarray(w, dtype=float)
        for u in (vv, ww):
            if u.shape != (n + 1,):
                raise ValueError(f"direction vectors must have {n + 1} components")
            if abs(minkowski_inner(u, u) - 1.0) > 1e-9 or u[0] <= 0.0:
                raise ValueError("directions must be unit future timelike vectors")
        return math.acosh(max(minkowski_inner(vv, ww), 1.0))

    return MetricSpaceHandle(dist=dist, name=f"directions:{n}")


def _direction_and_radius(space, p: Event, x: Event) -> tuple[float, np.ndarray]:
    """The (separation, unit direction) pair of the radial segment [p, x]."""
    s = space.time_separation(p, x)
    if s <= 0.0:
        raise ValueError("cone map requires points in I+(p)")
    if isinstance(space, MinkowskiSpace) or space.is_flat:
        return s, (x.vec - p.vec) / s
    v = log_map(space, p, x)
    return s, v / s


def cone_isometry_residual(
    space, p: Event, pairs: Sequence[tuple[Event, Event]]
) -> float:
    """max |l(x, y) - l_C(f(x), f(y))| for f(x) = (l(p,x), direction at p).

    Directions are unit initial velocities of the radial geodesics from
    p, compared with the angle metric at p (flat: the boost angle;
    curved: arcosh of the tangent-space inner product of the unit
    initial velocities).  Flat backends make f an isometry, so the
    residual vanishes to rounding; curved backends do not, and the
    residual is the quantitative failure.
    """
    is_flat = isinstance(space, MinkowskiSpace) or space.is_flat

    def angle(ux: np.ndarray, uy: np.ndarray) -> float:
        if is_flat:
            g = minkowski_inner(ux, uy)
        else:
            g = space.quadric_inner(ux, uy)
        return math.acosh(max(g, 1.0))

    handle = MetricSpaceHandle(
        dist=lambda u, v: angle(np.asarray(u), np.asarray(v)), name="tangent-angles"
    )
    worst = 0.0
    for x, y in pairs:
        sx, ux = _direction_and_radius(space, p, x)
        sy, uy = _direction_and_radius(space, p, y)
        ell = max(space.time_separation(x, y), space.time_separation(y, x))
        a = ConePoint(sx, tuple(ux))
        b = ConePoint(sy, tuple(uy))
        ell_cone = max(cone_time_sep(a, b, handle), cone_time_sep(b, a, handle))
        worst = max(worst, abs(ell - ell_cone))
    return worst
