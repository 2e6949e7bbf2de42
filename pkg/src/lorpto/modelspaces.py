"""Constant-curvature 2-D Lorentzian model spaces.

For curvature parameter K the space is the flat plane (K = 0), the
one-sheet quadric <x,x> = -R^2 in R^{1,2} with R = 1/sqrt(-K) (K < 0),
or a convex wedge of the quadric <x,x> = +R^2 in signature (+,+,-) with
R = 1/sqrt(K) (K > 0).  Closed-form separations, exponential/log maps,
laws of cosines, triangle/hinge realizations, the polar-metric geodesic
oracle (an independent quadrature/shooting route used to cross-validate
every closed form), and the radial comparison map between different K
all live here, together with the chart samplers used by the batch
scanners.

Conventions: the K > 0 wedge is centred on the base point (R, 0, 0)
with maximal separation D = pi/sqrt(K); time orientation on the K > 0
quadric comes from the global timelike field T(x) = (-x1, x0, 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .core import (
    Event,
    NotTimelikeRelated,
    OracleError,
    Relation,
    SamplingError,
)
from .minkowski import MinkowskiSpace, hyperbolic_norm, minkowski_inner

__all__ = [
    "ModelSpace",
    "ModelTriangle",
    "Hinge",
    "f_model",
    "ell_K",
    "relation_K",
    "exp_map",
    "log_map",
    "law_of_cosines",
    "realize_triangle",
    "comparison_point",
    "realize_hinge",
    "polar_geodesic_oracle",
    "radial_map",
    "radial_norm_sq",
    "radial_pullback_margin",
    "space_for_chart",
    "points_to_json",
    "points_from_json",
]

_WEDGE_COSH_BOUND = math.cosh(math.pi / 2.0)


@dataclass(frozen=True)
class ModelSpace:
    """The 2-D model space of constant curvature K."""

    K: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.K):
            raise ValueError("curvature parameter must be finite")

    @property
    def chart(self) -> str:
        return f"model:{self.K:g}"

    @property
    def D(self) -> float:
        """Maximal comparison separation: pi/sqrt(K) for K > 0, else inf."""
        return math.pi / math.sqrt(self.K) if self.K > 0 else math.inf

    @property
    def R(self) -> float:
        if self.K == 0.0:
            raise ValueError("flat model space has no quadric radius")
        return 1.0 / math.sqrt(abs(self.K))

    @property
    def is_flat(self) -> bool:
        return self.K == 0.0

    @property
    def dim(self) -> int:
        return 2 if self.is_flat else 3

    # -- quadric algebra ----------------------------------------------------

    def quadric_inner(self, u, v) -> float:
        """Ambient bilinear form: (+,-,-) for K<0, (+,+,-) for K>0."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        if self.K < 0.0:
            return float(u[0] * v[0] - u[1] * v[1] - u[2] * v[2])
        if self.K > 0.0:
            return float(u[0] * v[0] + u[1] * v[1] - u[2] * v[2])
        return minkowski_inner(u, v)

    def base_event(self) -> Event:
        if self.is_flat:
            return Event(self.chart, (0.0, 0.0))
        if self.K < 0.0:
            return Event(self.chart, (0.0, self.R, 0.0))
        return Event(self.chart, (self.R, 0.0, 0.0))

    def base_frame(self) -> tuple[np.ndarray, np.ndarray]:
        """(future timelike, spacelike) orthonormal tangent frame at the base."""
        if self.is_flat:
            return np.array([1.0, 0.0]), np.array([0.0, 1.0])
        if self.K < 0.0:
            return np.array([1.0, 0.0, 0.0]), np.array([0.0, 0.0, 1.0])
        return np.array([0.0, 1.0, 0.0]), np.array([0.0, 0.0, 1.0])

    def _quadric_value(self) -> float:
        # <x,x> on the quadric: -R^2 for K<0, +R^2 for K>0
        return -self.R * self.R if self.K < 0.0 else self.R * self.R

    def in_wedge(self, coords: np.ndarray) -> bool:
        """K>0 wedge membership: base separation parameter below D/2."""
        if self.K <= 0.0:
            return True
        c = self.quadric_inner(self.base_event().vec, coords) / (self.R * self.R)
        return 0.0 < c < _WEDGE_COSH_BOUND

    def validate_event(self, e: Event) -> np.ndarray:
        v = e.vec
        if self.is_flat:
            if v.shape != (2,):
                raise ValueError("flat model events have 2 coordinates")
            return v
        if v.shape != (3,):
            raise ValueError("quadric model events have 3 coordinates")
        q = self.quadric_inner(v, v)
        target = self._quadric_value()
        if abs(q - target) > 1e-12 * max(1.0, abs(target), float(v @ v)):
            raise ValueError(
                f"event is off the quadric: <x,x> = {q!r}, expected {target!r}"
            )
        if self.K > 0.0 and not self.in_wedge(v):
            raise ValueError("event lies outside the declared wedge")
        return v

    def event(self, *coords: float) -> Event:
        e = Event(self.chart, tuple(coords))
        self.validate_event(e)
        return e

    # -- timelike field for K>0 orientation ---------------------------------

    def _killing_field(self, x: np.ndarray) -> np.ndarray:
        return np.array([-x[1], x[0], 0.0])

    def _future_tangent(self, p: np.ndarray, v: np.ndarray) -> bool:
        """Is the tangential vector v at p future-directed?"""
        if self.is_flat:
            return v[0] > 0.0
        if self.K < 0.0:
            return v[0] > 0.0
        return self.quadric_inner(v, self._killing_field(p)) > 0.0

    # -- separations and relations -------------------------------------------

    def time_separation(self, x: Event, y: Event) -> float:
        p = self.validate_event(x)
        q = self.validate_event(y)
        if self.is_flat:
            return hyperbolic_norm(q - p)
        R2 = self.R * self.R
        if self.K < 0.0:
            c = -self.quadric_inner(p, q) / R2
            if c <= 1.0:
                return 0.0
            v = q - c * p  # tangential projection of q at p
            if not self._future_tangent(p, v):
                return 0.0
            return self.R * math.acosh(c)
        g = self.quadric_inner(p, q) / R2
        if not (-1.0 < g < 1.0):
            return 0.0
        v = q - g * p
        if not self._future_tangent(p, v):
            return 0.0
        return self.R * math.acos(g)

    def relation(self, x: Event, y: Event) -> Relation:
        p = self.validate_event(x)
        q = self.validate_event(y)
        if self.is_flat:
            return MinkowskiSpace(1).relation(
                Event("minkowski:1", tuple(p)), Event("minkowski:1", tuple(q))
            )
        if np.array_equal(p, q):
            return Relation.causal(True)
        R2 = self.R * self.R
        if self.K < 0.0:
            c = -self.quadric_inner(p, q) / R2
            if c < 1.0:
                return Relation.unrelated()
            v = q - c * p
            forward = self._future_tangent(p, v)
            if c > 1.0:
                return Relation.chronological(forward)
            return Relation.causal(forward)
        g = self.quadric_inner(p, q) / R2
        if g > 1.0 or g <= -1.0:
            return Relation.unrelated()
        v = q - g * p
        forward = self._future_tangent(p, v)
        if g < 1.0:
            return Relation.chronological(forward)
        return Relation.causal(forward)

    # -- metric on tangent vectors -------------------------------------------

    def metric_inner(self, p: Event, u, v) -> float:
        """g_p(u, v) for tangent vectors at p (ambient-restricted)."""
        if self.is_flat:
            return minkowski_inner(u, v)
        return self.quadric_inner(u, v)

    # -- vectorized kernels (rows of ambient coordinates) ---------------------

    def vec_time_sep(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        A = np.asarray(A, dtype=float)
        B = np.asarray(B, dtype=float)
        if self.is_flat:
            d = B - A
            rad = d[:, 0] ** 2 - d[:, 1] ** 2
            ok = (d[:, 0] >= 0.0) & (rad >= 0.0)
            return np.where(ok, np.sqrt(np.clip(rad, 0.0, None)), 0.0)
        R2 = self.R * self.R
        if self.K < 0.0:
            ip = A[:, 0] * B[:, 0] - A[:, 1] * B[:, 1] - A[:, 2] * B[:, 2]
            c = -ip / R2
            v0 = B[:, 0] - c * A[:, 0]
            ok = (c > 1.0) & (v0 > 0.0)
            return np.where(ok, self.R * np.arccosh(np.clip(c, 1.0, None)), 0.0)
        ip = A[:, 0] * B[:, 0] + A[:, 1] * B[:, 1] - A[:, 2] * B[:, 2]
        g = ip / R2
        v = B - g[:, None] * A
        t_future = -v[:, 0] * A[:, 1] + v[:, 1] * A[:, 0]  # <v, T(A)>
        ok = (np.abs(g) < 1.0) & (t_future > 0.0)
        return np.where(ok, self.R * np.arccos(np.clip(g, -1.0, 1.0)), 0.0)

    def vec_chronological(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        return self.vec_time_sep(A, B) > 0.0

    def vec_causal(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        A = np.asarray(A, dtype=float)
        B = np.asarray(B, dtype=float)
        if self.is_flat:
            d = B - A
            rad = d[:, 0] ** 2 - d[:, 1] ** 2
            return (d[:, 0] >= 0.0) & (rad >= 0.0)
        R2 = self.R * self.R
        if self.K < 0.0:
            ip = A[:, 0] * B[:, 0] - A[:, 1] * B[:, 1] - A[:, 2] * B[:, 2]
            c = -ip / R2
            v0 = B[:, 0] - c * A[:, 0]
            same = np.all(A == B, axis=1)
            return same | ((c >= 1.0) & (v0 > 0.0))
        ip = A[:, 0] * B[:, 0] + A[:, 1] * B[:, 1] - A[:, 2] * B[:, 2]
        g = ip / R2
        v = B - g[:, None] * A
        t_future = -v[:, 0] * A[:, 1] + v[:, 1] * A[:, 0]
        same = np.all(A == B, axis=1)
        return same | ((g <= 1.0) & (g > -1.0) & (t_future > 0.0))


def space_for_chart(chart: str) -> "ModelSpace | MinkowskiSpace":
    """Factory from a chart descriptor: "minkowski:N" or "model:K"."""
    kind, _, arg = chart.partition(":")
    if kind == "minkowski":
        return MinkowskiSpace(int(arg))
    if kind == "model":
        return ModelSpace(float(arg))
    raise ValueError(f"unknown space descriptor {chart!r}")


# --------------------------------------------------------------------------


def f_model(r: float, K: float) -> float:
    """The polar-metric coefficient: g_K = dr^2 - f(r,K)^2 dtheta^2.

    sinh(sqrt(-K) r)/sqrt(-K) for K < 0, r for K = 0,
    sin(sqrt(K) r)/sqrt(K) for K > 0.  Strictly decreasing in K at fixed
    r and continuous through K = 0.
    """
    D = math.pi / math.sqrt(K) if K > 0 else math.inf
    if not (0.0 < r < D):
        raise ValueError(f"radius {r!r} outside (0, {D!r})")
    if K < 0.0:
        s = math.sqrt(-K)
        return math.sinh(s * r) / s
    if K > 0.0:
        s = math.sqrt(K)
        return math.sin(s * r) / s
    return r


def ell_K(space: ModelSpace, p: Event, q: Event) -> float:
    """Time separation in the model space (module-level alias)."""
    return space.time_separation(p, q)


def relation_K(space: ModelSpace, p: Event, q: Event) -> Relation:
    return space.relation(p, q)


# -- exponential / logarithm maps -------------------------------------------


def exp_map(space: ModelSpace, p: Event, v) -> Event:
    """Point at affine parameter 1 along the geodesic through p with velocity v.

    v must be tangent at p (quadric-orthogonal for curved K).  Timelike
    directions use the cosh/sinh (K<0) or cos/sin (K>0) combination;
    spacelike directions the complementary pair; null directions are
    straight lines in the ambient space.  Raises when K > 0 and the
    velocity norm reaches D/2 or the result leaves the wedge.
    """
    pv = space.validate_event(p)
    v = np.asarray(v, dtype=float)
    if space.is_flat:
        if v.shape != (2,):
            raise ValueError("flat tangent vectors have 2 components")
        return Event(space.chart, tuple(pv + v))
    if v.shape != (3,):
        raise ValueError("quadric tangent vectors have 3 components")
    R = space.R
    tang = space.quadric_inner(pv, v)
    vnorm = math.sqrt(float(np.abs(v) @ np.abs(v)))
    if abs(tang) > 1e-9 * max(1.0, R * vnorm):
        raise ValueError("velocity is not tangent to the quadric at p")
    g = space.quadric_inner(v, v)
    if g == 0.0:
        out = pv + v
    else:
        mag = math.sqrt(abs(g))
        if space.K > 0.0 and mag >= space.D / 2.0:
            raise ValueError("wedge overflow: |v| >= D/2 leaves the wedge")
        vhat = v / mag
        s = mag / R
        if space.K < 0.0:
            if g > 0.0:  # timelike: hyperbolic pair
                out = math.cosh(s) * pv + R * math.sinh(s) * vhat
            else:  # spacelike: trigonometric pair
                out = math.cos(s) * pv + R * math.sin(s) * vhat
        else:
            if g > 0.0:  # timelike: trigonometric pair
                out = math.cos(s) * pv + R * math.sin(s) * vhat
            else:  # spacelike: hyperbolic pair
                out = math.cosh(s) * pv + R * math.sinh(s) * vhat
    result = Event(space.chart, tuple(out))
    space.validate_event(result)  # includes the wedge check for K > 0
    return result


def log_map(space: ModelSpace, p: Event, q: Event) -> np.ndarray:
    """Initial velocity of the geodesic from p reaching q at parameter 1."""
    pv = space.validate_event(p)
    qv = space.validate_event(q)
    if space.is_flat:
        return qv - pv
    R = space.R
    R2 = R * R
    if space.K < 0.0:
        c = -space.quadric_inner(pv, qv) / R2
        if c > 1.0:  # timelike
            tau = R * math.acosh(c)
            return (qv - c * pv) * (tau / (R * math.sinh(tau / R)))
        if c == 1.0:  # null or identical
            return qv - pv
        # spacelike: c = cos(sigma/R) in (-1, 1]
        sigma = R * math.acos(max(-1.0, min(1.0, c)))
        if sigma == 0.0:
            return qv - pv
        return (qv - c * pv) * (sigma / (R * math.sin(sigma / R)))
    g = space.quadric_inner(pv, qv) / R2
    if -1.0 < g < 1.0 and not np.array_equal(pv, qv):  # timelike
        tau = R * math.acos(g)
        return (qv - g * pv) * (tau / (R * math.sin(tau / R)))
    if g >= 1.0:  # spacelike (or identical): g = cosh(sigma/R)
        if np.array_equal(pv, qv):
            return np.zeros(3)
        sigma = R * math.acosh(max(1.0, g))
        if sigma == 0.0:
            return qv - pv
        return (qv - g * pv) * (sigma / (R * math.sinh(sigma / R)))
    raise ValueError("log map undefined: pair separation reaches D")


def _dir_vector(space: ModelSpace, theta: float) -> np.ndarray:
    """Unit future timelike tangent at the base with boost angle theta."""
    e0, e1 = space.base_frame()
    return math.cosh(theta) * e0 + math.sinh(theta) * e1


def polar_to_event(space: ModelSpace, r: float, theta: float) -> Event:
    """exp from the base point: radius r >= 0 along boost direction theta."""
    if r < 0.0:
        raise ValueError("polar radius must be >= 0")
    if r == 0.0:
        return space.base_event()
    return exp_map(space, space.base_event(), r * _dir_vector(space, theta))


# -- laws of cosines ---------------------------------------------------------


def law_of_cosines(a: float, b: float, omega: float, position: str, K: float) -> float:
    """Opposite-side separation of a timelike triangle from two sides + angle.

    ``position`` states where the angle sits: "past_vertex" (both legs
    future-directed from the angle's vertex, legs a and b, returns the
    separation between the two endpoints) or "middle_vertex" (the vertex
    is the middle point of a chain; flat case only).  Supported
    combinations: K = 0 with either position; K != 0 with past_vertex.
    Raises :class:`NotTimelikeRelated` when the closure leaves the
    timelike domain.
    """
    if not (a > 0.0 and b > 0.0):
        raise ValueError("leg separations must be positive")
    if omega < 0.0:
        raise ValueError("the vertex angle must be >= 0")
    if position not in ("past_vertex", "middle_vertex"):
        raise ValueError(f"unknown vertex position {position!r}")
    if K == 0.0:
        if position == "middle_vertex":
            return math.sqrt(a * a + b * b + 2.0 * a * b * math.cosh(omega))
        rad = a * a + b * b - 2.0 * a * b * math.cosh(omega)
        if rad < 0.0:
            raise NotTimelikeRelated(
                "hinge endpoints are not timelike related (flat closure)"
            )
        return math.sqrt(rad)
    if position != "past_vertex":
        raise ValueError(
            "curved middle-vertex closures are not part of the public law"
        )
    R = 1.0 / math.sqrt(abs(K))
    if K < 0.0:
        arg = math.cosh(a / R) * math.cosh(b / R) - math.sinh(a / R) * math.sinh(
            b / R
        ) * math.cosh(omega)
        if arg < 1.0:
            raise NotTimelikeRelated(
                "hinge endpoints are not timelike related (K<0 closure)"
            )
        return R * math.acosh(arg)
    D = math.pi / math.sqrt(K)
    if not (a < D and b < D):
        raise ValueError("legs must be shorter than D for K > 0")
    arg = math.cos(a / R) * math.cos(b / R) + math.sin(a / R) * math.sin(
        b / R
    ) * math.cosh(omega)
    if not (-1.0 < arg < 1.0):
        raise NotTimelikeRelated(
            "hinge endpoints are not timelike related (K>0 closure)"
        )
    return R * math.acos(arg)


# -- triangles and hinges -----------------------------------------------------


@dataclass(frozen=True)
class ModelTriangle:
    """Side separations of a timelike triangle p << x << y.

    a = l(p,x), b = l(x,y), c = l(p,y); realizability in the flat plane
    requires the reverse triangle inequality c >= a + b.
    """

    a: float
    b: float
    c: float

    def __post_init__(self) -> None:
        if not (self.a >= 0.0 and self.b >= 0.0 and self.c >= 0.0):
            raise ValueError("side separations must be non-negative")


@dataclass(frozen=True)
class Hinge:
    """Two future-directed legs a = l(p,x), b = l(p,y) and the angle at p."""

    a: float
    b: float
    omega: float

    def __post_init__(self) -> None:
        if not (self.a > 0.0 and self.b > 0.0):
            raise ValueError("hinge legs must be positive")
        if self.omega < 0.0:
            raise ValueError("hinge angle must be >= 0")


def realize_triangle(
    t: ModelTriangle, K: float = 0.0
) -> tuple[Event, Event, Event]:
    """Realize the triangle in the K model space; returns (p, x, y).

    Flat: p = (0,0), y = (c, 0), x = ((c^2+a^2-b^2)/(2c), u) with
    u = sqrt(t^2 - a^2) >= 0.  Curved: p at the base point, y at radius
    c on the time axis, x at radius a with the vertex angle solved from
    the past-vertex law of cosines.  Raises when the sides are not
    realizable (c < a + b flat; angle closure impossible curved).
    """
    a, b, c = t.a, t.b, t.c
    space = ModelSpace(K)
    if K == 0.0:
        if c < a + b - 1e-9 * max(1.0, a + b):
            raise ValueError("triangle not realizable: c < a + b")
        if c == 0.0:
            z = Event(space.chart, (0.0, 0.0))
            return z, z, z
        tx = (c * c + a * a - b * b) / (2.0 * c)
        u = math.sqrt(max(tx * tx - a * a, 0.0))
        return (
            Event(space.chart, (0.0, 0.0)),
            Event(space.chart, (tx, u)),
            Event(space.chart, (c, 0.0)),
        )
    if K > 0.0 and not (c < space.D):
        raise ValueError("triangle not realizable: c >= D for K > 0")
    if a == 0.0 or b == 0.0 or c == 0.0:
        raise ValueError("curved realization requires strictly timelike sides")
    R = space.R
    if K < 0.0:
        num = math.cosh(a / R) * math.cosh(c / R) - math.cosh(b / R)
        den = math.sinh(a / R) * math.sinh(c / R)
    else:
        num = math.cos(b / R) - math.cos(a / R) * math.cos(c / R)
        den = math.sin(a / R) * math.sin(c / R)
    arg = num / den
    if arg < 1.0:
        if arg > 1.0 - 1e-12:
            arg = 1.0
        else:
            raise ValueError("triangle not realizable in this model space")
    omega = math.acosh(arg)
    p = space.base_event()
    x = polar_to_event(space, a, omega)
    y = polar_to_event(space, c, 0.0)
    return p, x, y


def comparison_point(
    side: tuple[Event, Event],
    distance: float,
    space: "ModelSpace | MinkowskiSpace | None" = None,
) -> Event:
    """The point at the given separation from the side's past endpoint.

    Affine interpolation on flat charts; exp/log interpolation on curved
    model spaces.  ``distance`` must lie in [0, side length].
    """
    a, b = side
    if space is None:
        space = space_for_chart(a.chart)
    length = space.time_separation(a, b)
    if not (0.0 <= distance <= length + 1e-12 * max(1.0, length)):
        raise ValueError(f"distance {distance!r} outside [0, {length!r}]")
    if distance == 0.0 or length == 0.0:
        return a
    if isinstance(space, MinkowskiSpace) or space.is_flat:
        frac = distance / length
        return Event(a.chart, tuple(a.vec + frac * (b.vec - a.vec)))
    v = log_map(space, a, b)
    return exp_map(space, a, v * (distance / length))


def realize_hinge(h: Hinge, K: float = 0.0) -> tuple[Event, Event, Event, float]:
    """Realize the hinge in the K model space.

    Places the vertex at the base point, shoots the two legs along unit
    future timelike directions with mutual boost angle omega, and
    returns (p, x, y, l(x, y)) with the opposite-side separation 0 when
    the endpoints are not timelike related.
    """
    space = ModelSpace(K)
    if K > 0.0 and not (h.a < space.D / 2.0 and h.b < space.D / 2.0):
        raise ValueError("hinge legs reach outside the wedge for K > 0")
    p = space.base_event()
    x = polar_to_event(space, h.a, 0.0)
    y = polar_to_event(space, h.b, h.omega)
    return p, x, y, space.time_separation(x, y)


# -- polar-metric geodesic oracle ---------------------------------------------


def _quad_strict(fun: Callable[[float], float], lo: float, hi: float) -> float:
    val, err = quad(fun, lo, hi, limit=400, epsabs=1e-13, epsrel=1e-13)
    if not math.isfinite(val) or err > 1e-9 * max(1.0, abs(val)):
        raise OracleError(
            f"quadrature did not converge (value {val!r}, error bound {err!r})"
        )
    return val


def polar_geodesic_oracle(
    K: float,
    p1: tuple[float, float],
    p2: tuple[float, float],
) -> float:
    """Maximal proper time between polar points, by quadrature + shooting.

    Coordinates are (r, theta) for the metric dr^2 - f(r,K)^2 dtheta^2.
    Along any future timelike geodesic r increases strictly and the
    conserved angular momentum L = f^2 dtheta/dtau reduces the boundary
    problem to one shooting parameter; L is found by bracketing +
    Brent root solving on the accumulated angle, and the proper time is
    a single quadrature.  This route is independent of the quadric
    closed forms and backs every curved-space expected value.

    Raises ValueError when the endpoints are not timelike related and
    :class:`OracleError` when the quadrature or root solve fails to
    converge; the oracle never silently substitutes another method.
    """
    r1, th1 = p1
    r2, th2 = p2
    D = math.pi / math.sqrt(K) if K > 0 else math.inf
    for r in (r1, r2):
        if not (0.0 < r < D):
            raise ValueError(f"radius {r!r} outside (0, D)")
    if r2 <= r1:
        raise ValueError(
            "endpoints not timelike related: r must increase toward the future"
        )
    dth = abs(th2 - th1)
    if dth == 0.0:
        return r2 - r1  # radial segment: proper time is the radius gap

    def f(r: float) -> float:
        return f_model(r, K)

    null_angle = _quad_strict(lambda r: 1.0 / f(r), r1, r2)
    if dth >= null_angle:
        raise ValueError("endpoints not timelike related: beyond the null line")

    def angle_for(L: float) -> float:
        return _quad_strict(
            lambda r: L / (f(r) * math.sqrt(f(r) * f(r) + L * L)), r1, r2
        )

    hi = 1.0
    for _ in range(300):
        if angle_for(hi) >= dth:
            break
        hi *= 2.0
    else:
        raise OracleError("could not bracket the shooting parameter")
    L_star = brentq(
        lambda L: angle_for(L) - dth, 0.0, hi, xtol=1e-15, rtol=8.9e-16, maxiter=200
    )
    return _quad_strict(
        lambda r: f(r) / math.sqrt(f(r) * f(r) + L_star * L_star), r1, r2
    )


# -- radial comparison map ----------------------------------------------------


def radial_map(
    point: tuple[float, float], K: float, K_prime: float
) -> tuple[float, float]:
    """Identity on polar coordinates between the K and K' models.

    The interesting content is the pullback inequality exposed by
    :func:`radial_pullback_margin`.
    """
    r, theta = point
    D = min(
        math.pi / math.sqrt(K) if K > 0 else math.inf,
        math.pi / math.sqrt(K_prime) if K_prime > 0 else math.inf,
    )
    if not (0.0 < r < D):
        raise ValueError(f"radius {r!r} outside the common domain (0, {D!r})")
    return (r, theta)


def radial_norm_sq(v: tuple[float, float], r: float, K: float) -> float:
    """g_K(v, v) = v1^2 - f(r,K)^2 v2^2 for a tangent vector at radius r."""
    f = f_model(r, K)
    return v[0] * v[0] - f * f * v[1] * v[1]


def radial_pullback_margin(
    v: tuple[float, float], r: float, K: float, K_prime: float
) -> float:
    """g_{K'}(v,v) - g_K(v,v) under the identity polar map, for K <= K'.

    Because f(r, K) is strictly decreasing in K and the angular term
    enters with a minus sign, this margin is >= 0 whenever K <= K', with
    equality iff the angular component v2 vanishes: tangent norms never
    decrease when mapping toward larger curvature parameter, which is
    the monotonicity that makes hinge separations increase with K.
    """
    if K > K_prime:
        raise ValueError("expected K <= K_prime")
    radial_map((r, 0.0), K, K_prime)  # domain check
    return radial_norm_sq(v, r, K_prime) - radial_norm_sq(v, r, K)


# -- charts and samplers -------------------------------------------------------


def gudermann(x: float) -> float:
    return 2.0 * math.atan(math.tanh(x / 2.0))


def gudermann_inv(y: float) -> float:
    if not (-math.pi / 2.0 < y < math.pi / 2.0):
        raise ValueError("gudermannian inverse domain is (-pi/2, pi/2)")
    return 2.0 * math.atanh(math.tan(y / 2.0))


def chart_event(space: ModelSpace, t: float, x: float) -> Event:
    """Event from intrinsic chart coordinates (time-like t, space-like x).

    K = 0: (t, x) itself.  K < 0: the global chart
    R (sinh t, cosh t cos x, cosh t sin x).  K > 0: the wedge chart
    R (cos t cosh x, sin t cosh x, sinh x) with |t| < pi/2.
    """
    if space.is_flat:
        return Event(space.chart, (t, x))
    R = space.R
    if space.K < 0.0:
        return Event(
            space.chart,
            (R * math.sinh(t), R * math.cosh(t) * math.cos(x), R * math.cosh(t) * math.sin(x)),
        )
    return Event(
        space.chart,
        (R * math.cos(t) * math.cosh(x), R * math.sin(t) * math.cosh(x), R * math.sinh(x)),
    )


def event_chart_coords(space: ModelSpace, e: Event) -> tuple[float, float]:
    v = space.validate_event(e)
    if space.is_flat:
        return (float(v[0]), float(v[1]))
    R = space.R
    if space.K < 0.0:
        return (math.asinh(v[0] / R), math.atan2(v[2], v[1]))
    return (math.atan2(v[1], v[0]), math.asinh(v[2] / R))


def _chart_rows_to_ambient(space: ModelSpace, rows: np.ndarray) -> np.ndarray:
    t = rows[:, 0]
    x = rows[:, 1]
    if space.is_flat:
        return rows.copy()
    R = space.R
    if space.K < 0.0:
        return np.stack(
            [R * np.sinh(t), R * np.cosh(t) * np.cos(x), R * np.cosh(t) * np.sin(x)],
            axis=1,
        )
    return np.stack(
        [R * np.cos(t) * np.cosh(x), R * np.sin(t) * np.cosh(x), R * np.sinh(x)],
        axis=1,
    )


def diamond_chart_box(
    space: ModelSpace, corner_a: tuple[float, float], corner_b: tuple[float, float]
) -> tuple[float, float, float, float]:
    """A chart box (t_lo, t_hi, x_lo, x_hi) enclosing the diamond I(a, b).

    Every chart in use has |d(chart spatial)/d(chart time)| <= 1 along
    causal curves after a gudermannian reparametrization, so the spatial
    spread is bounded by the time span (K <= 0) or its gudermannian
    image (K > 0).  Raises when the diamond is not bounded inside the
    wedge chart.
    """
    ta, xa = corner_a
    tb, xb = corner_b
    if not (tb > ta):
        raise ValueError("empty region: the second corner must lie to the future")
    if space.K > 0.0:
        ga = gudermann(xa)
        lo, hi = ga - (tb - ta), ga + (tb - ta)
        if lo <= -math.pi / 2.0 or hi >= math.pi / 2.0:
            raise ValueError("region is not bounded inside the wedge chart")
        return (ta, tb, gudermann_inv(lo), gudermann_inv(hi))
    spread = tb - ta
    return (ta, tb, xa - spread, xa + spread)


def sample_diamond_rows(
    space: ModelSpace,
    corner_a: tuple[float, float],
    corner_b: tuple[float, float],
    rng: np.random.Generator,
    count: int,
    max_batches: int = 4000,
) -> np.ndarray:
    """Uniform (volume-measure) samples of the chart diamond I(a, b).

    Rejection sampling inside :func:`diamond_chart_box` with the chart
    volume density (cosh of the appropriate coordinate) and strict
    chronological membership.  Returns ambient coordinate rows.
    """
    a_ev = chart_event(space, *corner_a)
    b_ev = chart_event(space, *corner_b)
    rel = space.relation(a_ev, b_ev)
    if not (rel.is_chronological and rel.forward):
        raise ValueError("empty region: corners are not chronologically related")
    t_lo, t_hi, x_lo, x_hi = diamond_chart_box(space, corner_a, corner_b)
    out = np.empty((count, space.dim), dtype=float)
    have = 0
    batch = max(1024, min(65536, 4 * count))
    if space.is_flat:
        w_max = 1.0
    elif space.K < 0.0:
        w_max = math.cosh(max(abs(t_lo), abs(t_hi)))
    else:
        w_max = math.cosh(max(abs(x_lo), abs(x_hi)))
    for _ in range(max_batches):
        if have >= count:
            break
        u = rng.random((batch, 3))
        t = t_lo + u[:, 0] * (t_hi - t_lo)
        x = x_lo + u[:, 1] * (x_hi - x_lo)
        if space.is_flat:
            keep = np.ones(batch, dtype=bool)
        elif space.K < 0.0:
            keep = u[:, 2] * w_max <= np.cosh(t)
        else:
            keep = u[:, 2] * w_max <= np.cosh(x)
        rows = np.stack([t[keep], x[keep]], axis=1)
        amb = _chart_rows_to_ambient(space, rows)
        A = np.broadcast_to(a_ev.vec, amb.shape)
        B = np.broadcast_to(b_ev.vec, amb.shape)
        inside = space.vec_chronological(A, amb) & space.vec_chronological(amb, B)
        good = amb[inside]
        take = min(count - have, good.shape[0])
        out[have : have + take] = good[:take]
        have += take
    if have < count:
        raise SamplingError(
            f"rejection budget exceeded: drew {have}/{count} diamond samples"
        )
    return out


def sample_region_rows(
    space: "ModelSpace | MinkowskiSpace",
    corner_a: Sequence[float],
    corner_b: Sequence[float],
    rng: np.random.Generator,
    count: int,
) -> np.ndarray:
    """Uniform samples of a diamond region on any backend, as coordinate rows.

    Corners are full coordinates for flat spaces and intrinsic chart
    coordinates (t, x) for model spaces; rows come back in the space's
    working coordinates (ambient for curved models).
    """
    from .minkowski import sample_flat_diamond_rows

    if isinstance(space, MinkowskiSpace):
        return sample_flat_diamond_rows(space, corner_a, corner_b, rng, count)
    ca = (float(corner_a[0]), float(corner_a[1]))
    cb = (float(corner_b[0]), float(corner_b[1]))
    return sample_diamond_rows(space, ca, cb, rng, count)


def rows_to_events(space: "ModelSpace | MinkowskiSpace", rows: np.ndarray) -> list[Event]:
    return [Event(space.chart, tuple(row)) for row in np.asarray(rows, dtype=float)]


def time_order_key(space: "ModelSpace | MinkowskiSpace", rows: np.ndarray) -> np.ndarray:
    """A per-row key that increases along every future causal curve.

    The raw time coordinate works for flat rows and for the K<0 quadric
    (x0 = R sinh t); the K>0 wedge needs the chart time angle
    atan2(x1, x0), which is monotone because x0 > 0 throughout the wedge.
    """
    rows = np.asarray(rows, dtype=float)
    if isinstance(space, MinkowskiSpace) or space.is_flat or space.K < 0.0:
        return rows[:, 0]
    return np.arctan2(rows[:, 1], rows[:, 0])


# -- point-set JSON ------------------------------------------------------------


def points_to_json(space: ModelSpace, points: Sequence[Event]) -> dict:
    return {
        "chart": "model",
        "K": space.K,
        "points": [list(p.coords) for p in points],
    }


def points_from_json(doc: dict) -> tuple[ModelSpace, list[Event]]:
    if doc.get("chart") != "model":
        raise ValueError("not a model-space point-set document")
    space = ModelSpace(float(doc["K"]))
    points = [space.event(*map(float, row)) for row in doc["points"]]
    return space, points
