"""Timelike-curvature diagnostics.

Four mechanisms, all reducing curvature statements to separation
comparisons that the exact backends can evaluate:

- a sectional-curvature estimator that Taylor-fits the defect between
  squared separations and their flat tangent-space values on a small
  two-parameter grid of exponential points;
- triangle comparison: realize a triangle's side data in the constant-
  curvature model K and compare separations of matched side points;
- the four-point condition: realize two sub-triangles of a quadruple in
  a model plane with prescribed sidedness and compare the remaining
  separations;
- hinge comparison: two legs with a fixed boost angle, closed in two
  different model curvatures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Event, OrderError, Separations6
from .minkowski import MinkowskiSpace, minkowski_inner
from .modelspaces import (
    Hinge,
    ModelSpace,
    ModelTriangle,
    comparison_point,
    exp_map,
    law_of_cosines,
    polar_to_event,
    realize_triangle,
)

__all__ = [
    "SectionalEstimate",
    "FourPointVerdict",
    "default_estimator_grid",
    "estimate_sectional",
    "triangle_comparison_min_margin",
    "four_point_check",
    "flatness_check",
    "hinge_comparison_check",
]


# --------------------------------------------------------------------------
# Sectional estimator.


@dataclass(frozen=True)
class SectionalEstimate:
    """Result of the two-parameter separation-defect fit.

    ``c_hat`` estimates the curvature-tensor contraction over the plane
    spanned by the probe vectors; ``denom`` is the plane's Gram
    determinant g(v,v)g(w,w) - g(v,w)^2 (negative for a timelike
    plane); ``K_hat = c_hat / denom``; ``residual`` is the rms misfit
    of the one-coefficient model.
    """

    c_hat: float
    denom: float
    K_hat: float
    residual: float


def default_estimator_grid(
    t_max: float = 0.1, size: int = 16, ratio: float = 0.5
) -> tuple[tuple[float, float], ...]:
    """Log-spaced (s, t) pairs with s = ratio * t, t geometric up to t_max."""
    ts = np.geomspace(t_max / 8.0, t_max, size)
    return tuple((float(ratio * t), float(t)) for t in ts)


def estimate_sectional(
    space,
    p: Event,
    v,
    w,
    grid: Sequence[tuple[float, float]] | None = None,
) -> SectionalEstimate:
    """Estimate the sectional curvature of the plane span(v, w) at p.

    v and w must be future timelike tangent vectors at p whose
    difference v - w is also future timelike, so that exp_p(t v) and
    exp_p(s w) are chronologically related for all grid pairs s < t.
    For each grid pair the defect

        F = l(exp_p(s w), exp_p(t v))^2 - g_p(tv - sw, tv - sw)

    grows like m * s^2 t^2; the single coefficient m is fitted by least
    squares and converted to the curvature estimate via c_hat = -3 m and
    K_hat = c_hat / (g(v,v) g(w,w) - g(v,w)^2).
    """
    if grid is None:
        grid = default_estimator_grid()
    grid = [(float(s), float(t)) for (s, t) in grid]
    if len(grid) < 2:
        raise ValueError("estimator grid needs at least two (s, t) pairs")
    for s, t in grid:
        if not (0.0 < s < t):
            raise ValueError("estimator grid requires 0 < s < t for every pair")

    flat = isinstance(space, MinkowskiSpace) or space.is_flat
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)

    if flat:
        def g(u1, u2):
            return minkowski_inner(u1, u2)

        def future(u):
            return u[0] > 0.0

        def exp_at(u):
            return Event(p.chart, tuple(p.vec + u))
    else:
        def g(u1, u2):
            return space.quadric_inner(u1, u2)

        def future(u):
            return space._future_tangent(p.vec, u)

        def exp_at(u):
            return exp_map(space, p, u)

    for name, u in (("v", v), ("w", w), ("v - w", v - w)):
        if not (g(u, u) > 0.0 and future(u)):
            raise ValueError(f"{name} must be future timelike")

    gram = np.array([[g(v, v), g(v, w)], [g(v, w), g(w, w)]])
    denom = float(np.linalg.det(gram))
    if not denom < 0.0:
        raise ValueError("v and w do not span a timelike plane (Gram det >= 0)")

    F = np.empty(len(grid))
    G = np.empty(len(grid))
    for i, (s, t) in enumerate(grid):
        a = exp_at(t * v)
        b = exp_at(s * w)
        ell = space.time_separation(b, a)
        if ell <= 0.0:
            raise ValueError(
                f"grid pair (s={s}, t={t}) left the chronological domain"
            )
        d = t * v - s * w
        F[i] = ell * ell - g(d, d)
        G[i] = (s * t) ** 2
    m_hat = float(F @ G / (G @ G))
    residual = float(np.sqrt(np.mean((F - m_hat * G) ** 2)))
    c_hat = -3.0 * m_hat
    return SectionalEstimate(
        c_hat=c_hat, denom=denom, K_hat=c_hat / denom, residual=residual
    )


# --------------------------------------------------------------------------
# Triangle comparison.


def _symmetric_sep(space, a: Event, b: Event) -> float:
    return max(space.time_separation(a, b), space.time_separation(b, a))


def _triangle_sides(space, vertices: Sequence[Event]) -> tuple[float, float, float]:
    p, x, y = vertices
    for a, b, label in ((p, x, "p << x"), (x, y, "x << y")):
        rel = space.relation(a, b)
        if not (rel.is_chronological and rel.forward):
            raise OrderError(f"triangle vertices are not a chronological chain ({label})")
    return (
        space.time_separation(p, x),
        space.time_separation(x, y),
        space.time_separation(p, y),
    )


def _interior_fractions(samples: int) -> list[float]:
    if samples < 1:
        raise ValueError("need at least one side sample")
    return [(k + 1) / (samples + 1) for k in range(samples)]


# Matched pairs whose separation is below this fraction of the longest
# side on BOTH routes are skipped: at the light cone both separations
# vanish identically, so such pairs carry no comparison information, and
# the square-root cancellation there inflates rounding noise to ~1e-8.
_PAIR_SEP_FLOOR = 1e-6


def _side_pair_margins(space, vertices: Sequence[Event], K: float, samples: int):
    """Yield l_space(q1, q2) - l_model(q1bar, q2bar) over matched side pairs."""
    a, b, c = _triangle_sides(space, vertices)
    ref_space = ModelSpace(K)
    p_bar, x_bar, y_bar = realize_triangle(ModelTriangle(a, b, c), K)
    p, x, y = vertices
    sides = [(p, x, a), (x, y, b), (p, y, c)]
    sides_bar = [(p_bar, x_bar, a), (x_bar, y_bar, b), (p_bar, y_bar, c)]
    fracs = _interior_fractions(samples)
    points = [
        [comparison_point((s0, s1), f * length, space) for f in fracs]
        for (s0, s1, length) in sides
    ]
    points_bar = [
        [comparison_point((s0, s1), f * length, ref_space) for f in fracs]
        for (s0, s1, length) in sides_bar
    ]
    floor = _PAIR_SEP_FLOOR * max(a, b, c)
    produced = False
    for i in range(3):
        for j in range(i + 1, 3):
            for qi, qbi in zip(points[i], points_bar[i]):
                for qj, qbj in zip(points[j], points_bar[j]):
                    sep = _symmetric_sep(space, qi, qj)
                    sep_bar = _symmetric_sep(ref_space, qbi, qbj)
                    if max(sep, sep_bar) < floor:
                        continue
                    produced = True
                    yield sep - sep_bar
    if not produced:
        raise OrderError(
            "no informative side pairs: every sampled pair is within the "
            "light-cone separation floor on both routes"
        )


def triangle_comparison_min_margin(
    space, vertices: Sequence[Event], K: float, samples: int
) -> float:
    """min over sampled side-point pairs of l(q1,q2) - l(q1bar,q2bar).

    The triangle (p << x << y) is realized with the same side
    separations in the curvature-K model plane; matched points sit at
    equal arc-length fractions on corresponding sides (pairs are drawn
    from two different sides).  Pairs that are at or inside the light
    cone on both routes are skipped — both separations vanish there, so
    they carry no comparison information.  A non-negative minimum
    certifies the sampled instance of the curvature bound "at most K";
    a negative value exhibits a violating pair.  Raises when the side
    data is not realizable in the K model.
    """
    return min(_side_pair_margins(space, vertices, K, samples))


def flatness_check(space, vertices: Sequence[Event], samples: int) -> float:
    """max |l(q1,q2) - l(q1bar,q2bar)| against the flat comparison triangle.

    Near-zero output certifies that the triangle's matched side points
    reproduce flat separations exactly (the equality case of the
    comparison); flat backends return rounding noise only.  Matched
    pairs at or inside the light cone on both routes are skipped, as in
    triangle_comparison_min_margin.
    """
    return max(abs(m) for m in _side_pair_margins(space, vertices, 0.0, samples))


# --------------------------------------------------------------------------
# Four-point condition.


@dataclass(frozen=True)
class FourPointVerdict:
    """Margins of the two sidedness realizations of a causal quadruple.

    ``opposite_side_margin`` = l(x2,x3) - l(x2hat,x3hat) with the two
    middle points realized on opposite sides of the outer segment;
    ``same_side_margin`` = l(x1hat,x4hat) - l(x1,x4) with the outer
    points realized on the same side of the middle segment.  The
    quadruple passes the comparison test iff both are >= 0.
    """

    opposite_side_margin: float
    same_side_margin: float

    def passes(self, tol: float = 0.0) -> bool:
        return (
            self.opposite_side_margin >= -tol and self.same_side_margin >= -tol
        )


def _flat_apex(l_base: float, l_from: float, l_to: float, scale2: float) -> tuple[float, float]:
    """Place an apex against the segment (0,0)-(l_base,0) in the model plane.

    Returns (t, u >= 0) with l((0,0),(t,u)) = l_from and
    l((t,u),(l_base,0)) = l_to when the apex is below the segment's
    future endpoint; the caller chooses the side sign for u.
    """
    t = (l_base * l_base + l_from * l_from - l_to * l_to) / (2.0 * l_base)
    rad = t * t - l_from * l_from
    if rad < -1e-9 * scale2:
        raise ValueError("four-point sub-triangle is not realizable in the flat plane")
    return t, math.sqrt(max(rad, 0.0))


def _flat_sep(dt: float, du: float) -> float:
    rad = dt * dt - du * du
    if dt > 0.0 and rad > 0.0:
        return math.sqrt(rad)
    return 0.0


def _four_point_flat(s: Separations6) -> FourPointVerdict:
    if s.l14 <= 0.0 or s.l23 <= 0.0:
        raise ValueError(
            "four-point comparison needs l14 > 0 and l23 > 0 (outer pair and "
            "middle pair chronologically related)"
        )
    scale2 = max(1.0, max(s.as_tuple()) ** 2)
    # opposite sides: diagonal x1 -> x4 on the axis, x2 above, x3 below
    t2, u2 = _flat_apex(s.l14, s.l12, s.l24, scale2)
    t3, u3 = _flat_apex(s.l14, s.l13, s.l34, scale2)
    l23_hat = _flat_sep(t3 - t2, u2 + u3)
    # same side: middle segment x2 -> x3 on the axis, x1 below it, x4 above,
    # both with u >= 0 (t1 <= 0 by the reverse triangle inequality)
    t1, u1 = _flat_apex(s.l23, s.l12, s.l13, scale2)
    t4, u4 = _flat_apex(s.l23, s.l24, s.l34, scale2)
    l14_hat = _flat_sep(t4 - t1, u4 - u1)
    return FourPointVerdict(
        opposite_side_margin=s.l23 - l23_hat,
        same_side_margin=l14_hat - s.l14,
    )


def _quadric_form(space: ModelSpace) -> np.ndarray:
    return (
        np.diag([1.0, -1.0, -1.0]) if space.K < 0.0 else np.diag([1.0, 1.0, -1.0])
    )


def _sep_inner_target(space: ModelSpace, ell: float) -> float:
    R = space.R
    if space.K < 0.0:
        return -R * R * math.cosh(ell / R)
    return R * R * math.cos(ell / R)


def _solve_two_radius_point(
    space: ModelSpace, A: Event, B: Event, lA: float, lB: float, side: float
) -> Event:
    """The quadric point with prescribed separations to A and B and side sign.

    Solves the two linear inner-product constraints in the span of
    (A, B, n) where n is the quadric-orthogonal normal of the A-B plane;
    the side sign picks one of the two mirror solutions (sign of the
    determinant det[A, B, X]).  Raises when no real solution exists.
    """
    if lA == 0.0:
        return A
    if lB == 0.0:
        return B
    Av = A.vec
    Bv = B.vec
    G = _quadric_form(space)
    n = G @ np.cross(Av, Bv)
    nn = space.quadric_inner(n, n)
    if not nn < 0.0:
        raise ValueError("base pair is degenerate (no spacelike normal)")
    n_hat = n / math.sqrt(-nn)
    cA = _sep_inner_target(space, lA)
    cB = _sep_inner_target(space, lB)
    M = np.array(
        [
            [space.quadric_inner(Av, Av), space.quadric_inner(Av, Bv)],
            [space.quadric_inner(Av, Bv), space.quadric_inner(Bv, Bv)],
        ]
    )
    alpha, beta = np.linalg.solve(M, np.array([cA, cB]))
    Q = space._quadric_value()
    gamma2 = float(alpha * cA + beta * cB - Q)
    if gamma2 < 0.0:
        if gamma2 < -1e-9 * space.R * space.R:
            raise ValueError("four-point sub-triangle is not realizable in this model")
        gamma2 = 0.0
    X = alpha * Av + beta * Bv + side * math.sqrt(gamma2) * n_hat
    e = Event(space.chart, tuple(X))
    space.validate_event(e)
    return e


def _check_sep(space: ModelSpace, a: Event, b: Event, expected: float) -> None:
    got = space.time_separation(a, b)
    if abs(got - expected) > 1e-8 * max(1.0, expected):
        raise ValueError(
            "four-point realization failed to reproduce a prescribed separation "
            f"(expected {expected!r}, got {got!r})"
        )


def _four_point_curved(s: Separations6, K: float) -> FourPointVerdict:
    space = ModelSpace(K)
    if K > 0.0 and not max(s.as_tuple()) < space.D:
        raise ValueError("separations reach the model diameter; not realizable")
    # opposite sides: diagonal x1 -> x4 on the base geodesic
    if s.l14 <= 0.0:
        raise ValueError("the outer pair must be chronologically related")
    x1 = space.base_event()
    x4 = polar_to_event(space, s.l14, 0.0)
    x2 = _solve_two_radius_point(space, x1, x4, s.l12, s.l24, +1.0)
    x3 = _solve_two_radius_point(space, x1, x4, s.l13, s.l34, -1.0)
    if s.l12 > 0.0:
        _check_sep(space, x1, x2, s.l12)
    if s.l24 > 0.0:
        _check_sep(space, x2, x4, s.l24)
    if s.l13 > 0.0:
        _check_sep(space, x1, x3, s.l13)
    if s.l34 > 0.0:
        _check_sep(space, x3, x4, s.l34)
    l23_hat = space.time_separation(x2, x3)

    # same side: middle segment x2 -> x3 on the base geodesic
    if s.l23 <= 0.0:
        raise ValueError("the middle pair must be chronologically related")
    y2 = space.base_event()
    y3 = polar_to_event(space, s.l23, 0.0)
    y1 = _solve_two_radius_point(space, y2, y3, s.l12, s.l13, +1.0)
    y4 = _solve_two_radius_point(space, y2, y3, s.l24, s.l34, +1.0)
    _check_sep(space, y1, y2, s.l12)
    _check_sep(space, y1, y3, s.l13)
    _check_sep(space, y2, y4, s.l24)
    _check_sep(space, y3, y4, s.l34)
    l14_hat = space.time_separation(y1, y4)
    return FourPointVerdict(
        opposite_side_margin=s.l23 - l23_hat,
        same_side_margin=l14_hat - s.l14,
    )


def four_point_check(s: Separations6, K: float = 0.0) -> FourPointVerdict:
    """Evaluate both sidedness comparisons of a quadruple against model K.

    The six separations must come from a causal chain x1 <= x2 << x3 <=
    x4 (so the outer and middle pairs are realizable sub-triangles).
    Opposite-side realization: the diagonal [x1, x4] is placed on a
    model geodesic with x2 and x3 on opposite sides; its margin is
    l(x2,x3) - l(x2hat,x3hat).  Same-side realization: the middle
    segment [x2, x3] is placed on the geodesic with x1 and x4 on the
    same side; its margin is l(x1hat,x4hat) - l(x1,x4).  Degenerate
    quadruples with repeated points are handled as limits.  Raises when
    a sub-triangle is not realizable.
    """
    if K == 0.0:
        return _four_point_flat(s)
    return _four_point_curved(s, K)


# --------------------------------------------------------------------------
# Hinge comparison.


def _space_curvature(space) -> float:
    if isinstance(space, MinkowskiSpace):
        return 0.0
    if isinstance(space, ModelSpace):
        return space.K
    raise ValueError("hinge comparison needs a flat or model-space backend")


def hinge_comparison_check(space, hinge: Hinge, K_reference: float) -> float:
    """l_space(x, y) - l_ref(xbar, ybar) for one hinge closed in two models.

    The hinge (two future timelike legs with boost angle omega at the
    common past vertex) is closed both in the backend's own curvature
    and in the reference model via the past-vertex law of cosines, which
    stays valid for legs up to the full conjugate distance (a realized
    point cloud is not needed for the value and would restrict K > 0
    legs to half that range).  The margin is positive exactly when the
    backend's curvature parameter exceeds the reference (legs spread
    less), negative when it is smaller, zero for omega = 0.  Raises when
    the hinge fails to close timelike in either model.
    """
    K_space = _space_curvature(space)
    ell_space = law_of_cosines(hinge.a, hinge.b, hinge.omega, "past_vertex", K_space)
    ell_ref = law_of_cosines(hinge.a, hinge.b, hinge.omega, "past_vertex", K_reference)
    return ell_space - ell_ref
