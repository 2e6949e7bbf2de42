"""Hyperbolic inversion and the order-reversed inverted space.

The inversion through a center x with radius r moves every point p in
the chronological future of x along the radial geodesic from x to the
unique point q with l(x,p) * l(x,q) = r^2.  The induced two-point
function i_p(a, b) = l(b, a) / (l(p,a) * l(p,b)) turns I+(p) into a
Lorentzian pre-length space with all relations reversed, and the
reverse triangle inequality in that inverted space is, after clearing
denominators, exactly the Ptolemy slack of the base quadruple - the
duality this package exists to exercise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Event, Relation, Separations6, ptolemy_slack
from .minkowski import MinkowskiSpace, sample_flat_diamond_rows
from .modelspaces import (
    ModelSpace,
    event_chart_coords,
    exp_map,
    log_map,
    sample_diamond_rows,
)

__all__ = [
    "InversionSpec",
    "InvertedSpace",
    "InversionExchangeReport",
    "DualityComparison",
    "invert_point",
    "inversion_time_sep",
    "inverted_space",
    "inversion_exchange_check",
    "flat_identity_gap",
    "duality_comparison",
]


@dataclass(frozen=True)
class InversionSpec:
    """Center and radius of a hyperbolic inversion."""

    center: Event
    radius: float

    def __post_init__(self) -> None:
        if not (self.radius > 0.0):
            raise ValueError(f"inversion radius must be > 0, got {self.radius!r}")


def invert_point(space, spec: InversionSpec, p: Event) -> Event:
    """The inversion image of p: radial rescale to separation r^2 / l(x, p).

    Flat closed form x + (r^2 / |p - x|^2)(p - x); on curved backends the
    point moves along the unit-speed radial geodesic via log/exp.  Raises
    when p is not in the chronological future of the center, or when the
    rescaled radius leaves a K > 0 wedge.
    """
    x = spec.center
    tau = space.time_separation(x, p)
    if tau <= 0.0:
        raise ValueError("inversion is defined only on I+(center)")
    if isinstance(space, MinkowskiSpace) or space.is_flat:
        d = p.vec - x.vec
        return Event(p.chart, tuple(x.vec + (spec.radius**2 / (tau * tau)) * d))
    v = log_map(space, x, p)  # timelike, |v| = tau
    return exp_map(space, x, v * (spec.radius**2 / (tau * tau)))


def inversion_time_sep(space, p: Event, x: Event, y: Event) -> float:
    """i_p(x, y) = l(y, x) / (l(p, x) * l(p, y)).

    Positive exactly when y precedes x chronologically (the reversed
    order); 0 for pairs unrelated in that order.  Raises when x or y is
    not in the chronological future of p.
    """
    lpx = space.time_separation(p, x)
    lpy = space.time_separation(p, y)
    if lpx <= 0.0 or lpy <= 0.0:
        raise ValueError("inversion time separation requires x, y in I+(p)")
    return space.time_separation(y, x) / (lpx * lpy)


@dataclass(frozen=True)
class InvertedSpace:
    """I+(p) of the base space with reversed relations and separation i_p."""

    base: object
    p: Event

    @property
    def chart(self) -> str:
        return f"inverted:{self.base.chart}"

    def _check_domain(self, e: Event) -> None:
        if self.base.time_separation(self.p, e) <= 0.0:
            raise ValueError("event outside the inverted space's domain I+(p)")

    def time_separation(self, x: Event, y: Event) -> float:
        return inversion_time_sep(self.base, self.p, x, y)

    def relation(self, x: Event, y: Event) -> Relation:
        self._check_domain(x)
        self._check_domain(y)
        r = self.base.relation(x, y)
        if not r.is_causal:
            return r
        if x.coords == y.coords and x.chart == y.chart:
            return r  # reflexive pairs stay reflexive
        return Relation(r.kind, not r.forward)


def inverted_space(space, p: Event) -> InvertedSpace:
    return InvertedSpace(space, p)


# --------------------------------------------------------------------------
# Set-exchange membership checks.


@dataclass(frozen=True)
class InversionExchangeReport:
    """Sampled membership results for the inversion's set exchange.

    ``forward_violations`` counts samples of the diamond I(x, z) whose
    image leaves I+(z) (flat backends only; None when not checked);
    ``backward_violations`` counts samples of I+(z) whose image leaves
    I(x, z).  Both must be 0 on conforming backends.
    """

    radius: float
    samples: int
    forward_checked: bool
    forward_violations: int | None
    backward_violations: int


def _future_box_rows(space, z: Event, span: float, rng, count: int) -> np.ndarray:
    """Sample rows from a bounded sub-diamond of I+(z)."""
    if isinstance(space, MinkowskiSpace):
        top = z.vec.copy()
        top[0] += span
        return sample_flat_diamond_rows(space, z.vec, top, rng, count)
    t, x = event_chart_coords(space, z)
    return sample_diamond_rows(space, (t, x), (t + span, x), rng, count)


def _diamond_rows(space, x: Event, z: Event, rng, count: int) -> np.ndarray:
    if isinstance(space, MinkowskiSpace):
        return sample_flat_diamond_rows(space, x.vec, z.vec, rng, count)
    return sample_diamond_rows(
        space, event_chart_coords(space, x), event_chart_coords(space, z), rng, count
    )


def inversion_exchange_check(
    space, x: Event, z: Event, samples: int, seed: int = 0
) -> InversionExchangeReport:
    """Check the inversion's set exchange around the pair x << z by sampling.

    With radius r = l(x, z) (so z is the inversion's fixed point):

    - on flat backends, points of the diamond I(x, z) must map into
      I+(z) and points of I+(z) must map into I(x, z) (both directions
      are exact set identities there);
    - on curved non-positively-curved backends (K < 0) only the
      containment of the image of I+(z) in I(x, z) is asserted.

    K > 0 backends are rejected: the exchange is not guaranteed there.
    Returns the sampled violation counts (0 expected).
    """
    is_flat = isinstance(space, MinkowskiSpace) or (
        isinstance(space, ModelSpace) and space.is_flat
    )
    if isinstance(space, ModelSpace) and space.K > 0.0:
        raise ValueError(
            "the set-exchange check requires a flat or K < 0 backend"
        )
    r = space.time_separation(x, z)
    if r <= 0.0:
        raise ValueError("z must lie in the chronological future of x")
    spec = InversionSpec(center=x, radius=r)
    rng = np.random.default_rng(np.random.PCG64(seed))

    span = 3.0 * r if is_flat else 1.0
    future_rows = _future_box_rows(space, z, span, rng, samples)
    backward_violations = 0
    for row in future_rows:
        q = Event(space.chart, tuple(row))
        h = invert_point(space, spec, q)
        inside = (
            space.time_separation(x, h) > 0.0 and space.time_separation(h, z) > 0.0
        )
        if not inside:
            backward_violations += 1

    forward_checked = is_flat
    forward_violations: int | None = None
    if forward_checked:
        forward_violations = 0
        for row in _diamond_rows(space, x, z, rng, samples):
            p = Event(space.chart, tuple(row))
            h = invert_point(space, spec, p)
            if not space.time_separation(z, h) > 0.0:
                forward_violations += 1

    return InversionExchangeReport(
        radius=r,
        samples=samples,
        forward_checked=forward_checked,
        forward_violations=forward_violations,
        backward_violations=backward_violations,
    )


def flat_identity_gap(space, p: Event, r: float, a: Event, b: Event) -> float:
    """|i_p(a, b) - l(H(a), H(b))| for a flat backend, b << a in I+(p).

    The inversion through p with radius r reverses chronology on I+(p),
    and on flat backends the inverted separation is exactly the
    inversion time separation scaled by r^2; with r = 1 they agree
    outright.  The returned gap should vanish to rounding.
    """
    if not (isinstance(space, MinkowskiSpace) or space.is_flat):
        raise ValueError("the exact identity holds on flat backends only")
    spec = InversionSpec(center=p, radius=r)
    lhs = inversion_time_sep(space, p, a, b) * (r * r)
    rhs = space.time_separation(invert_point(space, spec, a), invert_point(space, spec, b))
    return abs(lhs - rhs)


# --------------------------------------------------------------------------
# Reverse-triangle / Ptolemy duality.


@dataclass(frozen=True)
class DualityComparison:
    """Both sides of the inverted-deficit = scaled-slack identity.

    For a base chain p << x << y << z: the reverse-triangle deficit of
    the chain (z, y, x) in the inverted space at p, the Ptolemy slack of
    the base quadruple (p, x, y, z), and the positive product
    l(p,x) l(p,y) l(p,z) relating them: deficit * product = slack
    exactly (as real numbers; to rounding in floats).
    """

    inverted_deficit: float
    base_slack: float
    product: float

    @property
    def identity_gap(self) -> float:
        return abs(self.inverted_deficit * self.product - self.base_slack)


def duality_comparison(space, p: Event, x: Event, y: Event, z: Event) -> DualityComparison:
    """Evaluate the inverted reverse-triangle deficit against the base slack."""
    lpx = space.time_separation(p, x)
    lpy = space.time_separation(p, y)
    lpz = space.time_separation(p, z)
    if min(lpx, lpy, lpz) <= 0.0:
        raise ValueError("x, y, z must lie in I+(p)")
    inv = inversion_time_sep
    deficit = (
        inv(space, p, z, x) - inv(space, p, z, y) - inv(space, p, y, x)
    )
    seps = Separations6.from_events(space, p, x, y, z)
    return DualityComparison(
        inverted_deficit=deficit,
        base_slack=ptolemy_slack(seps),
        product=lpx * lpy * lpz,
    )
