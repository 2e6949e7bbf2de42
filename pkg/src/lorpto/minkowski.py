"""Exact flat-space kernel for R^{1,n} with signature (+, -, ..., -).

Provides the hyperbolic norm and angle, time separation and causal
relations, the bordered-determinant coplanarity test, rectangular
hyperbolas in timelike 2-planes, and the classifier for the equality
cases of the Ptolemy inequality (coincident points, null-aligned
triples, timelike lines, rectangular hyperbolas).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Event, Relation, SamplingError

__all__ = [
    "MinkowskiSpace",
    "HyperbolaSpec",
    "minkowski_inner",
    "hyperbolic_norm",
    "hyperbolic_angle",
    "cayley_menger_volume2",
    "hyperbola_points",
    "classify_equality_case",
    "sample_flat_diamond_rows",
    "points_to_json",
    "points_from_json",
]


def minkowski_inner(u: np.ndarray, v: np.ndarray) -> float:
    """The bilinear form u0*v0 - sum_i ui*vi."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError("dimension mismatch in inner product")
    return float(u[0] * v[0] - u[1:] @ v[1:])


def hyperbolic_norm(v: Sequence[float] | np.ndarray) -> float:
    """sqrt(v0^2 - sum vi^2) for future-directed causal v, else 0.

    Total function: past-directed, null, and spacelike vectors all map
    to 0 (the unrelated-pair convention).
    """
    v = np.asarray(v, dtype=float)
    rad = float(v[0] * v[0] - v[1:] @ v[1:])
    if v[0] >= 0.0 and rad >= 0.0:
        return math.sqrt(rad)
    return 0.0


@dataclass(frozen=True)
class MinkowskiSpace:
    """Flat space R^{1,n}, n >= 1 spatial dimensions."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"spatial dimension must be >= 1, got {self.n}")

    @property
    def chart(self) -> str:
        return f"minkowski:{self.n}"

    @property
    def dim(self) -> int:
        return self.n + 1

    def event(self, *coords: float) -> Event:
        if len(coords) != self.dim:
            raise ValueError(
                f"expected {self.dim} coordinates for {self.chart}, got {len(coords)}"
            )
        return Event(self.chart, tuple(coords))

    def _diff(self, x: Event, y: Event) -> np.ndarray:
        if len(x.coords) != self.dim or len(y.coords) != self.dim:
            raise ValueError("event dimension does not match space")
        return y.vec - x.vec

    def time_separation(self, x: Event, y: Event) -> float:
        """Supremal proper time from x to y: the straight-segment norm."""
        return hyperbolic_norm(self._diff(x, y))

    def relation(self, x: Event, y: Event) -> Relation:
        d = self._diff(x, y)
        dt = float(d[0])
        rad = float(dt * dt - d[1:] @ d[1:])
        if rad < 0.0:
            return Relation.unrelated()
        if dt > 0.0:
            return Relation.chronological(True) if rad > 0.0 else Relation.causal(True)
        if dt < 0.0:
            return (
                Relation.chronological(False) if rad > 0.0 else Relation.causal(False)
            )
        # dt == 0 with rad >= 0 forces the zero vector: reflexive x <= x.
        return Relation.causal(True)

    def metric_inner(self, p: Event, u, v) -> float:
        """g_p(u, v); position-independent in flat space."""
        return minkowski_inner(np.asarray(u, float), np.asarray(v, float))

    # -- vectorized kernels (rows of coordinates) ----------------------------

    def vec_time_sep(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        A = np.asarray(A, dtype=float)
        B = np.asarray(B, dtype=float)
        d = B - A
        rad = d[:, 0] ** 2 - np.einsum("ij,ij->i", d[:, 1:], d[:, 1:])
        ok = (d[:, 0] >= 0.0) & (rad >= 0.0)
        return np.where(ok, np.sqrt(np.clip(rad, 0.0, None)), 0.0)

    def vec_chronological(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        A = np.asarray(A, dtype=float)
        B = np.asarray(B, dtype=float)
        d = B - A
        rad = d[:, 0] ** 2 - np.einsum("ij,ij->i", d[:, 1:], d[:, 1:])
        return (d[:, 0] > 0.0) & (rad > 0.0)

    def vec_causal(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        A = np.asarray(A, dtype=float)
        B = np.asarray(B, dtype=float)
        d = B - A
        rad = d[:, 0] ** 2 - np.einsum("ij,ij->i", d[:, 1:], d[:, 1:])
        return (d[:, 0] >= 0.0) & (rad >= 0.0)


def hyperbolic_angle(x: Event, y: Event, z: Event) -> float:
    """The boost angle at x between the timelike legs [x,y] and [x,z].

    Both legs must be future-directed timelike or both past-directed
    timelike (the past case reverses both).  Returns
    arcosh(<y-x, z-x> / (|y-x| |z-x|)) >= 0.
    """
    ly = y.vec - x.vec
    lz = z.vec - x.vec

    def norm_and_check(v: np.ndarray) -> tuple[float, int]:
        rad = float(v[0] * v[0] - v[1:] @ v[1:])
        if rad <= 0.0:
            raise ValueError("hyperbolic_angle requires timelike legs")
        return math.sqrt(rad), (1 if v[0] > 0.0 else -1)

    ny, sy = norm_and_check(ly)
    nz, sz = norm_and_check(lz)
    if sy != sz:
        raise ValueError(
            "hyperbolic_angle legs must both be future- or both past-directed"
        )
    if sy < 0:
        ly, lz = -ly, -lz
    arg = minkowski_inner(ly, lz) / (ny * nz)
    return math.acosh(max(arg, 1.0))


_CM_ORDER = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def cayley_menger_volume2(squared_seps: Sequence[float]) -> float:
    """Squared 2-volume proxy from the six squared separations.

    Input order (s12, s13, s14, s23, s24, s34).  Returns det(M)/288 of
    the bordered 5x5 matrix; the value vanishes exactly when the
    quadruple lies in a timelike 2-plane and is positive for the
    non-coplanar causal quadruples this package generates.
    """
    s = [float(v) for v in squared_seps]
    if len(s) != 6:
        raise ValueError("expected six squared separations")
    m = np.ones((5, 5), dtype=float)
    m[0, 0] = 0.0
    for (i, j), sq in zip(_CM_ORDER, s):
        m[i + 1, j + 1] = sq
        m[j + 1, i + 1] = sq
    for k in range(1, 5):
        m[k, k] = 0.0
    return float(np.linalg.det(m)) / 288.0


@dataclass(frozen=True)
class HyperbolaSpec:
    """A rectangular hyperbola branch in a timelike 2-plane of R^{1,n}.

    The branch is {center + sqrt(a) sinh(u) e_t + branch_sign sqrt(a)
    cosh(u) e_x}; ``e_t`` must be unit future timelike, ``e_x`` unit
    spacelike, mutually orthogonal (signature (+,-) plane).
    """

    a: float
    center: Event
    branch: int
    e_t: tuple[float, ...]
    e_x: tuple[float, ...]

    def __post_init__(self) -> None:
        if not (self.a > 0.0):
            raise ValueError(f"hyperbola scale a must be > 0, got {self.a!r}")
        if self.branch not in (1, -1):
            raise ValueError("branch must be +1 or -1")
        et = np.asarray(self.e_t, dtype=float)
        ex = np.asarray(self.e_x, dtype=float)
        if et.shape != ex.shape or et.shape != (len(self.center.coords),):
            raise ValueError("basis vectors must match the center's dimension")
        tol = 1e-9
        if abs(minkowski_inner(et, et) - 1.0) > tol or et[0] <= 0.0:
            raise ValueError("e_t must be unit future timelike")
        if abs(minkowski_inner(ex, ex) + 1.0) > tol:
            raise ValueError("e_x must be unit spacelike")
        if abs(minkowski_inner(et, ex)) > tol:
            raise ValueError("basis must be orthogonal (timelike 2-plane)")


def hyperbola_points(h: HyperbolaSpec, params: Sequence[float]) -> list[Event]:
    """Branch points at the given parameters, as events of the center's chart.

    Consecutive parameters u1 < u2 give chronologically related points
    with separation 2 sqrt(a) sinh((u2-u1)/2).
    """
    c = h.center.vec
    et = np.asarray(h.e_t, dtype=float)
    ex = np.asarray(h.e_x, dtype=float)
    ra = math.sqrt(h.a)
    out = []
    for u in params:
        p = c + ra * math.sinh(u) * et + h.branch * ra * math.cosh(u) * ex
        out.append(Event(h.center.chart, tuple(p)))
    return out


# --------------------------------------------------------------------------
# Equality-case classifier.

_CLASSIFY_FIT_TOL = 1e-7  # two-stage (volume, in-plane fit) relative tolerance
_NULL_CROSS_TOL = 1e-10  # cross-term tolerance for null-aligned detection


def _pair_minors_max(u: np.ndarray, v: np.ndarray) -> float:
    """Largest |2x2 minor| of the 2 x dim matrix [u; v] (0 iff parallel)."""
    minors = np.abs(np.outer(u, v) - np.outer(v, u))
    return float(minors.max())


def classify_equality_case(quadruple: Sequence[Event]) -> str:
    """Label the geometric configuration of a causal quadruple.

    Returns one of "coincident", "null_aligned", "timelike_line",
    "rectangular_hyperbola", "generic", checked in that order:

    - coincident: two of the four points are equal;
    - null_aligned: three consecutive points sit on one null ray;
    - timelike_line: all four affinely collinear with timelike direction;
    - rectangular_hyperbola: the points lie in a timelike 2-plane
      (volume test) and fit the translated one-parameter family
      t^2 - x^2 + alpha t + beta x + gamma = 0 with positive opening and
      a single branch;
    - generic: none of the above.

    The first three labels exhaust the degenerate zero-slack
    configurations; the hyperbola label covers the non-degenerate
    equality locus.  Raises ValueError when the quadruple is not a
    causal chain.
    """
    pts = [e.vec for e in quadruple]
    if len(pts) != 4:
        raise ValueError("expected exactly four events")
    space = MinkowskiSpace(len(pts[0]) - 1)
    for a, b in zip(quadruple, quadruple[1:]):
        rel = space.relation(a, b)
        if not (rel.is_causal and rel.forward):
            raise ValueError("quadruple is not a causally ordered chain")

    diffs = [pts[i + 1] - pts[i] for i in range(3)]
    scale = max(1.0, max(float(np.abs(d).max()) for d in diffs))
    sq_scale = scale * scale

    # 1. coincident
    for i in range(4):
        for j in range(i + 1, 4):
            if np.array_equal(pts[i], pts[j]):
                return "coincident"

    # 2. null_aligned: a consecutive triple on one null ray
    for k in range(2):
        d1, d2 = diffs[k], diffs[k + 1]
        nullish = (
            abs(minkowski_inner(d1, d1)) <= _NULL_CROSS_TOL * sq_scale
            and abs(minkowski_inner(d2, d2)) <= _NULL_CROSS_TOL * sq_scale
        )
        if nullish and _pair_minors_max(d1, d2) <= _NULL_CROSS_TOL * sq_scale:
            return "null_aligned"

    # 3. timelike_line: all differences parallel, direction timelike
    base = pts[3] - pts[0]
    spans = [pts[1] - pts[0], pts[2] - pts[0], base]
    parallel = all(
        _pair_minors_max(u, v) <= _NULL_CROSS_TOL * sq_scale
        for i, u in enumerate(spans)
        for v in spans[i + 1 :]
    )
    if parallel and minkowski_inner(base, base) > 0.0:
        return "timelike_line"

    # 4. rectangular_hyperbola: coplanarity + in-plane conic fit
    seps = [
        space.time_separation(quadruple[i], quadruple[j]) for (i, j) in _CM_ORDER
    ]
    vol2 = cayley_menger_volume2([v * v for v in seps])
    if abs(vol2) > _CLASSIFY_FIT_TOL * max(1.0, sq_scale * sq_scale):
        return "generic"

    if minkowski_inner(base, base) <= 0.0:
        return "generic"  # no timelike axis to span the plane
    e_t = base / math.sqrt(minkowski_inner(base, base))
    # pick the candidate with the largest component off the axis
    best: np.ndarray | None = None
    best_norm = 0.0
    for w in (pts[1] - pts[0], pts[2] - pts[0]):
        w_perp = w - minkowski_inner(w, e_t) * e_t
        norm2 = -minkowski_inner(w_perp, w_perp)  # spacelike complement
        if norm2 > best_norm:
            best_norm = norm2
            best = w_perp
    if best is None or best_norm <= (1e-14 * sq_scale):
        return "generic"
    e_x = best / math.sqrt(best_norm)

    # in-plane coordinates and off-plane residual
    ts, xs = [], []
    for p in pts:
        r = p - pts[0]
        t_i = minkowski_inner(r, e_t)
        x_i = -minkowski_inner(r, e_x)
        off = r - t_i * e_t - x_i * e_x
        if float(np.abs(off).max()) > _CLASSIFY_FIT_TOL * scale:
            return "generic"
        ts.append(t_i)
        xs.append(x_i)
    t = np.asarray(ts)
    x = np.asarray(xs)

    # least-squares fit of t^2 - x^2 + alpha t + beta x + gamma = 0
    A = np.stack([t, x, np.ones(4)], axis=1)
    b = -(t * t - x * x)
    coeff, *_ = np.linalg.lstsq(A, b, rcond=None)
    alpha, beta, gamma = (float(c) for c in coeff)
    resid = float(np.abs(A @ coeff - b).max())
    if resid > _CLASSIFY_FIT_TOL * max(1.0, sq_scale):
        return "generic"
    t0 = -alpha / 2.0
    x0 = beta / 2.0
    a_fit = gamma - t0 * t0 + x0 * x0  # locus: (t-t0)^2 - (x-x0)^2 = -a_fit
    if a_fit <= _CLASSIFY_FIT_TOL * max(1.0, sq_scale):
        return "generic"
    branch_coords = x - x0
    if np.all(branch_coords > 0.0) or np.all(branch_coords < 0.0):
        return "rectangular_hyperbola"
    return "generic"


# --------------------------------------------------------------------------
# Diamond sampling


def sample_flat_diamond_rows(
    space: MinkowskiSpace,
    corner_a: Sequence[float],
    corner_b: Sequence[float],
    rng: np.random.Generator,
    count: int,
    max_batches: int = 4000,
) -> np.ndarray:
    """Uniform samples of the open diamond I(a, b), as coordinate rows.

    Rejection sampling in the coordinate box t in [a0, b0], spatial
    x_i in [a_i - H, a_i + H] with H = b0 - a0 (any point of the diamond
    satisfies these bounds), accepting strict two-sided chronology.
    """
    a = np.asarray(corner_a, dtype=float)
    b = np.asarray(corner_b, dtype=float)
    if a.shape != (space.dim,) or b.shape != (space.dim,):
        raise ValueError("corner dimension does not match the space")
    rel = space.relation(Event(space.chart, tuple(a)), Event(space.chart, tuple(b)))
    if not (rel.is_chronological and rel.forward):
        raise ValueError("empty region: corners are not chronologically related")
    H = b[0] - a[0]
    lo = np.concatenate([[a[0]], a[1:] - H])
    hi = np.concatenate([[b[0]], a[1:] + H])
    out = np.empty((count, space.dim), dtype=float)
    have = 0
    batch = max(1024, min(65536, 4 * count))
    for _ in range(max_batches):
        if have >= count:
            break
        u = rng.random((batch, space.dim))
        rows = lo + u * (hi - lo)
        A = np.broadcast_to(a, rows.shape)
        B = np.broadcast_to(b, rows.shape)
        inside = space.vec_chronological(A, rows) & space.vec_chronological(rows, B)
        good = rows[inside]
        take = min(count - have, good.shape[0])
        out[have : have + take] = good[:take]
        have += take
    if have < count:
        raise SamplingError(
            f"rejection budget exceeded: drew {have}/{count} diamond samples"
        )
    return out


# --------------------------------------------------------------------------
# Point-set JSON

def points_to_json(space: MinkowskiSpace, points: Sequence[Event]) -> dict:
    return {
        "chart": "minkowski",
        "n": space.n,
        "points": [list(p.coords) for p in points],
    }


def points_from_json(doc: dict) -> tuple[MinkowskiSpace, list[Event]]:
    if doc.get("chart") != "minkowski":
        raise ValueError("not a flat point-set document")
    space = MinkowskiSpace(int(doc["n"]))
    points = [space.event(*map(float, row)) for row in doc["points"]]
    return space, points
