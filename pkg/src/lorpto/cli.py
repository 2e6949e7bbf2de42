"""Batch front end: seeded scans, the hyperbola witness, and report emission.

Subcommands (one verb per mechanism):

- ``check``     seeded quadruple scan of a diamond region (or an explicit
                point set, scanned exhaustively);
- ``witness``   the four-point equality/violation witness built from two
                timelike lines through a translated rectangular hyperbola;
- ``invert``    hyperbolic inversion of a point about a center;
- ``curvature`` sectional estimate or four-point verdict;
- ``cone``      cone-isometry residual over sampled pairs;
- ``causet``    sprinkle a causal set / exhaustively check one.

Determinism: a 64-bit master seed is expanded per 4096-quadruple chunk
with a splitmix-style hash of (seed XOR chunk index); chunks merge in
index order with first-wins tie-breaks, so reports are byte-identical
for fixed inputs regardless of the worker count (LORPTO_THREADS caps
workers).  Exit codes: 0 = no violations, 2 = violations found,
1 = usage or runtime error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cone import cone_isometry_residual
from .core import (
    HIST_BINS,
    TOL_ABS,
    TOL_REL,
    Event,
    PtolemyVerdict,
    SamplingError,
    ScanReport,
    Separations6,
    canonical_json,
    histogram_counts,
    ptolemy_slack,
    ptolemy_slack_margin,
    slack_scale,
    slack_tolerance,
    timed,
)
from .causet import causet_from_json, causet_from_points, causet_to_json, exhaustive_ptolemy, sprinkle
from .curvature import default_estimator_grid, estimate_sectional, four_point_check
from .inversion import InversionSpec, invert_point
from .minkowski import MinkowskiSpace
from .minkowski import points_from_json as flat_points_from_json
from .modelspaces import (
    ModelSpace,
    exp_map,
    sample_diamond_rows,
    space_for_chart,
    time_order_key,
)
from .modelspaces import points_from_json as model_points_from_json

__all__ = [
    "CHUNK",
    "chunk_rng",
    "WitnessConfig",
    "sample_quadruple",
    "scan",
    "witness_positive_curvature",
    "report_emit",
    "main",
]

CHUNK = 4096  # accepted quadruples per deterministic seed chunk


def chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    """Deterministic generator for one scan chunk.

    Keyed on the (seed, chunk_index) pair so distinct seeds share no
    substreams and chunk results are independent of worker scheduling.
    """
    ss = np.random.SeedSequence((seed, chunk_index))
    return np.random.default_rng(np.random.PCG64(ss))


def _threads_from_env(default: int = 1) -> int:
    raw = os.environ.get("LORPTO_THREADS")
    if raw is None:
        return default
    try:
        return max(1, int(raw))
    except ValueError as exc:
        raise ValueError(f"LORPTO_THREADS must be an integer, got {raw!r}") from exc


# --------------------------------------------------------------------------
# Quadruple sampling.
#
# Flat backends use an exact cascade: the first point is uniform in the
# region diamond, each later point uniform in the sub-diamond between its
# predecessor and the top corner.  Uniformity on an arbitrary diamond
# I(x, b) comes from Lorentz-boosting a standard axis-aligned diamond
# (boosts preserve volume), so no candidate is ever rejected and the
# acceptance rate is 1 — required because iid chain rejection in R^{1,3}
# accepts only ~3e-5 of candidates.  Curved (2-D) backends use iid
# rejection of time-sorted quadruples, whose acceptance is a few percent.


def _standard_diamond(rng: np.random.Generator, m: int, nsp: int) -> np.ndarray:
    """Exact uniform samples of the unit-height diamond I(0, e0) in R^{1,nsp}."""
    u = rng.random(m)
    side = rng.random(m)
    radial = rng.random(m)
    tau = 0.5 * u ** (1.0 / (nsp + 1))
    t = np.where(side < 0.5, tau, 1.0 - tau)
    r = np.minimum(t, 1.0 - t) * radial ** (1.0 / nsp)
    out = np.empty((m, nsp + 1))
    out[:, 0] = t
    if nsp == 1:
        out[:, 1] = np.where(rng.random(m) < 0.5, -r, r)
    else:
        g = rng.standard_normal((m, nsp))
        g /= np.maximum(np.linalg.norm(g, axis=1, keepdims=True), 1e-300)
        out[:, 1:] = r[:, None] * g
    return out


def _boost_into(base: np.ndarray, top: np.ndarray, std: np.ndarray) -> np.ndarray:
    """Map standard-diamond rows into I(base_i, top_i) per row.

    base/top are (m, n+1) rows with top chronologically after base; the
    boost sending e0 to the unit vector along (top - base), scaled by the
    separation, carries the standard diamond onto I(base, top) exactly
    and measure-preservingly.
    """
    d = top - base
    dsp = d[:, 1:]
    rad = d[:, 0] ** 2 - np.einsum("ij,ij->i", dsp, dsp)
    delta = np.sqrt(np.clip(rad, 0.0, None))
    safe = np.maximum(delta, 1e-300)
    v = std * delta[:, None]
    gamma = d[:, 0] / safe
    usp = dsp / safe[:, None]
    udotv = np.einsum("ij,ij->i", usp, v[:, 1:])
    out = np.empty_like(std)
    out[:, 0] = base[:, 0] + gamma * v[:, 0] + udotv
    out[:, 1:] = base[:, 1:] + v[:, 1:] + (udotv / (gamma + 1.0) + v[:, 0])[:, None] * usp
    return out


def _flat_chain_block(
    space: MinkowskiSpace,
    a_vec: np.ndarray,
    b_vec: np.ndarray,
    rng: np.random.Generator,
    want: int,
    max_batches: int = 200,
) -> tuple[np.ndarray, bool]:
    """(quadruples, exhausted): exact x <= y << z <= w chains in I(a, b)."""
    dim = space.dim
    nsp = space.n
    out = np.empty((want, 4, dim))
    have = 0
    for _ in range(max_batches):
        if have >= want:
            break
        m = min(want - have, CHUNK)
        A = np.broadcast_to(a_vec, (m, dim))
        B = np.broadcast_to(b_vec, (m, dim))
        x = _boost_into(A, B, _standard_diamond(rng, m, nsp))
        y = _boost_into(x, B, _standard_diamond(rng, m, nsp))
        z = _boost_into(y, B, _standard_diamond(rng, m, nsp))
        w = _boost_into(z, B, _standard_diamond(rng, m, nsp))
        # construction guarantees the chain; reject only boundary ties
        ok = (
            space.vec_causal(x, y)
            & (space.vec_time_sep(y, z) > 0.0)
            & space.vec_causal(z, w)
        )
        good = np.stack([x[ok], y[ok], z[ok], w[ok]], axis=1)
        take = min(want - have, good.shape[0])
        out[have : have + take] = good[:take]
        have += take
    return out[:have], have < want


def _curved_chain_block(
    space: ModelSpace,
    corner_a: tuple[float, float],
    corner_b: tuple[float, float],
    rng: np.random.Generator,
    want: int,
    max_batches: int = 2000,
) -> tuple[np.ndarray, bool]:
    """(quadruples, exhausted): iid time-sorted chain rejection on a model space."""
    out = np.empty((want, 4, space.dim))
    have = 0
    for _ in range(max_batches):
        if have >= want:
            break
        m = min(max(2048, 32 * (want - have)), 65536)
        pts = sample_diamond_rows(space, corner_a, corner_b, rng, 4 * m).reshape(
            m, 4, space.dim
        )
        key = time_order_key(space, pts.reshape(4 * m, space.dim)).reshape(m, 4)
        order = np.argsort(key, axis=1)
        pts = np.take_along_axis(pts, order[:, :, None], axis=1)
        x, y, z, w = pts[:, 0], pts[:, 1], pts[:, 2], pts[:, 3]
        ok = (
            space.vec_causal(x, y)
            & (space.vec_time_sep(y, z) > 0.0)
            & space.vec_causal(z, w)
        )
        good = pts[ok]
        take = min(want - have, good.shape[0])
        out[have : have + take] = good[:take]
        have += take
    return out[:have], have < want


def _region_corners(space, region: tuple):
    corner_a, corner_b = region
    if isinstance(space, MinkowskiSpace):
        a = np.asarray(corner_a, dtype=float)
        b = np.asarray(corner_b, dtype=float)
        if a.shape != (space.dim,) or b.shape != (space.dim,):
            raise ValueError(
                f"region corners for {space.chart} need {space.dim} coordinates"
            )
        rel = space.relation(Event(space.chart, tuple(a)), Event(space.chart, tuple(b)))
        if not (rel.is_chronological and rel.forward):
            raise ValueError("empty region: corners are not chronologically related")
        return a, b
    ca = (float(corner_a[0]), float(corner_a[1]))
    cb = (float(corner_b[0]), float(corner_b[1]))
    return ca, cb


def _chain_block(space, region, rng, want):
    if isinstance(space, MinkowskiSpace):
        a, b = _region_corners(space, region)
        return _flat_chain_block(space, a, b, rng, want)
    ca, cb = _region_corners(space, region)
    return _curved_chain_block(space, ca, cb, rng, want)


def sample_quadruple(space, region, rng) -> tuple[Event, Event, Event, Event]:
    """One seeded quadruple x <= y << z <= w inside the region diamond."""
    rows, exhausted = _chain_block(space, region, rng, 1)
    if exhausted:
        raise SamplingError("region too thin: quadruple rejection budget exceeded")
    return tuple(Event(space.chart, tuple(row)) for row in rows[0])


# --------------------------------------------------------------------------
# The scan engine.


def _chunk_scan(space, region, seed, delta, chunk_index, count, collect_rows):
    rng = chunk_rng(seed, chunk_index)
    quads, exhausted = _chain_block(space, region, rng, count)
    m = quads.shape[0]
    if m == 0:
        empty_hist = np.zeros(HIST_BINS, dtype=np.int64)
        return {
            "count": 0,
            "violations": 0,
            "hist": empty_hist,
            "min_slack": None,
            "witness": None,
            "seps": None,
            "min_robust": None,
            "rows": np.empty((0, 8)) if collect_rows else None,
            "short": exhausted,
        }
    x, y, z, w = quads[:, 0], quads[:, 1], quads[:, 2], quads[:, 3]
    sep = space.vec_time_sep
    l12, l13, l14 = sep(x, y), sep(x, z), sep(x, w)
    l23, l24, l34 = sep(y, z), sep(y, w), sep(z, w)
    prod = l13 * l24
    slack = prod - (l12 * l34 + l14 * l23)
    d = float(delta)
    robust = (l13 + d) * (l24 + d) - (
        np.clip(l12 - d, 0.0, None) * np.clip(l34 - d, 0.0, None)
        + (l14 - d) * (l23 - d)
    )
    violations = int((slack < -(TOL_ABS + TOL_REL * prod)).sum())
    hist = histogram_counts(slack)
    i0 = int(np.argmin(slack))  # first minimum wins within the chunk
    witness = tuple(tuple(float(c) for c in quads[i0, k]) for k in range(4))
    seps = Separations6(
        l12=float(l12[i0]),
        l13=float(l13[i0]),
        l14=float(l14[i0]),
        l23=float(l23[i0]),
        l24=float(l24[i0]),
        l34=float(l34[i0]),
    )
    rows = None
    if collect_rows:
        rows = np.column_stack([l12, l13, l14, l23, l24, l34, slack, robust])
    return {
        "count": m,
        "violations": violations,
        "hist": hist,
        "min_slack": float(slack[i0]),
        "witness": witness,
        "seps": seps,
        "min_robust": float(robust.min()),
        "rows": rows,
        "short": exhausted,
    }


def scan(
    space,
    region,
    samples: int,
    seed: int,
    delta: float = 0.0,
    threads: int | None = None,
    collect_rows: bool = False,
) -> tuple[ScanReport, np.ndarray | None]:
    """Seeded quadruple scan: N chains, slack statistics, argmin witness.

    Deterministic for fixed (space, region, samples, seed, delta): work
    is split into fixed 4096-quadruple chunks whose substreams depend
    only on (seed, chunk index), and chunk results merge in index order
    with strict-inequality (first-wins) tie-breaks, so the thread count
    never changes the report.  When ``collect_rows`` is set the
    per-sample separations/slack rows come back for CSV emission.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if not (delta >= 0.0):
        raise ValueError("delta must be >= 0")
    _region_corners(space, region)  # validate before spawning work
    t0 = timed()
    if threads is None:
        threads = _threads_from_env(1)
    n_chunks = (samples + CHUNK - 1) // CHUNK
    counts = [min(CHUNK, samples - ci * CHUNK) for ci in range(n_chunks)]

    def job(ci: int):
        return _chunk_scan(space, region, seed, delta, ci, counts[ci], collect_rows)

    if threads <= 1 or n_chunks == 1:
        parts = [job(ci) for ci in range(n_chunks)]
    else:
        with ThreadPoolExecutor(max_workers=min(threads, n_chunks)) as pool:
            parts = list(pool.map(job, range(n_chunks)))

    total = sum(p["count"] for p in parts)
    violations = sum(p["violations"] for p in parts)
    hist = np.zeros(HIST_BINS, dtype=np.int64)
    best = None
    min_robust = None
    for p in parts:  # chunk order: first strict minimum wins
        hist += p["hist"]
        if p["count"] == 0:
            continue
        if best is None or p["min_slack"] < best["min_slack"]:
            best = p
        if min_robust is None or p["min_robust"] < min_robust:
            min_robust = p["min_robust"]
    flags = tuple(["partial"] if any(p["short"] for p in parts) else [])
    # Recompute the winning quadruple through the scalar separation path so
    # re-evaluating the emitted witness reproduces min_slack bit-for-bit
    # (vectorized kernels may differ from the scalar ones by an ulp).
    min_slack = 0.0
    witness_seps = None
    if best is not None:
        events = [Event(space.chart, c) for c in best["witness"]]
        pair = space.time_separation
        witness_seps = Separations6(
            l12=pair(events[0], events[1]),
            l13=pair(events[0], events[2]),
            l14=pair(events[0], events[3]),
            l23=pair(events[1], events[2]),
            l24=pair(events[1], events[3]),
            l34=pair(events[2], events[3]),
        )
        min_slack = ptolemy_slack(witness_seps)
    report = ScanReport(
        space=space.chart,
        samples=int(total),
        seed=int(seed),
        delta=float(delta),
        min_slack=min_slack,
        min_robust_slack=0.0 if min_robust is None else min_robust,
        witness_events=None if best is None else best["witness"],
        witness_separations=witness_seps,
        histogram_counts=tuple(int(c) for c in hist),
        violations=int(violations),
        wall_time=timed() - t0,
        flags=flags,
    )
    rows = None
    if collect_rows:
        rows = np.concatenate([p["rows"] for p in parts if p["rows"] is not None])
    return report, rows


# --------------------------------------------------------------------------
# The hyperbola witness.


@dataclass(frozen=True)
class WitnessConfig:
    """Two timelike lines through a translated rectangular hyperbola.

    The branch {(sqrt(a) sinh u, c_x + sqrt(a) cosh u)} (center on the
    spatial axis at c_x < 0) is cut by the lines x = k1 t and x = k2 t;
    the four intersections, ordered by time, form a quadruple whose
    Ptolemy slack is exactly 0 in the flat plane, >= 0 in the K<0 model,
    and < 0 in the K>0 model after exp at the base point.  ``scale``
    multiplies the tangent vectors before the exponential.
    """

    a: float = 1.0
    c_x: float = -2.0
    k1: float = 0.0
    k2: float = 0.5
    scale: float = 1.0

    def __post_init__(self) -> None:
        if not (self.a > 0.0):
            raise ValueError("hyperbola scale a must be > 0")
        if not (self.c_x < 0.0):
            raise ValueError("center offset c_x must be < 0")
        for k in (self.k1, self.k2):
            if not (abs(k) < 1.0):
                raise ValueError("line slopes must satisfy |k| < 1 (timelike lines)")
        if self.k1 == self.k2:
            raise ValueError("the two line slopes must differ")
        if not (self.scale > 0.0):
            raise ValueError("scale must be > 0")


def _branch_intersections(cfg: WitnessConfig) -> list[tuple[float, float]]:
    """The four line/branch intersections, time-ordered and alternation-checked."""
    sa = math.sqrt(cfg.a)
    pts: list[tuple[float, float, int]] = []
    for label, k in enumerate((cfg.k1, cfg.k2)):
        reach = -cfg.c_x / (sa * math.sqrt(1.0 - k * k))
        if not (reach > 1.0):
            raise ValueError(f"line with slope {k} misses the hyperbola branch")
        u0 = math.atanh(k)
        du = math.acosh(reach)
        for u in (u0 - du, u0 + du):
            pts.append((sa * math.sinh(u), cfg.c_x + sa * math.cosh(u), label))
    pts.sort(key=lambda p: p[0])
    labels = tuple(p[2] for p in pts)
    if labels not in ((0, 1, 0, 1), (1, 0, 1, 0)):
        raise ValueError("intersection points do not alternate between the two lines")
    return [(t, x) for t, x, _ in pts]


def witness_positive_curvature(space, p: Event, cfg: WitnessConfig) -> PtolemyVerdict:
    """Build the four-point witness at p and return its slack verdict.

    The plane quadruple is scaled by cfg.scale and pushed through the
    exponential map at p (affine translation in flat space, where any p
    works; quadric exp at the base point for curved models).  All six
    ordered pairs must come out chronological in the target space —
    otherwise the configuration left the chronology domain (for K > 0, a
    wedge overflow) and the construction reports an error rather than a
    verdict.
    """
    plane = _branch_intersections(cfg)
    events: list[Event] = []
    if isinstance(space, MinkowskiSpace):
        base = p.vec
        if base.shape != (space.dim,):
            raise ValueError("anchor point does not live in the target space")
        for t, x in plane:
            v = np.zeros(space.dim)
            v[0] = cfg.scale * t
            v[1] = cfg.scale * x
            events.append(Event(space.chart, tuple(base + v)))
    elif isinstance(space, ModelSpace):
        if space.is_flat:
            base = p.vec
            for t, x in plane:
                events.append(
                    Event(space.chart, (base[0] + cfg.scale * t, base[1] + cfg.scale * x))
                )
        else:
            if p != space.base_event():
                raise ValueError(
                    "curved witness construction is anchored at the base point"
                )
            e_t, e_x = space.base_frame()
            for t, x in plane:
                v = cfg.scale * (t * e_t + x * e_x)
                events.append(exp_map(space, p, v))
    else:
        raise ValueError(f"unsupported backend {space!r}")
    for i in range(4):
        for j in range(i + 1, 4):
            rel = space.relation(events[i], events[j])
            if not (rel.is_chronological and rel.forward):
                raise ValueError(
                    "wedge overflow: the scaled quadruple leaves the chronological domain"
                )
    seps = Separations6.from_events(space, *events)
    return PtolemyVerdict(
        slack=ptolemy_slack(seps),
        robust_slack=ptolemy_slack_margin(seps, 0.0),
        witness=tuple(events),
    )


# --------------------------------------------------------------------------
# Report emission.


def _csv_bytes(rows: np.ndarray) -> bytes:
    lines = ["sample_index,l12,l13,l14,l23,l24,l34,slack,robust_slack"]
    for idx, row in enumerate(np.asarray(rows, dtype=float)):
        lines.append(",".join([str(idx)] + [format(float(v), ".17g") for v in row]))
    lines.append("")
    return "\n".join(lines).encode("utf-8")


def report_emit(report: ScanReport, fmt: str, rows: np.ndarray | None = None) -> bytes:
    """Serialize a report: canonical JSON, or per-sample CSV rows."""
    if fmt == "json":
        return canonical_json(report.to_json_dict())
    if fmt == "csv":
        if rows is None:
            raise ValueError("csv output needs per-sample rows (collect_rows)")
        return _csv_bytes(rows)
    raise ValueError(f"unknown format {fmt!r}")


# --------------------------------------------------------------------------
# Command-line plumbing.


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit code 1 for usage errors, not argparse's 2
        raise _UsageError(message)


def _parse_region(text: str) -> tuple[tuple[float, ...], tuple[float, ...]]:
    halves = text.split(";")
    if len(halves) != 2:
        raise _UsageError("region must be 'coords;coords' (corner a; corner b)")
    try:
        a = tuple(float(v) for v in halves[0].split(","))
        b = tuple(float(v) for v in halves[1].split(","))
    except ValueError as exc:
        raise _UsageError(f"bad region {text!r}: {exc}") from exc
    return a, b


def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise _UsageError(f"bad coordinate list {text!r}") from exc


def _emit(data: bytes, out: str | None) -> None:
    if out is None:
        sys.stdout.buffer.write(data)
        if not data.endswith(b"\n"):
            sys.stdout.buffer.write(b"\n")
        sys.stdout.buffer.flush()
    else:
        with open(out, "wb") as fh:
            fh.write(data)


def _base_point(space) -> Event:
    if isinstance(space, MinkowskiSpace):
        return Event(space.chart, (0.0,) * space.dim)
    return space.base_event()


def _cmd_check(args) -> int:
    if args.points is not None:
        with open(args.points, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        if doc.get("chart") == "minkowski":
            space, events = flat_points_from_json(doc)
        elif doc.get("chart") == "model":
            space, events = model_points_from_json(doc)
        else:
            raise _UsageError("point file must be a flat or model point-set document")
        if args.format == "csv":
            raise _UsageError("csv output applies to sampled scans, not point sets")
        cs = causet_from_points(space, events)
        report = exhaustive_ptolemy(cs, threads=_threads_from_env(1))
        _emit(report_emit(report, "json"), args.out)
        return 0 if report.violations == 0 else 2
    if args.space is None or args.region is None:
        raise _UsageError("check needs --space and --region (or --points)")
    if args.samples < 1:
        raise _UsageError("--samples must be >= 1")
    space = space_for_chart(args.space)
    region = _parse_region(args.region)
    collect = args.format == "csv"
    report, rows = scan(
        space,
        region,
        args.samples,
        args.seed,
        delta=args.delta,
        collect_rows=collect,
    )
    _emit(report_emit(report, args.format, rows), args.out)
    return 0 if report.violations == 0 else 2


def _cmd_witness(args) -> int:
    space = space_for_chart(args.space)
    cfg = WitnessConfig(a=args.a, c_x=args.cx, k1=args.k1, k2=args.k2, scale=args.scale)
    p = _base_point(space)
    verdict = witness_positive_curvature(space, p, cfg)
    seps = Separations6.from_events(space, *verdict.witness)
    doc = {
        "space": space.chart,
        "config": {
            "a": cfg.a,
            "c_x": cfg.c_x,
            "k1": cfg.k1,
            "k2": cfg.k2,
            "scale": cfg.scale,
        },
        "slack": verdict.slack,
        "robust_slack": verdict.robust_slack,
        "witness_events": [list(e.coords) for e in verdict.witness],
        "separations": seps.as_dict(),
    }
    _emit(canonical_json(doc), args.out)
    violated = verdict.slack < -slack_tolerance(slack_scale(seps))
    return 2 if violated else 0


def _cmd_invert(args) -> int:
    space = space_for_chart(args.space)
    center = Event(space.chart, _parse_floats(args.center))
    point = Event(space.chart, _parse_floats(args.point))
    spec = InversionSpec(center=center, radius=args.radius)
    image = invert_point(space, spec, point)
    sep = space.time_separation
    gap = abs(sep(center, point) * sep(center, image) - args.radius**2)
    doc = {
        "space": space.chart,
        "center": list(center.coords),
        "radius": args.radius,
        "point": list(point.coords),
        "image": list(image.coords),
        "radius_product_gap": gap,
    }
    _emit(canonical_json(doc), args.out)
    return 0


def _cmd_curvature(args) -> int:
    if args.mode == "estimate":
        space = space_for_chart(args.space)
        p = _base_point(space)
        vt, vx = _parse_floats(args.v)
        wt, wx = _parse_floats(args.w)
        if isinstance(space, MinkowskiSpace):
            v = np.zeros(space.dim)
            w = np.zeros(space.dim)
            v[0], v[1] = vt, vx
            w[0], w[1] = wt, wx
        elif space.is_flat:
            v = np.array([vt, vx])
            w = np.array([wt, wx])
        else:
            e_t, e_x = space.base_frame()
            v = vt * e_t + vx * e_x
            w = wt * e_t + wx * e_x
        grid = default_estimator_grid(t_max=args.grid_max, size=args.grid_size)
        est = estimate_sectional(space, p, v, w, grid)
        doc = {
            "space": space.chart,
            "c_hat": est.c_hat,
            "denom": est.denom,
            "K_hat": est.K_hat,
            "residual": est.residual,
        }
        _emit(canonical_json(doc), args.out)
        return 0
    seps = Separations6(*_parse_floats(args.seps))
    verdict = four_point_check(seps, K=args.K)
    doc = {
        "K": args.K,
        "opposite_side_margin": verdict.opposite_side_margin,
        "same_side_margin": verdict.same_side_margin,
        "passes": verdict.passes(tol=1e-9),
    }
    _emit(canonical_json(doc), args.out)
    return 0 if verdict.passes(tol=1e-9) else 2


def _cmd_cone(args) -> int:
    space = space_for_chart(args.space)
    p = _base_point(space)
    rng = chunk_rng(args.seed, 0)
    if isinstance(space, MinkowskiSpace):
        a = np.zeros(space.dim)
        b = np.zeros(space.dim)
        a[0], b[0] = 1.0, 3.0
        rows, exhausted = _flat_chain_block(space, a, b, rng, args.samples)
    else:
        rows, exhausted = _curved_chain_block(space, (0.2, 0.0), (1.2, 0.0), rng, args.samples)
    if exhausted:
        raise SamplingError("cone pair sampling exhausted its budget")
    pairs = [
        (Event(space.chart, tuple(q[1])), Event(space.chart, tuple(q[2])))
        for q in rows
    ]
    residual = cone_isometry_residual(space, p, pairs)
    doc = {"space": space.chart, "samples": args.samples, "residual": residual}
    _emit(canonical_json(doc), args.out)
    return 2 if residual > 1e-6 else 0


def _cmd_causet(args) -> int:
    if args.mode == "sprinkle":
        space = space_for_chart(args.space)
        region = _parse_region(args.region)
        cs = sprinkle(space, region, args.n, args.seed)
        _emit(canonical_json(causet_to_json(cs)), args.out)
        return 0
    if args.infile is not None:
        with open(args.infile, "r", encoding="utf-8") as fh:
            cs = causet_from_json(json.load(fh))
    else:
        if args.space is None or args.region is None:
            raise _UsageError("causet check needs --in or (--space, --region, --n)")
        space = space_for_chart(args.space)
        region = _parse_region(args.region)
        cs = sprinkle(space, region, args.n, args.seed)
    report = exhaustive_ptolemy(cs, threads=_threads_from_env(1))
    _emit(report_emit(report, "json"), args.out)
    return 0 if report.violations == 0 else 2


def _build_parser() -> _Parser:
    parser = _Parser(prog="lorpto", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="seeded quadruple scan of a diamond region")
    check.add_argument("--space", help="minkowski:N or model:K")
    check.add_argument("--region", help="corner a;corner b (comma-separated coords)")
    check.add_argument("--samples", type=int, default=10000)
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--delta", type=float, default=0.0)
    check.add_argument("--points", help="point-set JSON file (exhaustive scan)")
    check.add_argument("--format", choices=("json", "csv"), default="json")
    check.add_argument("--out")
    check.set_defaults(func=_cmd_check)

    wit = sub.add_parser("witness", help="hyperbola/line four-point witness")
    wit.add_argument("--space", required=True)
    wit.add_argument("--a", type=float, default=1.0)
    wit.add_argument("--cx", type=float, default=-2.0)
    wit.add_argument("--k1", type=float, default=0.0)
    wit.add_argument("--k2", type=float, default=0.5)
    wit.add_argument("--scale", type=float, default=1.0)
    wit.add_argument("--out")
    wit.set_defaults(func=_cmd_witness)

    inv = sub.add_parser("invert", help="hyperbolic inversion of a point")
    inv.add_argument("--space", required=True)
    inv.add_argument("--center", required=True, help="comma-separated coordinates")
    inv.add_argument("--point", required=True, help="comma-separated coordinates")
    inv.add_argument("--radius", type=float, default=1.0)
    inv.add_argument("--out")
    inv.set_defaults(func=_cmd_invert)

    curv = sub.add_parser("curvature", help="sectional estimate / four-point verdict")
    curv_sub = curv.add_subparsers(dest="mode", required=True)
    est = curv_sub.add_parser("estimate")
    est.add_argument("--space", required=True)
    est.add_argument("--v", required=True, help="frame components t,x of the first leg")
    est.add_argument("--w", required=True, help="frame components t,x of the second leg")
    est.add_argument("--grid-max", dest="grid_max", type=float, default=0.1)
    est.add_argument("--grid-size", dest="grid_size", type=int, default=16)
    est.add_argument("--out")
    est.set_defaults(func=_cmd_curvature)
    four = curv_sub.add_parser("fourpoint")
    four.add_argument("--seps", required=True, help="l12,l13,l14,l23,l24,l34")
    four.add_argument("--K", type=float, default=0.0)
    four.add_argument("--out")
    four.set_defaults(func=_cmd_curvature)

    cone = sub.add_parser("cone", help="cone-isometry residual over sampled pairs")
    cone.add_argument("--space", required=True)
    cone.add_argument("--samples", type=int, default=1000)
    cone.add_argument("--seed", type=int, default=0)
    cone.add_argument("--out")
    cone.set_defaults(func=_cmd_cone)

    cst = sub.add_parser("causet", help="sprinkle / exhaustively check causal sets")
    cst_sub = cst.add_subparsers(dest="mode", required=True)
    spr = cst_sub.add_parser("sprinkle")
    spr.add_argument("--space", required=True)
    spr.add_argument("--region", required=True)
    spr.add_argument("--n", type=int, required=True)
    spr.add_argument("--seed", type=int, default=0)
    spr.add_argument("--out")
    spr.set_defaults(func=_cmd_causet)
    chk = cst_sub.add_parser("check")
    chk.add_argument("--in", dest="infile")
    chk.add_argument("--space")
    chk.add_argument("--region")
    chk.add_argument("--n", type=int, default=30)
    chk.add_argument("--seed", type=int, default=0)
    chk.add_argument("--out")
    chk.set_defaults(func=_cmd_causet)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
