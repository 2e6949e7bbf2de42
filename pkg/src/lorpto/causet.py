"""Finite causal sets as a discrete backend.

A causal set stores a DAG (a set of order relations on n elements), an
optional coordinate row per element tied to a continuous backend, and
one of three separation modes:

- ``ambient_restricted``: l(i, j) is the ambient backend separation of
  the coordinate rows (the restriction of a continuous space to a
  finite subset);
- ``longest_path``: l(i, j) is the maximum weight sum over order chains
  from i to j, computed as a max-plus fixpoint so the reverse triangle
  inequality holds exactly for the stored floats;
- ``raw_table``: a user-supplied table with no axioms assumed (scanner
  testing only; reports are flagged).

The exhaustive scanner enumerates every ordered quadruple
i <= j << k <= l (repeats allowed at the causal ends) and aggregates
Ptolemy slack, witness, histogram, and violation counts, vectorized
over (i, l) blocks for each middle pair (j, k).
"""

from __future__ import annotations

import heapq
import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np

from .core import (
    HIST_BINS,
    Separations6,
    ScanReport,
    TOL_ABS,
    TOL_REL,
    histogram_counts,
    timed,
)
from .modelspaces import sample_region_rows, space_for_chart, time_order_key

__all__ = [
    "CausalSet",
    "sprinkle",
    "causet_from_points",
    "longest_path_ell",
    "exhaustive_ptolemy",
    "causet_to_json",
    "causet_from_json",
]

_ELL_MODES = ("ambient_restricted", "longest_path", "raw_table")


class CausalSet:
    """A finite partially ordered set with a separation table."""

    def __init__(
        self,
        n: int,
        edges: Sequence[tuple[int, int]],
        *,
        coords: np.ndarray | None = None,
        space=None,
        ell_mode: str = "longest_path",
        weights: Sequence[float] | None = None,
        raw_table: np.ndarray | None = None,
    ) -> None:
        if n < 1:
            raise ValueError("a causal set needs at least one element")
        if ell_mode not in _ELL_MODES:
            raise ValueError(f"unknown ell_mode {ell_mode!r}")
        self.n = int(n)
        self.edges = tuple((int(i), int(j)) for i, j in edges)
        for i, j in self.edges:
            if not (0 <= i < n and 0 <= j < n) or i == j:
                raise ValueError(f"bad relation ({i}, {j})")
        self.coords = None if coords is None else np.asarray(coords, dtype=float)
        self.space = space
        self.ell_mode = ell_mode
        self.weights = None if weights is None else tuple(float(w) for w in weights)
        if self.weights is not None:
            if len(self.weights) != len(self.edges):
                raise ValueError("weights must align with the relation list")
            if any(w < 0.0 for w in self.weights):
                raise ValueError("edge weights must be >= 0")
        self.raw_table = None if raw_table is None else np.asarray(raw_table, float)
        if ell_mode == "ambient_restricted" and (self.coords is None or space is None):
            raise ValueError("ambient_restricted mode needs coords and a backend space")
        if ell_mode == "longest_path" and self.weights is None:
            raise ValueError("longest_path mode needs edge weights")
        if ell_mode == "raw_table":
            if self.raw_table is None or self.raw_table.shape != (n, n):
                raise ValueError("raw_table mode needs an n-by-n table")
        self._topo = self._toposort()
        self._closure: np.ndarray | None = None
        self._table: np.ndarray | None = None

    # -- order structure -----------------------------------------------------

    def _toposort(self) -> tuple[int, ...]:
        indeg = [0] * self.n
        children: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in self.edges:
            children[i].append(j)
            indeg[j] += 1
        ready = sorted(i for i in range(self.n) if indeg[i] == 0)
        order: list[int] = []
        heapq.heapify(ready)
        while ready:
            u = heapq.heappop(ready)
            order.append(u)
            for v in children[u]:
                indeg[v] -= 1
                if indeg[v] == 0:
                    heapq.heappush(ready, v)
        if len(order) != self.n:
            raise ValueError("relation graph contains a cycle")
        return tuple(order)

    @property
    def topo_order(self) -> tuple[int, ...]:
        return self._topo

    def closure(self) -> np.ndarray:
        """Strict transitive closure as a boolean matrix (idempotent)."""
        if self._closure is None:
            above = [0] * self.n  # bitmask of strictly-above elements
            children: list[list[int]] = [[] for _ in range(self.n)]
            for i, j in self.edges:
                children[i].append(j)
            for u in reversed(self._topo):
                acc = 0
                for v in children[u]:
                    acc |= above[v] | (1 << v)
                above[u] = acc
            mat = np.zeros((self.n, self.n), dtype=bool)
            for i in range(self.n):
                bits = above[i]
                while bits:
                    low = bits & -bits
                    mat[i, low.bit_length() - 1] = True
                    bits ^= low
            self._closure = mat
        return self._closure

    def transitive_reduction(self) -> tuple[tuple[int, int], ...]:
        """The minimal edge set generating the same order."""
        c = self.closure()
        above = [int(sum(1 << j for j in np.flatnonzero(c[i]))) for i in range(self.n)]
        below = [int(sum(1 << i for i in np.flatnonzero(c[:, j]))) for j in range(self.n)]
        out = []
        for i in range(self.n):
            for j in np.flatnonzero(c[i]):
                if (above[i] & below[j]) == 0:
                    out.append((i, int(j)))
        return tuple(sorted(out))

    # -- separation table ----------------------------------------------------

    def ell_table(self) -> np.ndarray:
        """The n-by-n separation table for this set's ell_mode."""
        if self._table is None:
            if self.ell_mode == "raw_table":
                self._table = self.raw_table
            elif self.ell_mode == "ambient_restricted":
                t = np.zeros((self.n, self.n))
                for i in range(self.n):
                    row = np.broadcast_to(self.coords[i], self.coords.shape)
                    t[i, :] = self.space.vec_time_sep(row, self.coords)
                np.fill_diagonal(t, 0.0)
                self._table = t
            else:
                self._table = longest_path_ell(self)
        return self._table


def longest_path_ell(cs: CausalSet) -> np.ndarray:
    """Maximum chain weight sums, as a max-plus fixpoint.

    l(i, j) = max over order chains i -> ... -> j of the edge weight
    sum, 0 when j is not above i.  Iterating W = max(W, W_ij + W_jk)
    to a fixpoint guarantees the reverse triangle inequality holds
    exactly (not merely to rounding) for the values stored.
    """
    if cs.weights is None:
        raise ValueError("longest-path separations need edge weights")
    n = cs.n
    W = np.full((n, n), -np.inf)
    np.fill_diagonal(W, 0.0)
    for (i, j), w in zip(cs.edges, cs.weights):
        if w > W[i, j]:
            W[i, j] = w
    for _ in range(n + 1):
        changed = False
        for j in cs.topo_order:
            cand = W[:, j : j + 1] + W[j : j + 1, :]
            upd = cand > W
            if upd.any():
                W[upd] = cand[upd]
                changed = True
        if not changed:
            break
    else:
        raise RuntimeError("longest-path fixpoint failed to converge")
    out = np.where(np.isfinite(W), W, 0.0)
    np.fill_diagonal(out, 0.0)
    return out


# --------------------------------------------------------------------------
# Construction from continuous backends.


def _order_from_rows(space, rows: np.ndarray) -> tuple[np.ndarray, list[tuple[int, int]], list[float]]:
    """Sort rows by time, build the causal closure, reduce, weigh edges."""
    n = rows.shape[0]
    key = time_order_key(space, rows)
    rows = rows[np.argsort(key, kind="stable")]
    closure = np.zeros((n, n), dtype=bool)
    for i in range(n - 1):
        tail = rows[i + 1 :]
        head = np.broadcast_to(rows[i], tail.shape)
        closure[i, i + 1 :] = space.vec_causal(head, tail)
    above = [int(sum(1 << j for j in np.flatnonzero(closure[i]))) for i in range(n)]
    below = [int(sum(1 << i for i in np.flatnonzero(closure[:, j]))) for j in range(n)]
    edges: list[tuple[int, int]] = []
    for i in range(n):
        for j in np.flatnonzero(closure[i]):
            if (above[i] & below[int(j)]) == 0:
                edges.append((i, int(j)))
    edges.sort()
    if edges:
        heads = rows[[i for i, _ in edges]]
        tails = rows[[j for _, j in edges]]
        weights = [float(w) for w in space.vec_time_sep(heads, tails)]
    else:
        weights = []
    return rows, edges, weights


def sprinkle(space, region: tuple[Sequence[float], Sequence[float]], n: int, seed: int) -> CausalSet:
    """Sprinkle n uniform points into a diamond region of a backend space.

    Points are sampled by rejection in the region's bounding box, sorted
    by the chart time coordinate, and related by the ambient causal
    relation; ell_mode is ambient_restricted and edge weights default to
    the ambient separations of the reduction edges.  Deterministic for a
    fixed seed.
    """
    if n < 1:
        raise ValueError("sprinkle needs n >= 1")
    corner_a, corner_b = region
    rng = np.random.default_rng(np.random.PCG64(int(seed)))
    rows = sample_region_rows(space, corner_a, corner_b, rng, n)
    rows, edges, weights = _order_from_rows(space, rows)
    return CausalSet(
        n,
        edges,
        coords=rows,
        space=space,
        ell_mode="ambient_restricted",
        weights=weights,
    )


def causet_from_points(space, points: Sequence) -> CausalSet:
    """Ambient-restricted causal set over an explicit point list."""
    rows = np.asarray(
        [p.vec if hasattr(p, "vec") else np.asarray(p, float) for p in points], float
    )
    if rows.ndim != 2 or rows.shape[0] < 1:
        raise ValueError("need at least one point")
    rows, edges, weights = _order_from_rows(space, rows)
    return CausalSet(
        rows.shape[0],
        edges,
        coords=rows,
        space=space,
        ell_mode="ambient_restricted",
        weights=weights,
    )


# --------------------------------------------------------------------------
# Exhaustive quadruple scan.


def _scan_j_range(
    cs: CausalSet,
    T: np.ndarray,
    below_idx: list[np.ndarray],
    above_idx: list[np.ndarray],
    j_values: Sequence[int],
) -> tuple[int, int, np.ndarray, float, tuple[int, int, int, int] | None]:
    count = 0
    violations = 0
    hist = np.zeros(HIST_BINS, dtype=np.int64)
    best = math.inf
    best_quad: tuple[int, int, int, int] | None = None
    n = cs.n
    for j in j_values:
        I = below_idx[j]
        row_j = T[j]
        for k in range(n):
            if row_j[k] <= 0.0:
                continue
            L = above_idx[k]
            col_ik = T[I, k]
            row_jl = row_j[L]
            col_ij = T[I, j]
            row_kl = T[k, L]
            block_il = T[np.ix_(I, L)]
            prod = np.outer(col_ik, row_jl)
            slack = prod - np.outer(col_ij, row_kl) - row_j[k] * block_il
            count += slack.size
            violations += int((slack < -(TOL_ABS + TOL_REL * prod)).sum())
            hist += histogram_counts(slack.ravel())
            flat_pos = int(np.argmin(slack))
            val = float(slack.flat[flat_pos])
            quad = (
                int(I[flat_pos // len(L)]),
                j,
                k,
                int(L[flat_pos % len(L)]),
            )
            if val < best or (val == best and (best_quad is None or quad < best_quad)):
                best = val
                best_quad = quad
    return count, violations, hist, best, best_quad


def exhaustive_ptolemy(cs: CausalSet, threads: int | None = None) -> ScanReport:
    """Scan every ordered quadruple i <= j << k <= l for Ptolemy slack.

    The ends are causal-or-equal (repeats allowed), the middle pair
    strictly chronological (positive separation).  Returns a ScanReport
    whose min_slack is bit-for-bit the slack of the reported witness;
    the report is byte-identical for a fixed input regardless of the
    thread count (partial results merge by total-order reductions).
    """
    t0 = timed()
    T = cs.ell_table()
    closure = cs.closure()
    eq = closure | np.eye(cs.n, dtype=bool)
    below_idx = [np.flatnonzero(eq[:, j]) for j in range(cs.n)]
    above_idx = [np.flatnonzero(eq[k, :]) for k in range(cs.n)]

    if threads is None:
        threads = int(os.environ.get("LORPTO_THREADS", "1"))
    threads = max(1, min(threads, cs.n))
    j_chunks = [list(range(cs.n))[w::threads] for w in range(threads)]
    if threads == 1:
        parts = [_scan_j_range(cs, T, below_idx, above_idx, j_chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(
                pool.map(
                    lambda js: _scan_j_range(cs, T, below_idx, above_idx, js),
                    j_chunks,
                )
            )

    count = sum(p[0] for p in parts)
    violations = sum(p[1] for p in parts)
    hist = np.sum([p[2] for p in parts], axis=0) if parts else np.zeros(HIST_BINS, np.int64)
    best = math.inf
    best_quad: tuple[int, int, int, int] | None = None
    for _, _, _, val, quad in parts:
        if quad is None:
            continue
        if val < best or (val == best and (best_quad is None or quad < best_quad)):
            best = val
            best_quad = quad

    flags = ["exhaustive"]
    if cs.ell_mode == "raw_table":
        flags.append("raw_table")
    space_name = "causet"
    if cs.space is not None:
        space_name = f"causet:{cs.space.chart}"

    if best_quad is None:
        witness_events = None
        witness_seps = None
        min_slack = 0.0
    else:
        i, j, k, l = best_quad
        if cs.coords is not None:
            witness_events = tuple(tuple(float(c) for c in cs.coords[m]) for m in best_quad)
        else:
            witness_events = tuple((float(m),) for m in best_quad)
        witness_seps = Separations6(
            l12=float(T[i, j]),
            l13=float(T[i, k]),
            l14=float(T[i, l]),
            l23=float(T[j, k]),
            l24=float(T[j, l]),
            l34=float(T[k, l]),
        )
        min_slack = float(best)

    return ScanReport(
        space=space_name,
        samples=int(count),
        seed=0,
        delta=0.0,
        min_slack=min_slack,
        min_robust_slack=min_slack,
        witness_events=witness_events,
        witness_separations=witness_seps,
        histogram_counts=tuple(int(c) for c in hist),
        violations=int(violations),
        wall_time=timed() - t0,
        flags=tuple(flags),
    )


# --------------------------------------------------------------------------
# JSON round trip.


def causet_to_json(cs: CausalSet) -> dict:
    return {
        "n": cs.n,
        "relations": [list(e) for e in cs.edges],
        "coords": None if cs.coords is None else [list(map(float, r)) for r in cs.coords],
        "weights": None if cs.weights is None else list(cs.weights),
        "ell_table": (
            None
            if cs.raw_table is None
            else [float(v) for v in np.asarray(cs.raw_table).ravel()]
        ),
        "space": None if cs.space is None else cs.space.chart,
        "ell_mode": cs.ell_mode,
    }


def causet_from_json(doc: dict) -> CausalSet:
    n = int(doc["n"])
    edges = [(int(i), int(j)) for i, j in doc.get("relations", [])]
    coords = doc.get("coords")
    weights = doc.get("weights")
    table = doc.get("ell_table")
    space = None
    if doc.get("space"):
        space = space_for_chart(doc["space"])
    ell_mode = doc.get("ell_mode")
    if ell_mode is None:
        if table is not None:
            ell_mode = "raw_table"
        elif coords is not None and space is not None:
            ell_mode = "ambient_restricted"
        else:
            ell_mode = "longest_path"
    return CausalSet(
        n,
        edges,
        coords=None if coords is None else np.asarray(coords, float),
        space=space,
        ell_mode=ell_mode,
        weights=weights,
        raw_table=None if table is None else np.asarray(table, float).reshape(n, n),
    )
