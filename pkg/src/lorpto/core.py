"""Shared space abstraction and Ptolemy-slack arithmetic.

Every backend space exposes two methods: ``time_separation(x, y)`` (the
supremal proper time between causally related events, 0 for unrelated
pairs) and ``relation(x, y)`` (causal classification).  On top of that
this module provides the quadruple bookkeeping: the six separations of an
ordered quadruple, the Ptolemy slack

    slack = l13*l24 - (l12*l34 + l14*l23),

its delta-robust variant, and the reverse-triangle deficit.  All
functions here are pure; all types are frozen dataclasses.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np

__all__ = [
    "TOL_ABS",
    "TOL_REL",
    "Event",
    "Relation",
    "Separations6",
    "PtolemyVerdict",
    "ScanReport",
    "Space",
    "OrderError",
    "NotTimelikeRelated",
    "OracleError",
    "SamplingError",
    "ptolemy_slack",
    "ptolemy_slack_margin",
    "slack_scale",
    "slack_tolerance",
    "passes_ptolemy",
    "reverse_triangle_deficit",
    "histogram_edges",
    "histogram_counts",
    "canonical_json",
]

# Absolute and relative parts of the slack pass tolerance: a quadruple
# passes iff slack >= -(TOL_ABS + TOL_REL * l13*l24).  Products of
# separations amplify rounding, hence the relative term.
TOL_ABS = 1e-9
TOL_REL = 1e-9


class OrderError(ValueError):
    """Points handed to an operation are not in the required causal order."""


class NotTimelikeRelated(ValueError):
    """A triangle/hinge closure leaves the timelike-related domain."""


class OracleError(RuntimeError):
    """A numerical oracle (quadrature/root solve) failed to converge."""


class SamplingError(RuntimeError):
    """Rejection sampling exhausted its attempt budget."""


@dataclass(frozen=True)
class Event:
    """A point of some backend space.

    ``chart`` identifies the backend and chart ("minkowski:2",
    "model:-1", "causet", ...); ``coords`` is the coordinate tuple whose
    length the chart dictates (n+1 for flat space, 3 for the quadric
    models, a single index for causal-set elements).
    """

    chart: str
    coords: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coords", tuple(float(c) for c in self.coords))

    @property
    def vec(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)


@dataclass(frozen=True)
class Relation:
    """Causal classification of an ordered pair.

    ``kind`` is one of "unrelated", "causal", "chronological"
    (chronological implies causal); ``forward`` is True when the second
    argument lies in the causal future of the first.  Relatedness is
    carried by this type, never by a numeric sentinel.
    """

    kind: str
    forward: bool = False

    _KINDS = ("unrelated", "causal", "chronological")

    def __post_init__(self) -> None:
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown relation kind {self.kind!r}")
        if self.kind == "unrelated" and self.forward:
            raise ValueError("unrelated pairs cannot be forward-related")

    @property
    def is_causal(self) -> bool:
        return self.kind in ("causal", "chronological")

    @property
    def is_chronological(self) -> bool:
        return self.kind == "chronological"

    @staticmethod
    def unrelated() -> "Relation":
        return Relation("unrelated", False)

    @staticmethod
    def causal(forward: bool = True) -> "Relation":
        return Relation("causal", forward)

    @staticmethod
    def chronological(forward: bool = True) -> "Relation":
        return Relation("chronological", forward)


@runtime_checkable
class Space(Protocol):
    """Minimal backend interface used by the generic machinery."""

    chart: str

    def time_separation(self, x: Event, y: Event) -> float: ...

    def relation(self, x: Event, y: Event) -> Relation: ...


@dataclass(frozen=True)
class Separations6:
    """The six separations of an ordered quadruple (x1, x2, x3, x4).

    Field order is fixed everywhere (types, CSV columns, JSON keys):
    l12, l13, l14, l23, l24, l34.
    """

    l12: float
    l13: float
    l14: float
    l23: float
    l24: float
    l34: float

    def __post_init__(self) -> None:
        for name, value in self.as_dict().items():
            if not math.isfinite(value) or value < 0.0:
                raise ValueError(
                    f"separation {name} must be finite and non-negative, got {value!r}"
                )

    def as_tuple(self) -> tuple[float, float, float, float, float, float]:
        return (self.l12, self.l13, self.l14, self.l23, self.l24, self.l34)

    def as_dict(self) -> dict[str, float]:
        return {
            "l12": self.l12,
            "l13": self.l13,
            "l14": self.l14,
            "l23": self.l23,
            "l24": self.l24,
            "l34": self.l34,
        }

    def scaled(self, lam: float) -> "Separations6":
        return Separations6(*(lam * v for v in self.as_tuple()))

    @classmethod
    def from_events(
        cls, space: Space, x: Event, y: Event, z: Event, w: Event
    ) -> "Separations6":
        sep = space.time_separation
        return cls(
            l12=sep(x, y),
            l13=sep(x, z),
            l14=sep(x, w),
            l23=sep(y, z),
            l24=sep(y, w),
            l34=sep(z, w),
        )


@dataclass(frozen=True)
class PtolemyVerdict:
    """Slack, robust slack, and (optionally) the quadruple that produced them."""

    slack: float
    robust_slack: float
    witness: tuple[Event, Event, Event, Event] | None = None


def ptolemy_slack(s: Separations6) -> float:
    """The Ptolemy slack l13*l24 - (l12*l34 + l14*l23).

    Non-negative slack means the quadruple satisfies the Ptolemy
    inequality.  Degenerate quadruples with repeated points are accepted
    and give slack >= 0, with equality when two points coincide.
    """
    return s.l13 * s.l24 - (s.l12 * s.l34 + s.l14 * s.l23)


def ptolemy_slack_margin(s: Separations6, delta: float) -> float:
    """Delta-robust slack: (l13+d)(l24+d) - [(l12-d)+ (l34-d)+ + (l14-d)(l23-d)].

    ``(A)+`` is the positive part max(A, 0); only the first subtracted
    product is clamped.  A negative value certifies a violation that is
    stable under delta-perturbations of the separations.  At delta = 0
    this is bit-for-bit equal to :func:`ptolemy_slack`.
    """
    if not (delta >= 0.0):
        raise ValueError(f"delta must be >= 0, got {delta!r}")
    return (s.l13 + delta) * (s.l24 + delta) - (
        max(s.l12 - delta, 0.0) * max(s.l34 - delta, 0.0)
        + (s.l14 - delta) * (s.l23 - delta)
    )


def slack_scale(s: Separations6) -> float:
    """The natural scale of a slack value: the product l13*l24."""
    return s.l13 * s.l24


def slack_tolerance(scale: float) -> float:
    """Pass tolerance for a slack at the given scale."""
    return TOL_ABS + TOL_REL * scale


def passes_ptolemy(s: Separations6) -> bool:
    """True iff the slack clears the absolute-plus-relative tolerance."""
    return ptolemy_slack(s) >= -slack_tolerance(slack_scale(s))


def reverse_triangle_deficit(space: Space, x: Event, y: Event, z: Event) -> float:
    """l(x,z) - l(x,y) - l(y,z) for a causal chain x <= y <= z.

    Must be >= 0 (up to rounding) in every Lorentzian pre-length space.
    Raises :class:`OrderError` when the points are not causally ordered.
    """
    for a, b, label in ((x, y, "x <= y"), (y, z, "y <= z")):
        rel = space.relation(a, b)
        if not (rel.is_causal and rel.forward):
            raise OrderError(f"points are not in causal order ({label} fails)")
    sep = space.time_separation
    return sep(x, z) - (sep(x, y) + sep(y, z))


# --------------------------------------------------------------------------
# Scan reports (shared by the causet scanner and the CLI scan engine).

_HIST_NEG_DECADES = 10  # bins at or below -1e-6, log-spaced down to -1e3 and beyond
_HIST_POS_DECADES = 10
_HIST_LINEAR = 44  # uniform bins on (-1e-6, 1e-6)
HIST_BINS = _HIST_NEG_DECADES + _HIST_LINEAR + _HIST_POS_DECADES  # 64


def histogram_edges() -> np.ndarray:
    """The 63 finite bin boundaries of the fixed 64-bin slack histogram.

    Bin 0 is (-inf, -1e3]; bins 1..9 walk up decade boundaries to -1e-6;
    bins 10..53 are 44 uniform bins on (-1e-6, 1e-6]; bins 54..62 walk up
    decades to 1e3; bin 63 is (1e3, inf).  Violations cluster near zero,
    hence the linear core inside the symmetric log scale.
    """
    neg = [-(10.0 ** (3 - k)) for k in range(_HIST_NEG_DECADES)]  # -1e3 .. -1e-6
    lin = [
        -1e-6 + k * (2e-6 / _HIST_LINEAR) for k in range(1, _HIST_LINEAR + 1)
    ]  # .. +1e-6
    pos = [10.0 ** (-5 + k) for k in range(_HIST_POS_DECADES - 1)]  # 1e-5 .. 1e3
    return np.asarray(neg + lin + pos, dtype=float)


_HIST_EDGES = histogram_edges()


def histogram_counts(values: np.ndarray) -> np.ndarray:
    """Bin slack values into the fixed 64-bin histogram."""
    idx = np.searchsorted(_HIST_EDGES, np.asarray(values, dtype=float), side="left")
    return np.bincount(idx, minlength=HIST_BINS).astype(np.int64)


@dataclass(frozen=True)
class ScanReport:
    """Aggregate result of a quadruple scan.

    ``min_slack`` always equals ``ptolemy_slack(witness_separations)``
    bit-for-bit; ``violations`` counts samples whose slack fell below the
    absolute-plus-relative tolerance at their own scale.  ``wall_time``
    is serialized but excluded from determinism comparisons (it is the
    single non-reproducible field).
    """

    space: str
    samples: int
    seed: int
    delta: float
    min_slack: float
    min_robust_slack: float
    witness_events: tuple[tuple[float, ...], ...] | None
    witness_separations: Separations6 | None
    histogram_counts: tuple[int, ...]
    violations: int
    wall_time: float
    flags: tuple[str, ...] = ()

    def to_json_dict(self) -> dict:
        return {
            "space": self.space,
            "samples": self.samples,
            "seed": self.seed,
            "delta": self.delta,
            "min_slack": self.min_slack,
            "min_robust_slack": self.min_robust_slack,
            "witness_events": (
                None
                if self.witness_events is None
                else [list(e) for e in self.witness_events]
            ),
            "witness_separations": (
                None
                if self.witness_separations is None
                else self.witness_separations.as_dict()
            ),
            "histogram": {
                "edges": [float(e) for e in _HIST_EDGES],
                "counts": list(self.histogram_counts),
            },
            "violations": self.violations,
            "wall_time": self.wall_time,
            "flags": list(self.flags),
        }


# --------------------------------------------------------------------------
# Canonical serialization: sorted keys, 17-significant-digit floats, so a
# fixed report is byte-identical across runs and platforms.


def _canonical_fragments(obj, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, str):
        import json

        out.append(json.dumps(obj))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            raise ValueError(f"cannot canonically serialize non-finite float {v!r}")
        out.append(format(v, ".17g"))
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if not isinstance(key, str):
                raise TypeError("canonical JSON keys must be strings")
            if i:
                out.append(",")
            _canonical_fragments(key, out)
            out.append(":")
            _canonical_fragments(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _canonical_fragments(item, out)
        out.append("]")
    else:
        raise TypeError(f"cannot canonically serialize {type(obj).__name__}")


def canonical_json(obj) -> bytes:
    """Serialize to canonical JSON bytes (sorted keys, '%.17g' floats)."""
    out: list[str] = []
    _canonical_fragments(obj, out)
    return "".join(out).encode("utf-8")


def timed() -> float:
    return time.perf_counter()
