"""Flat-space metric, relations, equality-case classifier, samplers."""

import math
import random

import numpy as np
import pytest

import oracles
from lorpto.core import Event, SamplingError
from lorpto.minkowski import (
    HyperbolaSpec,
    MinkowskiSpace,
    cayley_menger_volume2,
    classify_equality_case,
    hyperbola_points,
    hyperbolic_angle,
    hyperbolic_norm,
    minkowski_inner,
    points_from_json,
    points_to_json,
    sample_flat_diamond_rows,
)

FLAT1 = MinkowskiSpace(1)
FLAT3 = MinkowskiSpace(3)


def ev1(*coords: float) -> Event:
    return FLAT1.event(*coords)


# ---------------------------------------------------------------------------
# metric and relations


def test_norm_and_inner_basics():
    assert hyperbolic_norm((2.0, 1.0)) == pytest.approx(math.sqrt(3.0), abs=1e-15)
    assert hyperbolic_norm((2.0, 1.0)) == pytest.approx(1.7320508075688772, abs=1e-15)
    assert hyperbolic_norm((1.0, 1.0)) == 0.0  # null
    assert hyperbolic_norm((0.5, 1.0)) == 0.0  # spacelike clamps to zero
    assert minkowski_inner(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0
    assert minkowski_inner(np.array([2.0, 1.0]), np.array([3.0, -1.0])) == 7.0


def test_relation_cases():
    past = FLAT1.relation(ev1(0, 0), ev1(-1, 0))
    assert past.is_chronological and not past.forward
    same = FLAT1.relation(ev1(1, 2), ev1(1, 2))
    assert same.is_causal and not same.is_chronological and same.forward
    null = FLAT1.relation(ev1(0, 0), ev1(1, 1))
    assert null.is_causal and not null.is_chronological and null.forward
    space = FLAT1.relation(ev1(0, 0), ev1(0.5, 1.0))
    assert not space.is_causal


def test_time_separation_matches_pure_python_route():
    rng = random.Random(5)
    for _ in range(200):
        p = (rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2))
        q = (rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2))
        got = MinkowskiSpace(2).time_separation(
            Event("minkowski:2", p), Event("minkowski:2", q)
        )
        assert got == pytest.approx(oracles.flat_sep(p, q), abs=1e-15)


def test_vectorized_kernels_match_scalar_calls():
    rng = np.random.default_rng(3)
    xs = rng.uniform(-2, 2, size=(64, 4))
    ys = rng.uniform(-2, 2, size=(64, 4))
    seps = FLAT3.vec_time_sep(xs, ys)
    chron = FLAT3.vec_chronological(xs, ys)
    caus = FLAT3.vec_causal(xs, ys)
    for i in range(64):
        a = Event(FLAT3.chart, tuple(xs[i]))
        b = Event(FLAT3.chart, tuple(ys[i]))
        assert seps[i] == FLAT3.time_separation(a, b)
        rel = FLAT3.relation(a, b)
        assert bool(chron[i]) == (rel.is_chronological and rel.forward)
        assert bool(caus[i]) == (rel.is_causal and rel.forward)


def test_boost_invariance_of_separation():
    rng = random.Random(11)
    for _ in range(100):
        p = tuple(rng.uniform(-2, 2) for _ in range(3))
        q = tuple(rng.uniform(-2, 2) for _ in range(3))
        chi = rng.uniform(-1.5, 1.5)
        axis = (rng.uniform(-1, 1), rng.uniform(-1, 1) + 1.5)
        pb = tuple(oracles.boost_point(p, chi, axis))
        qb = tuple(oracles.boost_point(q, chi, axis))
        s = MinkowskiSpace(2)
        before = s.time_separation(Event(s.chart, p), Event(s.chart, q))
        after = s.time_separation(Event(s.chart, pb), Event(s.chart, qb))
        assert after == pytest.approx(before, abs=1e-9 * max(1.0, before))


def test_hyperbolic_angle_closed_form():
    # legs (1,0) and (2,1) from the origin: rapidity artanh(1/2)
    ang = hyperbolic_angle(ev1(0, 0), ev1(1, 0), ev1(2, 1))
    assert ang == pytest.approx(math.atanh(0.5), abs=1e-14)
    assert ang == pytest.approx(0.5493061443340551, abs=1e-12)
    # past-directed pair gives the same angle
    assert hyperbolic_angle(ev1(0, 0), ev1(-1, 0), ev1(-2, -1)) == pytest.approx(
        ang, abs=1e-14
    )
    with pytest.raises(ValueError):
        hyperbolic_angle(ev1(0, 0), ev1(0, 1), ev1(2, 1))
    with pytest.raises(ValueError):
        hyperbolic_angle(ev1(0, 0), ev1(1, 0), ev1(-2, -1))


# ---------------------------------------------------------------------------
# Cayley-Menger coplanarity functional


def test_cayley_menger_pinned_value_and_exact_route():
    squares = (1.0, 3.75, 8.5, 0.75, 3.5, 0.75)
    got = cayley_menger_volume2(squares)
    exact = oracles.cayley_menger_volume2_exact(squares)
    assert float(exact) == pytest.approx(1.0 / 576.0, abs=1e-18)
    assert got == pytest.approx(float(exact), abs=1e-12)
    assert got == pytest.approx(0.0017361111111111032, abs=1e-15)


def test_cayley_menger_matches_exact_fraction_route_randomized():
    rng = random.Random(17)
    for _ in range(50):
        squares = [rng.randrange(0, 64) / 8.0 for _ in range(6)]
        got = cayley_menger_volume2(squares)
        exact = float(oracles.cayley_menger_volume2_exact(squares))
        assert got == pytest.approx(exact, abs=1e-9 * max(1.0, abs(exact)))


def test_cayley_menger_vanishes_for_planar_quadruples():
    quad = [(0.0, 0.0), (1.0, 0.3), (2.0, 0.1), (3.5, 0.2)]
    sq = [v * v for v in oracles.six_seps(quad)]
    assert abs(cayley_menger_volume2(sq)) <= 1e-12


def test_cayley_menger_requires_six_entries():
    with pytest.raises(ValueError):
        cayley_menger_volume2((1.0, 2.0, 3.0))


# ---------------------------------------------------------------------------
# hyperbola machinery and the equality-case classifier


def make_hyperbola(a=1.0, center=(0.0, 0.0), branch=1):
    return HyperbolaSpec(
        a=a,
        center=Event("minkowski:1", tuple(center)),
        branch=branch,
        e_t=(1.0, 0.0),
        e_x=(0.0, 1.0),
    )


def test_hyperbola_points_match_parametrization():
    h = make_hyperbola(a=2.0, center=(0.5, -0.25))
    params = [-1.0, 0.0, 0.7, 2.0]
    pts = hyperbola_points(h, params)
    for u, p in zip(params, pts):
        expect = oracles.hyperbola_coords(2.0, (0.5, -0.25), [u])[0]
        assert p.coords == pytest.approx(expect, abs=1e-14)


def test_hyperbola_chords_match_sinh_formula():
    h = make_hyperbola(a=1.0)
    pts = hyperbola_points(h, [0.0, 1.0, 2.0, 3.0])
    got = FLAT1.time_separation(pts[0], pts[2])
    assert got == pytest.approx(oracles.hyperbola_chord(1.0, 0.0, 2.0), abs=1e-12)
    assert got == pytest.approx(2.3504023872876036, abs=1e-12)


def test_hyperbola_spec_validates_frame():
    with pytest.raises(ValueError):
        make_hyperbola(a=-1.0)
    with pytest.raises(ValueError):
        HyperbolaSpec(1.0, ev1(0, 0), 2, (1.0, 0.0), (0.0, 1.0))
    with pytest.raises(ValueError):
        HyperbolaSpec(1.0, ev1(0, 0), 1, (0.0, 1.0), (1.0, 0.0))
    with pytest.raises(ValueError):
        HyperbolaSpec(1.0, ev1(0, 0), 1, (-1.0, 0.0), (0.0, 1.0))


def test_classifier_labels_canonical_configurations():
    line = [ev1(0, 0), ev1(1, 0.25), ev1(2, 0.5), ev1(3, 0.75)]
    assert classify_equality_case(line) == "timelike_line"

    h = make_hyperbola(a=1.5, center=(0.3, 0.2))
    hyp = hyperbola_points(h, [-0.5, 0.1, 0.9, 1.4])
    assert classify_equality_case(hyp) == "rectangular_hyperbola"

    nullish = [ev1(0, 0), ev1(1, 1), ev1(2, 2), ev1(3, 2.5)]
    assert classify_equality_case(nullish) == "null_aligned"

    a = ev1(0, 0)
    assert classify_equality_case([a, a, ev1(1, 0.2), ev1(2.5, 0.3)]) == "coincident"

    generic = [ev1(0, 0), ev1(1, 0), ev1(2, 0.5), ev1(3, 0.5)]
    assert classify_equality_case(generic) == "generic"

    with pytest.raises(ValueError):
        classify_equality_case([ev1(0, 0), ev1(0.5, 3.0), ev1(2, 0), ev1(3, 0)])


def test_classifier_is_isometry_invariant():
    rng = random.Random(23)
    h = make_hyperbola(a=0.8, center=(-0.4, 0.6))
    hyp = hyperbola_points(h, [-1.2, -0.3, 0.4, 1.1])
    line = [ev1(0, 0), ev1(1, -0.3), ev1(2, -0.6), ev1(3, -0.9)]
    for _ in range(20):
        iso = oracles.random_isometry(rng, 1)
        moved_h = [Event("minkowski:1", iso(p.coords)) for p in hyp]
        moved_l = [Event("minkowski:1", iso(p.coords)) for p in line]
        assert classify_equality_case(moved_h) == "rectangular_hyperbola"
        assert classify_equality_case(moved_l) == "timelike_line"


def test_classifier_handles_higher_dimensional_hyperbola():
    # same plane embedded in R^{1,3} via a boosted-and-rotated frame
    chi = 0.4
    e_t = (math.cosh(chi), math.sinh(chi) * 0.6, math.sinh(chi) * 0.8, 0.0)
    e_x = (math.sinh(chi), math.cosh(chi) * 0.6, math.cosh(chi) * 0.8, 0.0)
    h = HyperbolaSpec(1.2, Event("minkowski:3", (0.1, 0.0, -0.2, 0.3)), 1, e_t, e_x)
    pts = hyperbola_points(h, [-0.8, 0.0, 0.6, 1.5])
    assert classify_equality_case(pts) == "rectangular_hyperbola"


# ---------------------------------------------------------------------------
# diamond sampler


def test_diamond_sampler_membership_and_determinism():
    rows = sample_flat_diamond_rows(
        FLAT3, (0.0, 0, 0, 0), (2.0, 0, 0, 0), np.random.default_rng(9), 512
    )
    assert rows.shape == (512, 4)
    a = np.broadcast_to(np.array([0.0, 0, 0, 0]), rows.shape)
    b = np.broadcast_to(np.array([2.0, 0, 0, 0]), rows.shape)
    assert FLAT3.vec_chronological(a, rows).all()
    assert FLAT3.vec_chronological(rows, b).all()
    again = sample_flat_diamond_rows(
        FLAT3, (0.0, 0, 0, 0), (2.0, 0, 0, 0), np.random.default_rng(9), 512
    )
    assert np.array_equal(rows, again)


def test_diamond_sampler_rejects_empty_region():
    with pytest.raises(ValueError):
        sample_flat_diamond_rows(
            FLAT1, (0.0, 0.0), (1.0, 2.0), np.random.default_rng(0), 4
        )
    with pytest.raises(ValueError):
        sample_flat_diamond_rows(
            FLAT1, (0.0, 0.0), (1.0,), np.random.default_rng(0), 4
        )


def test_diamond_sampler_raises_when_budget_exhausted():
    # one batch caps at 65536 candidate rows, so 70000 cannot be filled
    with pytest.raises(SamplingError):
        sample_flat_diamond_rows(
            FLAT1, (0.0, 0.0), (1.0, 0.0), np.random.default_rng(1), 70000,
            max_batches=1,
        )


# ---------------------------------------------------------------------------
# JSON round trip


def test_points_json_round_trip():
    pts = [ev1(0, 0), ev1(1.5, -0.25)]
    doc = points_to_json(FLAT1, pts)
    space, back = points_from_json(doc)
    assert space.chart == FLAT1.chart
    assert [p.coords for p in back] == [p.coords for p in pts]
    with pytest.raises(ValueError):
        points_from_json({"chart": "polar", "K": 1.0, "points": []})
