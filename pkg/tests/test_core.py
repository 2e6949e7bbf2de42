"""Slack arithmetic, robust margins, deficits, histograms, serialization."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from lorpto.core import (
    HIST_BINS,
    Event,
    OrderError,
    Relation,
    ScanReport,
    Separations6,
    canonical_json,
    histogram_counts,
    histogram_edges,
    passes_ptolemy,
    ptolemy_slack,
    ptolemy_slack_margin,
    reverse_triangle_deficit,
    slack_scale,
    slack_tolerance,
)
from lorpto.minkowski import MinkowskiSpace

FLAT1 = MinkowskiSpace(1)


def ev(*coords: float) -> Event:
    return Event("minkowski:1", tuple(coords))


seps_values = st.floats(
    min_value=0.0, max_value=1e3, allow_nan=False, allow_infinity=False
)
seps_strategy = st.builds(
    Separations6, seps_values, seps_values, seps_values, seps_values, seps_values, seps_values
)


# ---------------------------------------------------------------------------
# ptolemy_slack


def test_slack_aligned_points_is_exactly_zero():
    assert ptolemy_slack(Separations6(1, 2, 3, 1, 2, 1)) == 0.0


def test_slack_on_unit_hyperbola_chords_vanishes():
    us = (0.0, 1.0, 2.0, 3.0)
    chord = oracles.hyperbola_chord
    s = Separations6(
        l12=chord(1, us[0], us[1]),
        l13=chord(1, us[0], us[2]),
        l14=chord(1, us[0], us[3]),
        l23=chord(1, us[1], us[2]),
        l24=chord(1, us[1], us[3]),
        l34=chord(1, us[2], us[3]),
    )
    assert abs(ptolemy_slack(s)) <= 1e-12


def test_slack_generic_offset_quadruple():
    quad = [(0, 0), (1, 0), (2, 0.5), (3, 0.5)]
    s = Separations6.from_events(FLAT1, *(ev(*p) for p in quad))
    # exact closed-form value, cross-checked against the pure-python route
    assert ptolemy_slack(s) == pytest.approx(0.18826230851010095, abs=1e-15)
    assert ptolemy_slack(s) == pytest.approx(oracles.slack_of_coords(quad), abs=1e-15)
    # the six-digit reference rounding of the same configuration
    rounded = Separations6(1, 1.936492, 2.958040, 0.866025, 1.936492, 1)
    assert ptolemy_slack(rounded) == pytest.approx(0.188257, abs=1e-5)


def test_slack_rejects_non_finite_entries():
    with pytest.raises(ValueError):
        Separations6(1, math.inf, 1, 1, 1, 1)
    with pytest.raises(ValueError):
        Separations6(1, math.nan, 1, 1, 1, 1)
    with pytest.raises(ValueError):
        Separations6(1, -0.5, 1, 1, 1, 1)


@given(seps_strategy, st.floats(min_value=1e-3, max_value=1e3))
def test_slack_rescales_quadratically(s, lam):
    scaled = s.scaled(lam)
    expected = lam * lam * ptolemy_slack(s)
    budget = lam * lam * (s.l13 * s.l24 + s.l12 * s.l34 + s.l14 * s.l23)
    assert abs(ptolemy_slack(scaled) - expected) <= 1e-12 * max(1.0, budget)


@given(seps_strategy)
def test_slack_with_zero_l12_reduces_to_triangle_product_bound(s):
    t = Separations6(0.0, s.l13, s.l14, s.l23, s.l24, s.l34)
    assert ptolemy_slack(t) == t.l13 * t.l24 - t.l14 * t.l23


def test_degenerate_repeated_point_quadruple_has_zero_slack():
    a, b, c = ev(0, 0), ev(1, 0.2), ev(2.5, 0.3)
    s = Separations6.from_events(FLAT1, a, a, b, c)
    assert ptolemy_slack(s) == 0.0


# ---------------------------------------------------------------------------
# ptolemy_slack_margin


@given(seps_strategy)
def test_margin_at_zero_delta_is_bitwise_slack(s):
    assert ptolemy_slack_margin(s, 0.0) == ptolemy_slack(s)


def test_margin_aligned_example():
    m = ptolemy_slack_margin(Separations6(1, 2, 3, 1, 2, 1), 0.1)
    assert m == pytest.approx(0.99, abs=1e-12)
    assert m == (2.1 * 2.1) - (0.9 * 0.9 + 2.9 * 0.9)


def test_margin_clamps_first_product_only():
    s = Separations6(0.05, 2, 3, 1, 2, 1)
    m = ptolemy_slack_margin(s, 0.1)
    # the (l12 - delta) factor clamps to zero; the second product does not
    assert m == (2.1 * 2.1) - (0.0 * 0.9 + 2.9 * 0.9)


def test_margin_rejects_negative_delta():
    with pytest.raises(ValueError):
        ptolemy_slack_margin(Separations6(1, 2, 3, 1, 2, 1), -1e-9)


# ---------------------------------------------------------------------------
# reverse_triangle_deficit


def test_deficit_collinear_is_zero():
    assert reverse_triangle_deficit(FLAT1, ev(0, 0), ev(1, 0), ev(2, 0)) == 0.0


def test_deficit_bent_chain_closed_form():
    d = reverse_triangle_deficit(FLAT1, ev(0, 0), ev(1, 0.5), ev(2, 0))
    assert d == pytest.approx(2.0 - 2.0 * math.sqrt(0.75), abs=1e-14)
    assert d == pytest.approx(0.2679491924311228, abs=1e-14)


def test_deficit_requires_causal_order():
    with pytest.raises(OrderError):
        reverse_triangle_deficit(FLAT1, ev(0, 0), ev(0.2, 5.0), ev(2, 0))
    with pytest.raises(OrderError):
        reverse_triangle_deficit(FLAT1, ev(2, 0), ev(1, 0), ev(0, 0))


@given(
    st.floats(min_value=-0.9, max_value=0.9),
    st.floats(min_value=-0.9, max_value=0.9),
    st.floats(min_value=0.1, max_value=2.0),
    st.floats(min_value=0.1, max_value=2.0),
)
def test_deficit_nonnegative_on_chronological_chains(v1, v2, dt1, dt2):
    x = ev(0, 0)
    y = ev(dt1, v1 * dt1)
    z = ev(dt1 + dt2, v1 * dt1 + v2 * dt2)
    d = reverse_triangle_deficit(FLAT1, x, y, z)
    lxz = FLAT1.time_separation(x, z)
    assert d >= -1e-9 * max(1.0, lxz)


# ---------------------------------------------------------------------------
# tolerances


def test_slack_tolerance_is_absolute_plus_relative():
    assert slack_tolerance(0.0) == 1e-9
    assert slack_tolerance(10.0) == 1e-9 + 1e-9 * 10.0


def test_passes_ptolemy_threshold_behaviour():
    # slack == -(tolerance at scale) passes; slightly below does not
    s_pass = Separations6(0.0, 1.0, 1.0, 1.0 + 2e-9, 1.0, 0.0)
    assert slack_scale(s_pass) == 1.0
    assert ptolemy_slack(s_pass) == pytest.approx(-2e-9, abs=1e-15)
    assert passes_ptolemy(s_pass)
    s_fail = Separations6(0.0, 1.0, 1.0, 1.0 + 5e-9, 1.0, 0.0)
    assert not passes_ptolemy(s_fail)


# ---------------------------------------------------------------------------
# relations


def test_relation_kind_constraints():
    assert Relation.chronological(True).is_causal
    assert Relation.causal(False).is_causal
    assert not Relation.unrelated().is_causal
    with pytest.raises(ValueError):
        Relation("sideways")
    with pytest.raises(ValueError):
        Relation("unrelated", True)


# ---------------------------------------------------------------------------
# histogram + canonical serialization


def test_histogram_covers_all_values_once():
    edges = histogram_edges()
    assert len(edges) == HIST_BINS - 1
    values = np.array([-1e3, -1e-7, -1e-12, 0.0, 1e-12, 1e-7, 1e3, 5.0])
    counts = histogram_counts(values)
    assert counts.shape == (HIST_BINS,)
    assert counts.sum() == len(values)


def test_histogram_separates_signs_around_linear_core():
    edges = histogram_edges()
    neg = histogram_counts(np.array([-0.5]))
    pos = histogram_counts(np.array([0.5]))
    assert np.argmax(neg) < np.searchsorted(edges, 0.0)
    assert np.argmax(pos) >= np.searchsorted(edges, 0.0)


def test_canonical_json_sorts_keys_and_fixes_float_digits():
    doc = {"b": 0.1, "a": [1.0, None, True]}
    out = canonical_json(doc)
    assert out == canonical_json({"a": [1.0, None, True], "b": 0.1})
    assert out.startswith(b'{"a":')
    assert b"0.10000000000000001" in out  # 17 significant digits


def test_scan_report_json_round_trip_is_stable():
    s = Separations6(1, 2, 3, 1, 2, 1)
    rep = ScanReport(
        space="minkowski:1",
        samples=4,
        seed=7,
        delta=0.0,
        min_slack=0.0,
        min_robust_slack=0.0,
        witness_events=((0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0)),
        witness_separations=s,
        histogram_counts=tuple(int(c) for c in histogram_counts(np.zeros(4))),
        violations=0,
        wall_time=0.25,
    )
    assert canonical_json(rep.to_json_dict()) == canonical_json(rep.to_json_dict())
    doc = rep.to_json_dict()
    assert doc["witness_separations"]["l13"] == 2.0
    assert doc["histogram"]["counts"][0] == 0
