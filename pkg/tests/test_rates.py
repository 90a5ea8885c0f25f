"""Per-event gains, error rates, and the asymptotic key rate.

The frozen chain below was evaluated with an independent script using
mpmath-style expanded expressions before the module existed; agreement
is required to 1e-12 relative.
"""

import math

import pytest
from hypothesis import given, settings, strategies as st

from dualqss.detectors import SystemParams
from dualqss.rates import (
    QBER_THRESHOLD_EVENT23_REPORTED,
    at_distance,
    at_intensity,
    event1_rates,
    event2_rates,
    event3_rates,
    key_rate,
    plob_bound,
    qber_threshold_event1,
)

SP_084_400 = SystemParams(mu=0.84, l_km=400.0)


def test_event1_chain_frozen():
    e1 = event1_rates(SP_084_400)
    assert e1.q == pytest.approx(1.2339770614410125e-05, rel=1e-12)
    assert e1.e_bit == pytest.approx(0.006482943202427557, rel=1e-12)
    assert e1.e_ph == pytest.approx(0.00648895420357228, rel=1e-12)


def test_event2_chain_frozen():
    e2 = event2_rates(SP_084_400)
    assert e2.q == pytest.approx(7.613684844236297e-11, rel=1e-12)
    assert e2.e_bit == pytest.approx(0.009682386251075434, rel=1e-12)
    assert e2.e_ph == pytest.approx(0.012848661336826312, rel=1e-12)


def test_event3_equals_event2():
    # mirror-image detector patterns: identical statistics
    e2 = event2_rates(SP_084_400)
    e3 = event3_rates(SP_084_400)
    assert e3.q == pytest.approx(e2.q, rel=1e-14)
    assert e3.e_bit == pytest.approx(e2.e_bit, rel=1e-14)
    assert e3.e_ph == pytest.approx(e2.e_ph, rel=1e-14)


def test_key_rate_frozen():
    point = key_rate(SP_084_400)
    assert point.i_e == pytest.approx(0.6500633068148931, rel=1e-12)
    assert point.r == pytest.approx(2.820032606068101e-06, rel=1e-12)
    assert point.r == pytest.approx(sum(point.r_events), rel=1e-12)
    assert point.l_km == 400.0
    assert point.mu == 0.84


def test_key_rate_second_point_frozen():
    point = key_rate(SystemParams(mu=1.5, l_km=400.0))
    assert point.r == pytest.approx(1.980506672580578e-06, rel=1e-12)


def test_event1_phase_error_without_darks():
    # with p_d=0 the phase error is the even-photon fraction of clicks
    sp = SystemParams(mu=0.84, l_km=100.0, p_d=0.0)
    i = sp.mu_arm
    expected = (math.cosh(i) - 1.0) / (math.exp(i) - 1.0)
    assert event1_rates(sp).e_ph == pytest.approx(expected, rel=1e-12)
    assert event1_rates(sp).e_bit == 0.0


def test_gain_positive_and_small():
    for l_km in (0.0, 100.0, 300.0):
        e1 = event1_rates(SystemParams(mu=0.84, l_km=l_km))
        assert 0.0 < e1.q < 1.0


def test_rate_unimodal_in_distance():
    # short links still pay a large even-photon phase-error penalty, so
    # the curve rises for the first ~19 km before decaying to death
    rising = [key_rate(SystemParams(mu=0.84, l_km=float(l))).r for l in range(0, 11)]
    for a, b in zip(rising, rising[1:]):
        assert b > a
    falling = [key_rate(SystemParams(mu=0.84, l_km=float(l))).r for l in range(30, 451)]
    for a, b in zip(falling, falling[1:]):
        if a > 0.0:
            assert b < a


def test_rate_clamps_to_zero_beyond_reach():
    point = key_rate(SystemParams(mu=0.84, l_km=600.0))
    assert point.r == 0.0
    assert all(r == 0.0 for r in point.r_events)


def test_per_event_clamping_is_independent():
    # between the double-click death and the single-click death only
    # the Event1 term survives
    point = key_rate(SystemParams(mu=0.84, l_km=445.0))
    assert point.r_events[0] > 0.0
    assert point.r_events[1] == 0.0
    assert point.r_events[2] == 0.0


@settings(max_examples=40)
@given(st.floats(min_value=0.05, max_value=2.5, allow_nan=False),
       st.floats(min_value=0.0, max_value=500.0, allow_nan=False))
def test_error_rates_bounded(mu, l_km):
    sp = SystemParams(mu=mu, l_km=l_km)
    for rates in (event1_rates(sp), event2_rates(sp), event3_rates(sp)):
        assert 0.0 <= rates.e_bit <= 0.5
        assert 0.0 <= rates.e_ph <= 1.0
        assert rates.q >= 0.0


def test_plob_bound_frozen():
    assert plob_bound(400.0) == pytest.approx(1.4426950481024389e-08, rel=1e-12)
    assert plob_bound(0.0) == math.inf
    assert plob_bound(100.0) > plob_bound(200.0)


def test_qber_threshold_event1_frozen():
    assert qber_threshold_event1(SP_084_400) == pytest.approx(
        0.023890333206538786, abs=1e-9)


def test_qber_threshold_limits():
    # mu=0 taps nothing, so the whole unit budget covers the entropy
    # terms: f=1 solves 2 H(e) = 1
    assert qber_threshold_event1(SystemParams(mu=0.0, f=1.0)) == pytest.approx(
        0.11002786443835955, abs=1e-9)
    # a blinding-bright source leaks everything and tolerates nothing
    assert qber_threshold_event1(SystemParams(mu=30.0)) < 1e-6
    # cheaper error correction tolerates more noise
    assert qber_threshold_event1(SystemParams(mu=0.84, f=1.0)) > qber_threshold_event1(SP_084_400)


def test_reported_threshold_constant():
    assert QBER_THRESHOLD_EVENT23_REPORTED == 0.0208


def test_at_distance_and_at_intensity():
    sp = SystemParams(mu=0.84, l_km=100.0)
    moved = at_distance(sp, 400.0)
    assert moved.l_km == 400.0
    assert moved.mu == sp.mu
    scaled = at_intensity(sp, 1.5)
    assert scaled.mu == 1.5
    assert scaled.l_km == 100.0
