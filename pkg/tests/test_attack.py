"""Beam-splitting leakage bounds and the discrimination limit."""

import math

import pytest
from hypothesis import given, strategies as st

from dualqss.attack import (
    StateEnsemble,
    TapParams,
    dual_dof_ensemble,
    ie_dps_tf,
    ie_dual,
    ie_wcp_ph,
    ie_wcp_pol,
    usd_bound,
)

tap_st = st.builds(
    TapParams,
    mu=st.floats(min_value=1e-4, max_value=3.0, allow_nan=False),
    eta_t=st.floats(min_value=0.0, max_value=0.999, allow_nan=False),
)

# mu=0.4, eta_t=0.0145: reference operating point for leakage comparisons
REF = TapParams(mu=0.4, eta_t=0.0145)


def test_leakage_quadruple_frozen():
    assert ie_dual(REF) == pytest.approx(0.39899669132771654, rel=1e-12)
    assert ie_wcp_ph(REF) == pytest.approx(0.5454284718139057, rel=1e-12)
    assert ie_wcp_pol(REF) == pytest.approx(0.32578080108462193, rel=1e-12)
    assert ie_dps_tf(REF) == pytest.approx(0.7884, rel=1e-12)


def test_tapped_mu():
    assert REF.tapped_mu == pytest.approx(0.4 * (1.0 - 0.0145), rel=1e-15)
    assert TapParams(mu=0.8, eta_t=1.0).tapped_mu == 0.0


def test_tap_params_validation():
    with pytest.raises(ValueError):
        TapParams(mu=-0.1, eta_t=0.5)
    with pytest.raises(ValueError):
        TapParams(mu=0.5, eta_t=1.5)


@given(tap_st)
def test_leakage_ordering(tap):
    # one polarization bit is cheaper to hide than the dual encoding,
    # which in turn beats a phase-only pulse train
    assert ie_wcp_pol(tap) <= ie_dual(tap) + 1e-12
    assert ie_dual(tap) <= ie_wcp_ph(tap) + 1e-12


@given(tap_st)
def test_leakage_in_unit_interval(tap):
    for fn in (ie_dual, ie_wcp_ph, ie_wcp_pol, ie_dps_tf):
        value = fn(tap)
        assert 0.0 <= value <= 1.0


def test_leakage_monotone_in_mu():
    values = [ie_dual(TapParams(mu=m, eta_t=0.0145)) for m in (0.1, 0.4, 0.8, 1.5)]
    assert values == sorted(values)


def test_leakage_decreases_with_transmittance():
    lo = ie_dual(TapParams(mu=0.84, eta_t=0.5))
    hi = ie_dual(TapParams(mu=0.84, eta_t=0.01))
    assert lo < hi


@given(st.floats(min_value=1e-4, max_value=2.0, allow_nan=False),
       st.floats(min_value=0.0, max_value=0.99, allow_nan=False))
def test_usd_bound_reproduces_dual_leakage(mu, eta_t):
    tap = TapParams(mu=mu, eta_t=eta_t)
    assert usd_bound(dual_dof_ensemble(tap)) == pytest.approx(ie_dual(tap), abs=1e-12)


def test_dual_ensemble_structure():
    ensemble = dual_dof_ensemble(REF)
    assert len(ensemble.probs) == 4
    assert sum(ensemble.probs) == pytest.approx(1.0, abs=1e-15)
    beta = math.sqrt(REF.tapped_mu / 2.0)
    # opposite sign in one arm: overlap exp(-2 beta^2); in both: exp(-4 beta^2)
    assert ensemble.overlaps[0][3] == pytest.approx(math.exp(-2.0 * beta * beta), rel=1e-12)
    assert ensemble.overlaps[0][1] == pytest.approx(math.exp(-4.0 * beta * beta), rel=1e-12)


def test_usd_bound_orthogonal_states_leak_everything():
    ensemble = StateEnsemble(probs=(0.5, 0.5), overlaps=((1.0, 0.0), (0.0, 1.0)))
    assert usd_bound(ensemble) == 1.0


def test_usd_bound_identical_states_leak_nothing():
    ensemble = StateEnsemble(probs=(0.5, 0.5), overlaps=((1.0, 1.0), (1.0, 1.0)))
    assert usd_bound(ensemble) == 0.0


def test_usd_bound_needs_two_states():
    with pytest.raises(ValueError):
        usd_bound(StateEnsemble(probs=(1.0,), overlaps=((1.0,),)))


def test_state_ensemble_validation():
    with pytest.raises(ValueError):
        StateEnsemble(probs=(0.6, 0.6), overlaps=((1.0, 0.5), (0.5, 1.0)))
    with pytest.raises(ValueError):
        StateEnsemble(probs=(0.5, 0.5), overlaps=((1.0, 0.2), (0.3, 1.0)))


def test_phase_only_identity():
    # losing both pulses of a pair wipes the phase bit; losing one of two
    # polarization modes wipes that bit, hence the square-root relation
    for mu in (0.2, 0.84, 1.5):
        tap = TapParams(mu=mu, eta_t=0.0145)
        assert ie_wcp_pol(tap) == pytest.approx(
            1.0 - math.sqrt(1.0 - ie_wcp_ph(tap)), rel=1e-12)


def test_dps_clamps_at_one():
    assert ie_dps_tf(TapParams(mu=2.0, eta_t=0.0)) == 1.0


def test_leakage_vanishes_without_tapped_light():
    for fn in (ie_dual, ie_wcp_ph, ie_wcp_pol, ie_dps_tf):
        assert fn(TapParams(mu=0.0, eta_t=0.3)) == 0.0
        assert fn(TapParams(mu=0.84, eta_t=1.0)) == 0.0


def test_vacuum_ensemble_overlaps_are_one():
    ensemble = dual_dof_ensemble(TapParams(mu=0.0, eta_t=0.5))
    assert all(x == 1.0 for row in ensemble.overlaps for x in row)
