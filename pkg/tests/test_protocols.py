"""Pulse protocols, the closed-form fidelity, and cooling scenarios."""

import math

import numpy as np
import pytest

from mechqubit import (
    QubitState,
    bloch_sphere_grid,
    cooling_infidelity_curve,
    fidelity_asymptotic,
    ideal_pulse_target,
    min_infidelity,
    optimal_drive,
    pi_pulse,
    pi_pulse_fidelity_sweep,
    pi_pulse_wigner,
    pulse_drive,
    rates_from_lambda,
    reference_bloch_sample,
)
from mechqubit.protocols import trace_overlap
from mechqubit import fock_dm


def test_rates_from_lambda_identity():
    g1r, g1b = rates_from_lambda(50.0, 3.0)
    assert g1b == pytest.approx(3.0 * g1r, rel=1e-12)
    assert 1.0 / (g1r + g1b) == pytest.approx(50.0, rel=1e-12)
    assert rates_from_lambda(math.inf, 1.0) == (0.0, 0.0)
    with pytest.raises(ValueError):
        rates_from_lambda(0.0, 1.0)


def test_optimal_drive_balanced_channels_form():
    g1 = 0.003
    assert optimal_drive(g1, g1) == pytest.approx(4.0 * math.sqrt(g1 / 3.0),
                                                  rel=1e-12)
    assert pulse_drive(math.inf, 1.0) == pytest.approx(5e-3, rel=1e-12)


def test_ideal_pulse_target_swaps_amplitudes():
    q = QubitState(0.6, 0.8j)
    t = ideal_pulse_target(q)
    assert t.eta == pytest.approx(-1j * 0.8j)
    assert t.beta == pytest.approx(-1j * 0.6)
    # norm preserved
    assert abs(t.eta) ** 2 + abs(t.beta) ** 2 == pytest.approx(1.0, abs=1e-12)


def test_qubit_state_norm_enforced():
    with pytest.raises(ValueError):
        QubitState(1.0, 0.5)


def test_asymptotic_fidelity_limits_and_spot_values():
    assert fidelity_asymptotic(math.inf, 1.0, 0.0) == 1.0
    assert round(fidelity_asymptotic(1e4, 1.0, 0.0, 1.0), 5) == 0.96152
    eq = 1.0 / math.sqrt(2.0)
    assert round(fidelity_asymptotic(1e4, eq, eq, 1.0), 5) == 0.97435


def test_asymptotic_fidelity_phase_sensitivity():
    # the imaginary part of eta*beta sets the best and worst equator states
    eq = 1.0 / math.sqrt(2.0)
    best = fidelity_asymptotic(1e4, eq, 1j * eq, 1.0)
    worst = fidelity_asymptotic(1e4, eq, -1j * eq, 1.0)
    assert best > fidelity_asymptotic(1e4, 1.0, 0.0, 1.0) > worst


def test_pi_pulse_ideal_cooling_limit_is_nearly_perfect():
    res = pi_pulse(QubitState(1.0, 0.0), math.inf, model="reduced")
    assert res.fidelity > 0.99
    assert res.duration == pytest.approx(math.pi / 5e-3, rel=1e-12)


def test_pi_pulse_reduced_matches_inverse_sqrt_lambda_error():
    res = pi_pulse(QubitState(1.0, 0.0), 1e4, 1.0, model="reduced")
    assert res.fidelity == pytest.approx(1.0 - 3.848 / 100.0, abs=0.005)


def test_pi_pulse_full_and_reduced_agree_at_large_lambda():
    for q in (QubitState(1.0, 0.0), QubitState.from_angles(2.0, 1.0)):
        fr = pi_pulse(q, 1000.0, model="reduced").fidelity
        ff = pi_pulse(q, 1000.0, model="full").fidelity
        assert abs(ff - fr) < 0.01


def test_pi_pulse_rejects_unknown_model():
    with pytest.raises(ValueError):
        pi_pulse(QubitState(1.0, 0.0), 100.0, model="nope")


def test_bloch_grid_weights():
    states, weights = bloch_sphere_grid(8, 8)
    assert len(states) == 8 * 8 + 2
    assert weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert weights[-1] == 0.0 and weights[-2] == 0.0
    assert len(reference_bloch_sample()) == 10


def test_sweep_ordering_and_monotonicity():
    rows = pi_pulse_fidelity_sweep([1e2, 1e3, 1e4], n_theta=8, n_phi=8)
    for row in rows:
        assert row.f_min <= row.f_mean <= row.f_max
    for a, b in zip(rows, rows[1:]):
        assert b.f_min > a.f_min
        assert b.f_max > a.f_max
        assert b.f_mean > a.f_mean


def test_sweep_asymptote_is_lower_bound_at_large_lambda():
    rows = pi_pulse_fidelity_sweep([1e3, 1e4], n_theta=8, n_phi=8)
    for row in rows:
        assert row.f_asym_min <= row.f_min + 0.002
        assert row.f_asym_max <= row.f_max + 0.002


def test_sweep_full_columns_only_on_request():
    rows = pi_pulse_fidelity_sweep([100.0], n_theta=4, n_phi=4,
                                   full_lambdas=[100.0])
    assert rows[0].f_full_mean is not None
    assert rows[0].f_full_min <= rows[0].f_full_mean <= rows[0].f_full_max
    rows = pi_pulse_fidelity_sweep([100.0], n_theta=4, n_phi=4)
    assert rows[0].f_full_mean is None


def test_cooling_curve_ideal_limit_monotone_to_zero():
    taus = np.concatenate([[0.0], np.logspace(-2, math.log10(25.0), 40)])
    curve = cooling_infidelity_curve(math.inf, 1.0, 2.0, taus, dim=18)
    assert curve[-1, 1] < 1e-4
    # decreasing after the initial point
    assert np.all(np.diff(curve[5:, 1]) < 1e-12)


def test_cooling_curve_finite_lambda_has_interior_minimum():
    taus = np.concatenate([[0.0], np.logspace(-2, 2, 60)])
    curve = cooling_infidelity_curve(20.0, 1.0, 2.0, taus, dim=18)
    k = int(np.argmin(curve[:, 1]))
    assert 0 < k < len(taus) - 1
    assert curve[-1, 1] > curve[k, 1]


def test_cooling_curve_cold_start_grows_from_zero():
    taus = np.array([0.0, 0.5, 2.0])
    curve = cooling_infidelity_curve(30.0, 1.0, 0.0, taus, dim=10)
    assert curve[0, 1] == pytest.approx(0.0, abs=1e-12)
    assert curve[-1, 1] > curve[0, 1]


def test_min_infidelity_cold_start_sits_at_origin():
    tau, val = min_infidelity(30.0, 1.0, 0.0, dim=10,
                              tau_grid=np.concatenate([[0.0],
                                                       np.logspace(-2, 1, 30)]))
    assert tau == 0.0
    assert val == pytest.approx(0.0, abs=1e-12)


def test_min_infidelity_improves_with_lambda():
    grid = np.concatenate([[0.0], np.logspace(-2, math.log10(30.0), 80)])
    _, v_small = min_infidelity(30.0, 1.0, 2.0, dim=18, tau_grid=grid)
    _, v_large = min_infidelity(300.0, 1.0, 2.0, dim=18, tau_grid=grid)
    assert v_large < v_small


def test_trace_overlap_equals_fidelity_for_pure_targets():
    rho = fock_dm(5, 1)
    assert trace_overlap(rho, fock_dm(5, 1)) == pytest.approx(1.0)
    assert trace_overlap(fock_dm(5, 0), fock_dm(5, 1)) == pytest.approx(0.0)


def test_pulse_wigner_origin_negative_at_moderate_lambda():
    coarse = np.arange(-2.0, 2.01, 0.25)
    grid = pi_pulse_wigner(20.0, 1.0, coarse, coarse, dim=10)
    assert grid.value_at(0.0, 0.0) < 0.0
