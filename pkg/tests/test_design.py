import math

import numpy as np
import pytest

from fockgate.fock import H, V
from fockgate.design import (
    CouplerPhysics,
    NotchAnchor,
    NotchCalibration,
    bar_power,
    cross_power,
    delta_theta,
    enumerate_v_perfect_lengths,
    notch_conversion,
    solve_coupler_length,
    synthesize_imperfect_elements,
    tolerance_sweep,
)
from fockgate.gate import build_element, default_netlist

PHYS = CouplerPhysics()


# -- power exchange model --------------------------------------------------------


def test_cross_power_zero_length():
    assert cross_power(0.0, 8.32) == 0.0


def test_cross_power_half_cycle_full_transfer():
    assert abs(cross_power(4.16, 8.32) - 1.0) < 1e-12


def test_cross_power_periodicity():
    for L in (3.1, 17.9, 40.0):
        assert abs(cross_power(L + 35.8, 35.8) - cross_power(L, 35.8)) < 1e-12


def test_pbs_length_is_v_half_cycle_point():
    # 70.72 um = 8.5 V cycles: vertical polarization fully crosses
    assert abs(cross_power(70.72, 8.32) - 1.0) < 1e-12


def test_cross_power_rejects_bad_beat():
    with pytest.raises(ValueError):
        cross_power(1.0, 0.0)
    with pytest.raises(ValueError):
        cross_power(-1.0, 8.32)


def test_energy_split_sums_to_one():
    for L in (0.0, 5.5, 23.456, 83.2):
        for beat in (8.32, 35.8):
            assert abs(cross_power(L, beat) + bar_power(L, beat) - 1.0) < 1e-15


# -- coupler length solving --------------------------------------------------------


def test_pbs_solution():
    sol = solve_coupler_length(
        PHYS, targets=(1.0, 0.0), weights=(1.0, 1e6), length_range=(60.0, 80.0)
    )[0]
    assert abs(sol.length_um - 70.72) <= 0.8
    assert sol.bar_h >= 0.99
    assert 1.0 - sol.bar_v >= 1.0 - 1e-6  # cross_V at the returned length


def test_ppbs_solution_matches_analytic():
    analytic = 8.32 * (4.0 + math.asin(math.sqrt(2.0 / 3.0)) / math.pi)
    sol = solve_coupler_length(
        PHYS, targets=(1.0, 1.0 / 3.0), weights=(1.0, 1.0), length_range=(30.0, 40.0)
    )[0]
    assert abs(sol.length_um - analytic) < 1e-3
    assert abs(sol.length_um - 35.90) / 35.90 <= 0.01


def test_f1_solution_matches_analytic():
    analytic = 35.8 * math.acos(0.5) / math.pi  # = 35.8 / 3
    sol = solve_coupler_length(
        PHYS, targets=(0.25, 0.0), weights=(1.0, 0.0), length_range=(5.0, 20.0)
    )[0]
    assert abs(sol.length_um - analytic) < 1e-3
    assert abs(sol.length_um - 12.00) / 12.00 <= 0.01


def test_solver_rejects_empty_range():
    with pytest.raises(ValueError):
        solve_coupler_length(PHYS, (1.0, 0.0), (1.0, 1.0), (10.0, 10.0))


def test_solver_local_minimum_certificate():
    # every returned solution beats all grid points within one step of it
    step = 0.01
    sols = solve_coupler_length(
        PHYS, targets=(0.5, 0.5), weights=(1.0, 1.0), length_range=(10.0, 30.0),
        grid_step=step,
    )
    def residual(L):
        return (bar_power(L, PHYS.beat_h) - 0.5) ** 2 + (
            bar_power(L, PHYS.beat_v) - 0.5
        ) ** 2
    for sol in sols:
        for offset in (-step, -step / 2, step / 2, step):
            probe = sol.length_um + offset
            if 10.0 <= probe <= 30.0:
                assert sol.residual <= residual(probe) + 1e-15


def test_solver_round_trip_recovers_length():
    for true_length in (7.3, 17.25, 29.8):
        targets = (
            bar_power(true_length, PHYS.beat_h),
            bar_power(true_length, PHYS.beat_v),
        )
        sols = solve_coupler_length(
            PHYS, targets=targets, weights=(1.0, 1.0), length_range=(0.0, 35.8),
            count=5,
        )
        best = min(abs(s.length_um - true_length) for s in sols)
        assert best < 1e-3


# -- V-preserving filter lengths ----------------------------------------------------


def test_v_perfect_lengths_80_90():
    sols = enumerate_v_perfect_lengths(PHYS, (80.0, 90.0))
    assert len(sols) == 1
    assert abs(sols[0].length_um - 83.20) < 1e-9
    # bar_H at the 10-cycle point misses the 1/3 target; report, not hide
    expected_bar_h = math.cos(math.pi * 83.20 / 35.80) ** 2
    assert abs(sols[0].bar_h - expected_bar_h) < 1e-12
    assert abs(sols[0].bar_h - 1.0 / 3.0) > 0.05


def test_v_perfect_lengths_first_multiple():
    sols = enumerate_v_perfect_lengths(PHYS, (0.0, 10.0))
    assert [round(s.length_um, 2) for s in sols] == [8.32]


# -- notch calibration ----------------------------------------------------------------


def test_notch_anchors_reproduced_exactly():
    cal = NotchCalibration()
    assert notch_conversion(cal, 0.75, V) == 0.25
    assert notch_conversion(cal, 2.75, V) == 0.50
    assert notch_conversion(cal, 2.90, H) == 0.50


def test_notch_interpolation_between_anchors():
    cal = NotchCalibration()
    mid = notch_conversion(cal, (0.75 + 2.75) / 2, V)
    assert abs(mid - (0.25 + 0.50) / 2) < 1e-15


def test_notch_rejects_out_of_span():
    cal = NotchCalibration()
    for length, pol in ((0.5, V), (3.0, V), (2.8, H), (3.0, H)):
        with pytest.raises(ValueError, match="span"):
            notch_conversion(cal, length, pol)


def test_notch_custom_anchor_table():
    cal = NotchCalibration(
        (
            NotchAnchor(1.0, H, 0.1),
            NotchAnchor(2.0, H, 0.3),
            NotchAnchor(3.0, H, 0.9),
        )
    )
    assert notch_conversion(cal, 1.0, H) == 0.1
    assert abs(notch_conversion(cal, 1.5, H) - 0.2) < 1e-15
    assert abs(notch_conversion(cal, 2.5, H) - 0.6) < 1e-15


# -- imperfect element synthesis --------------------------------------------------------


def test_delta_theta_zero_at_no_perturbation():
    assert delta_theta(70.72, 8.32, 0.01, 0.0) == 0.0


def test_synthesize_zero_delta_matches_ideal():
    netlist = default_netlist()
    physics = PHYS.with_sensitivities("width", 0.004, 0.004)
    overrides = synthesize_imperfect_elements(netlist, physics, "width", 0.0)
    assert set(overrides) == {"PBS1", "PBS2", "PBS3", "PPBS", "F1", "F2"}
    for name, el in overrides.items():
        ideal = build_element(netlist.element(name))
        synth = build_element(el)
        assert np.max(np.abs(synth.matrix - ideal.matrix)) < 1e-12


def test_synthesize_requires_sensitivities():
    netlist = default_netlist()
    with pytest.raises(ValueError, match="sensitivities"):
        synthesize_imperfect_elements(netlist, PHYS, "width", 5.0)


def test_synthesize_warns_beyond_envelope():
    netlist = default_netlist()
    physics = PHYS.with_sensitivities("gap", 0.002, 0.002)
    with pytest.warns(UserWarning, match="10 nm"):
        synthesize_imperfect_elements(netlist, physics, "gap", 12.0)


def test_synthesized_pbs_bar_drops_under_width_increase():
    netlist = default_netlist()
    physics = PHYS.with_sensitivities("width", 0.004, 0.004)
    overrides = synthesize_imperfect_elements(netlist, physics, "width", 10.0)
    p = overrides["PBS1"].param_dict
    # positive beat shift at fixed length reduces both coupling angles
    assert math.cos(p["theta_h"]) ** 2 < 1.0
    assert math.sin(p["theta_v"]) ** 2 < 1.0  # cross_V below unity


# -- tolerance sweep ------------------------------------------------------------------------


@pytest.fixture(scope="module")
def sweep_rows():
    netlist = default_netlist()
    physics = PHYS.with_sensitivities("width", 0.004, 0.004)
    return tolerance_sweep(netlist, physics, "width", (-10.0, 10.0), 1.0, phi=math.pi)


def test_sweep_grid_size(sweep_rows):
    assert len(sweep_rows) == 21
    assert [r.delta_nm for r in sweep_rows] == sorted(r.delta_nm for r in sweep_rows)


def test_sweep_nominal_row(sweep_rows):
    row = next(r for r in sweep_rows if r.delta_nm == 0.0)
    assert row.fidelity >= 1 - 1e-9
    for p in row.herald_probabilities:
        assert abs(p - 1 / 48) < 1e-9


def test_sweep_fidelity_monotone_in_abs_delta(sweep_rows):
    for sign in (-1, 1):
        branch = sorted(
            (r for r in sweep_rows if sign * r.delta_nm >= 0),
            key=lambda r: abs(r.delta_nm),
        )
        fids = [r.fidelity for r in branch]
        for a, b in zip(fids, fids[1:]):
            assert b <= a + 1e-12


def test_sweep_not_symmetric_in_general(sweep_rows):
    # the beat-shift model is not odd in delta, so the fidelity column is
    # not expected to be symmetric even for symmetric sensitivities
    left = next(r for r in sweep_rows if r.delta_nm == -10.0)
    right = next(r for r in sweep_rows if r.delta_nm == 10.0)
    assert abs(left.fidelity - right.fidelity) > 1e-6


def test_sweep_rejects_bad_step():
    with pytest.raises(ValueError):
        tolerance_sweep(default_netlist(), PHYS, "width", (-1.0, 1.0), 0.0)
