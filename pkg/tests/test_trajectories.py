import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cavitysim.trajectories import (
    RigidityError,
    TrajectoryPlan,
    center_displacement,
    center_position,
    mirror_displacements,
    mirror_positions,
    proper_time_round_trip,
    rindler_length,
    rindler_length_ratio,
    rindler_segment_duration,
)
from oracles import proper_time_numeric

C = 1.19e8

plans = st.builds(
    lambda h, t_a, L: TrajectoryPlan.from_h(h, t_a, L, C),
    st.floats(1e-5, 1.9),
    st.floats(1e-11, 1e-8),
    st.floats(1e-3, 0.2),
)


def test_derived_quantities():
    p = TrajectoryPlan.from_h(0.3, 1e-9, 0.05, C)
    assert p.h == pytest.approx(0.3)
    assert p.g_plus * p.g_minus == pytest.approx(1 - 0.3**2 / 4)
    direct = 2 * math.sqrt(C**2 * p.t_a**2 + C**4 / p.a**2) - 2 * C**2 / p.a
    assert p.d_cav == pytest.approx(direct, rel=1e-9)
    assert p.duration == 4e-9


def test_validation():
    with pytest.raises(RigidityError):
        TrajectoryPlan.from_h(2.0, 1e-9, 0.01, C)
    with pytest.raises(ValueError):
        TrajectoryPlan(-1.0, 1e-9, 0.01, C)
    with pytest.raises(ValueError):
        TrajectoryPlan(1.0, 0.0, 0.01, C)


def test_center_endpoints_and_apex():
    p = TrajectoryPlan(2e16, 1e-10, 0.02, C)
    R = C**2 / p.a
    assert center_position(p, 0.0) == pytest.approx(R, rel=1e-15)
    assert center_position(p, p.duration) == pytest.approx(R, rel=1e-15)
    assert center_position(p, 2 * p.t_a) == pytest.approx(R + p.d_cav, rel=1e-14)
    with pytest.raises(ValueError):
        center_position(p, -1e-12)
    with pytest.raises(ValueError):
        center_position(p, 5 * p.t_a)


def test_center_is_smooth_at_switches():
    p = TrajectoryPlan(2e16, 1e-10, 0.02, C)
    for ts in (p.t_a, 3 * p.t_a):
        e = 1e-16
        left, right = center_displacement(p, ts - e), center_displacement(p, ts + e)
        assert abs(left - right) <= 2 * e * C
        d = 1e-14
        v_left = (center_displacement(p, ts) - center_displacement(p, ts - d)) / d
        v_right = (center_displacement(p, ts + d) - center_displacement(p, ts)) / d
        assert abs(v_left - v_right) < 1e-4 * C


def test_center_closes_with_zero_velocity():
    p = TrajectoryPlan(2e16, 1e-10, 0.02, C)
    d = 1e-15
    v_end = (center_displacement(p, p.duration) - center_displacement(p, p.duration - d)) / d
    assert abs(v_end) < 1e-6 * C


@given(plans)
def test_rigidity_closure(p):
    for t in (0.0, p.duration):
        dl, dr = mirror_displacements(p, t)
        assert abs(dr - dl) < 1e-12 * p.L


@given(plans)
def test_mirrors_continuous_on_dense_grid(p):
    t = np.linspace(0, p.duration, 4001)
    dl, dr = mirror_displacements(p, t)
    step = p.c * (t[1] - t[0])  # nothing moves faster than c
    assert np.max(np.abs(np.diff(dl))) <= step * (1 + 1e-9)
    assert np.max(np.abs(np.diff(dr))) <= step * (1 + 1e-9)


def test_mirror_branch_switch_continuity_fig5():
    p = TrajectoryPlan.from_h(0.05, 1e-10, 0.095, C)
    for ts in (p.g_minus * p.t_a, (2 + p.g_plus) * p.t_a):
        below, above = mirror_displacements(p, np.array([ts * (1 - 1e-15), ts * (1 + 1e-15)]))[0]
        assert abs(below - above) < 1e-12 * p.L


def test_mirror_positions_start_at_rindler_points():
    p = TrajectoryPlan.from_h(0.4, 1e-9, 0.05, C)
    xl, xr = mirror_positions(p, 0.0)
    R = C**2 / p.a
    assert xl == pytest.approx(R * p.g_minus)
    assert xr == pytest.approx(R * p.g_plus)
    assert xr - xl == pytest.approx(p.L, rel=1e-12)


def test_small_h_mirrors_follow_center():
    p = TrajectoryPlan.from_h(1e-6, 1e-9, 0.01, C)
    t = np.linspace(0, p.duration, 101)
    dl, dr = mirror_displacements(p, t)
    dc = center_displacement(p, t)
    assert np.max(np.abs(dl - dc)) < 1e-5 * p.d_cav
    assert np.max(np.abs(dr - dc)) < 1e-5 * p.d_cav


def test_stationary_plan():
    p = TrajectoryPlan(0.0, 1e-9, 0.01, C)
    assert p.d_cav == 0
    assert np.all(mirror_displacements(p, np.linspace(0, p.duration, 5))[0] == 0)
    assert proper_time_round_trip(p) == p.duration
    with pytest.raises(ValueError):
        center_position(p, 0.0)


def test_d_cav_limits():
    t_a = 1e-9
    assert TrajectoryPlan(1e22, t_a, 1e-7, C).d_cav == pytest.approx(2 * C * t_a, rel=1e-3)
    slow = TrajectoryPlan(0.04 * C / t_a, t_a, 1e-3, C)
    assert slow.d_cav == pytest.approx(slow.a * t_a**2, rel=0.01)
    values = [TrajectoryPlan(a, t_a, 1e-7, C).d_cav for a in np.logspace(14, 20, 20)]
    assert np.all(np.diff(values) > 0)


def test_proper_time_against_numeric_integration():
    p = TrajectoryPlan(1e16, 1e-9, 0.01, C)
    numeric = proper_time_numeric(lambda t: center_displacement(p, t), p.duration, C)
    assert proper_time_round_trip(p) == pytest.approx(numeric, rel=1e-9)


def test_proper_time_at_unit_rapidity():
    p = TrajectoryPlan(C / 1e-9, 1e-9, 1e-3, C)
    assert p.rapidity == pytest.approx(1.0)
    assert proper_time_round_trip(p) == pytest.approx(4 * (C / p.a) * math.asinh(1.0), rel=1e-14)
    assert proper_time_round_trip(p) / (C / p.a) == pytest.approx(3.5255, abs=1e-4)


@given(plans)
def test_proper_time_shorter_than_lab_time(p):
    assert proper_time_round_trip(p) < p.duration


def test_rindler_segment_duration():
    p = TrajectoryPlan(2e16, 1e-10, 0.02, C)
    eta = rindler_segment_duration(p, 1e-10)
    assert (C / p.a) * math.sinh(p.a * eta / C) == pytest.approx(1e-10, rel=1e-14)
    assert 4 * eta == pytest.approx(proper_time_round_trip(p), rel=1e-15)
    slow = TrajectoryPlan(1e-3, 1e-10, 0.02, C)
    assert rindler_segment_duration(slow, 1e-10) == pytest.approx(1e-10, rel=1e-15)
    with pytest.raises(ValueError):
        rindler_segment_duration(p, 0.0)


def test_rindler_length():
    assert rindler_length_ratio(1.0) == pytest.approx(math.log(3), rel=1e-15)
    assert rindler_length_ratio(0.0) == 1.0
    assert rindler_length_ratio(1e-8) == pytest.approx(1.0, abs=1e-16)
    with pytest.raises(RigidityError):
        rindler_length_ratio(2.0)


# the log of the ratio cancels catastrophically below h ~ 1e-3
@given(st.floats(1e-3, 1.99))
def test_rindler_length_chart_identity(h):
    p = TrajectoryPlan.from_h(h, 1e-9, 0.05, C)
    assert (C**2 / p.a) * math.log(p.g_plus / p.g_minus) == pytest.approx(rindler_length(p), rel=1e-12)


def test_rindler_length_series_is_continuous():
    below, above = rindler_length_ratio(0.999999e-6), rindler_length_ratio(1.000001e-6)
    assert abs(below - above) < 1e-15
