import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symnav.vehicle import VehicleParams, VehicleState, footprint, step

from oracles import circle_fit

P = VehicleParams()


def test_straight_line():
    s = step(VehicleState(0.0, 0.0), 0.0, P)
    assert (s.x, s.y, s.theta, s.delta) == (P.speed, 0.0, 0.0, 0.0)


def test_steering_rate_is_limited():
    s = step(VehicleState(0, 0), P.max_steer, P)
    assert s.delta == pytest.approx(P.max_steer_rate, abs=1e-15)
    s = step(VehicleState(0, 0, 0, 0.01), 0.0, P)
    assert s.delta == 0.0


def test_command_clamped_to_max_steer():
    s = VehicleState(0, 0)
    for _ in range(50):
        s = step(s, 10.0, P)
    assert s.delta == pytest.approx(P.max_steer, abs=1e-15)


def test_saturated_turn_radius_matches_closed_form():
    s = VehicleState(0, 0)
    xs, ys = [], []
    for i in range(400):
        s = step(s, P.max_steer, P)
        if i >= 50:
            xs.append(s.x)
            ys.append(s.y)
    _, _, r = circle_fit(np.array(xs), np.array(ys))
    expect = P.wheelbase / math.sin(P.max_steer)
    assert abs(r - expect) / expect < 0.01
    assert P.turning_radius == expect


def test_negated_command_mirrors_trajectory():
    a = b = VehicleState(0, 0)
    rng = np.random.default_rng(0)
    for cmd in rng.uniform(-1, 1, 300):
        a = step(a, cmd, P)
        b = step(b, -cmd, P)
        assert b.x == a.x and b.y == -a.y and b.theta == -a.theta and b.delta == -a.delta


@settings(max_examples=300, deadline=None)
@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.floats(-math.pi + 1e-9, math.pi),
       st.floats(-0.6, 0.6), st.floats(-2, 2))
def test_mirror_symmetry_of_step(x, y, th, de, cmd):
    s = VehicleState(x, y, th, de)
    a = step(s, cmd, P).mirrored()
    b = step(s.mirrored(), -cmd, P)
    assert b.x == pytest.approx(a.x, abs=1e-12)
    assert b.y == pytest.approx(a.y, abs=1e-12)
    assert math.cos(b.theta - a.theta) == pytest.approx(1.0, abs=1e-12)
    assert b.delta == pytest.approx(a.delta, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.floats(-math.pi, math.pi),
       st.floats(-0.6, 0.6), st.floats(-2, 2))
def test_displacement_equals_speed(x, y, th, de, cmd):
    s = VehicleState(x, y, th, de)
    n = step(s, cmd, P)
    assert math.hypot(n.x - x, n.y - y) == pytest.approx(P.speed, rel=1e-12)


def test_theta_stays_normalized():
    s = VehicleState(0, 0)
    for _ in range(1000):
        s = step(s, P.max_steer, P)
        assert -math.pi < s.theta <= math.pi


def test_footprint_orientation():
    f = footprint(VehicleState(0, 0, 0), P)
    assert (f.half_length, f.half_width, f.heading) == (15.0, 8.0, 0.0)
    xs = sorted(p.x for p in f.corners())
    assert xs == [-15, -15, 15, 15]
    g = footprint(VehicleState(0, 0, math.pi / 2), P)
    front_left = g.corners()[0]
    assert front_left.x == pytest.approx(-8, abs=1e-12)
    assert front_left.y == pytest.approx(15, abs=1e-12)


@pytest.mark.parametrize("field", ["wheelbase", "speed", "body_width"])
def test_params_validated(field):
    with pytest.raises(ValueError):
        VehicleParams(**{field: 0.0})
