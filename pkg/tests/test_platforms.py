import math

import pytest
from hypothesis import given, settings, strategies as st

from swarmsim.errors import CommandWhileGrounded, WrongPlatformCommand
from swarmsim.geometry import dist
from swarmsim.platforms import (
    Curve,
    DiffDriveState,
    Hover,
    Land,
    Limits,
    QuadMode,
    QuadState,
    SetAttitude,
    Straight,
    TakeOff,
    Turn,
    diffdrive_spec,
    grounded_quad,
    quad_spec,
    step_diffdrive,
    step_quad,
)

DD = diffdrive_spec()
QD = quad_spec()


# --- differential drive -------------------------------------------------------


def test_straight_advances_along_heading():
    # v_ref is clipped to the 0.5 m/s limit
    s = step_diffdrive(DiffDriveState(0, 0, 0), Straight(1.0), 1.0, DD)
    assert s == DiffDriveState(0.5, 0, 0)


def test_straight_unclipped_unit_step():
    spec = diffdrive_spec(limits=Limits(v_ref=2.0, a_ref=1.5, tilt=0.3, gaz=1.0))
    s = step_diffdrive(DiffDriveState(0, 0, 0), Straight(1.0), 1.0, spec)
    assert s == DiffDriveState(1.0, 0, 0)


def test_straight_exact_when_heading_constant():
    spec = diffdrive_spec()
    s = DiffDriveState(0, 0, 0)
    for _ in range(1000):
        s = step_diffdrive(s, Straight(0.3), 0.001, spec)
    assert math.isclose(s.x, 0.3, rel_tol=1e-9)
    assert s.y == 0 and s.theta == 0


def test_turn_pure_rotation():
    s = step_diffdrive(DiffDriveState(0, 0, 0), Turn(math.pi / 2), 1.0, DD)
    assert s.x == 0 and s.y == 0
    assert math.isclose(s.theta, math.pi / 2)


def test_curve_unit_circle_closed_form():
    # raise the speed limit so curve(1, 1) runs unclipped
    spec = diffdrive_spec(limits=Limits(v_ref=2.0, a_ref=1.5, tilt=0.3, gaz=1.0))
    s = DiffDriveState(0, 0, 0)
    h = 1e-3
    for _ in range(round(math.pi / h)):
        s = step_diffdrive(s, Curve(1.0, 1.0), h, spec)
    # closed form: circle of radius 1 around (0, 1); at t=pi the pose is
    # (0, 2) with heading pi
    assert abs(s.x - 0.0) < 1e-2
    assert abs(s.y - 2.0) < 1e-2
    assert abs(abs(s.theta) - math.pi) < 1e-2


def test_diffdrive_rejects_quad_commands():
    with pytest.raises(WrongPlatformCommand):
        step_diffdrive(DiffDriveState(0, 0, 0), TakeOff(), 0.1, DD)


def test_speed_bound_per_step():
    spec = diffdrive_spec()
    s0 = DiffDriveState(0.3, -0.2, 0.7)
    s1 = step_diffdrive(s0, Curve(0.4, 2.0), 0.01, spec)
    moved = math.hypot(s1.x - s0.x, s1.y - s0.y)
    assert moved <= 0.4 * 0.01 + 1e-12


@given(
    st.sampled_from(["straight", "turn", "curve"]),
    st.floats(min_value=-1, max_value=1),
    st.floats(min_value=0.2, max_value=3),
    st.floats(min_value=-math.pi, max_value=math.pi),
)
@settings(max_examples=40)
def test_euler_halving_consistency(kind, v, r, theta0):
    """Halving the step size roughly halves the endpoint error (order-1)."""
    spec = diffdrive_spec()
    cmd = {"straight": Straight(v), "turn": Turn(v), "curve": Curve(v, r)}[kind]

    def endpoint(h, steps):
        s = DiffDriveState(0, 0, theta0)
        for _ in range(steps):
            s = step_diffdrive(s, cmd, h, spec)
        return s

    ref = endpoint(1e-4, 10000)
    e1 = endpoint(4e-2, 25)
    e2 = endpoint(2e-2, 50)
    err1 = math.hypot(e1.x - ref.x, e1.y - ref.y)
    err2 = math.hypot(e2.x - ref.x, e2.y - ref.y)
    if err1 > 1e-8:
        assert err2 <= err1 * 0.75 + 1e-9


# --- quadrotor ----------------------------------------------------------------


def airborne_quad(**kw):
    base = dict(x=0.0, y=0.0, z=1.0, vx=0.0, vy=0.0, psi=0.0, theta=0.0, phi=0.0,
                mode=QuadMode.FLIGHT)
    base.update(kw)
    return QuadState(**base)


def test_level_hover_is_exact_fixed_point():
    s = airborne_quad()
    for _ in range(100):
        s = step_quad(s, Hover(), 0.01, QD)
    assert s == airborne_quad()


def test_pitch_only_acceleration_matches_model():
    # theta=0.1, phi=0, psi=0, gaz=0, M=1:
    # thrust = 10/cos(0.1); xdd = -thrust*sin(0.1) ; ydd = 0
    s = airborne_quad(theta=0.1)
    h = 1e-3
    nxt = step_quad(s, SetAttitude(0.0, 0.1, 0.0, 0.0), h, QD)
    expected_ax = -(10.0 / math.cos(0.1)) * math.sin(0.1)
    assert math.isclose(expected_ax, -1.00335, rel_tol=1e-4)
    assert math.isclose(nxt.vx, expected_ax * h, rel_tol=1e-12)
    assert nxt.vy == 0.0


def test_yaw_rate_proportional():
    s = airborne_quad()
    h = 1e-3
    nxt = step_quad(s, SetAttitude(1.0, 0.0, 0.0, 0.0), h, QD)
    # psi_dot = gain*(a_ref - psi) = 2*(1-0) = 2
    assert math.isclose(nxt.psi, 2.0 * h, rel_tol=1e-12)


def test_z_kinematics_exact():
    s = airborne_quad(z=2.0)
    h = 0.01
    nxt = step_quad(s, SetAttitude(0.0, 0.0, 0.0, 0.4), h, QD)
    assert math.isclose(nxt.z - s.z, 0.4 * h, rel_tol=1e-12)


def test_takeoff_ramps_to_hover_altitude():
    spec = quad_spec()
    s = grounded_quad()
    t = 0.0
    while not s.mode is QuadMode.FLIGHT:
        s = step_quad(s, TakeOff(), 0.01, spec)
        t += 0.01
        assert t < 10
    assert math.isclose(s.z, spec.hover_alt)
    assert math.isclose(t, spec.hover_alt / spec.takeoff_rate, rel_tol=0.02)


def test_takeoff_maneuver_overrides_attitude_commands():
    spec = quad_spec()
    s = step_quad(grounded_quad(), TakeOff(), 0.01, spec)
    assert s.mode is QuadMode.TAKEOFF and s.airborne
    s2 = step_quad(s, SetAttitude(0, 0.2, 0.2, 0.5), 0.01, spec)
    assert s2.mode is QuadMode.TAKEOFF
    assert s2.z > s.z and s2.vx == 0 and s2.theta == 0


def test_landing_returns_to_grounded_rest():
    spec = quad_spec()
    s = airborne_quad(z=0.3, vx=0.2, vy=-0.1)
    while s.airborne:
        s = step_quad(s, Land(), 0.01, spec)
    assert s.z == 0 and s.vx == 0 and s.vy == 0
    assert not s.airborne


def test_attitude_command_while_grounded_raises():
    with pytest.raises(CommandWhileGrounded):
        step_quad(grounded_quad(), SetAttitude(0, 0, 0, 0), 0.01, QD)


def test_quad_rejects_diffdrive_commands():
    with pytest.raises(WrongPlatformCommand):
        step_quad(grounded_quad(), Straight(0.5), 0.01, QD)


def test_z_clamped_at_ground():
    s = airborne_quad(z=0.001)
    nxt = step_quad(s, SetAttitude(0, 0, 0, -1.0), 0.01, QD)
    assert nxt.z == 0.0


@given(
    st.floats(min_value=-0.3, max_value=0.3),
    st.floats(min_value=-0.3, max_value=0.3),
    st.floats(min_value=-1, max_value=1),
    st.floats(min_value=-3, max_value=3),
)
@settings(max_examples=50)
def test_quad_angles_stay_normalized(theta_ref, phi_ref, gaz, a_ref):
    s = airborne_quad(psi=3.0)
    for _ in range(50):
        s = step_quad(s, SetAttitude(a_ref, theta_ref, phi_ref, gaz), 0.02, QD)
        for angle in (s.psi, s.theta, s.phi):
            assert -math.pi < angle <= math.pi


def test_specs_validate():
    with pytest.raises(ValueError):
        quad_spec(d_t=-1)
    with pytest.raises(ValueError):
        diffdrive_spec(integration_step=0.2, sensor_period=0.1)
