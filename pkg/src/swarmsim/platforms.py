"""Platform dynamics: a differential-drive ground robot and a quadrotor.

Each platform is a set of low-level commands plus an ODE advanced by explicit
Euler at a fixed step. The step functions are pure: same state, command, and
step size always produce the same next state.

The quadrotor's translational model keeps the published constant 10 in the
thrust term (an implicit g of 10 m/s^2) and the sign asymmetry between the
x and y acceleration rows; both are reproduced deliberately, not "corrected".
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from .errors import CommandWhileGrounded, WrongPlatformCommand
from .geometry import Position3, normalize_angle


class PlatformKind(str, enum.Enum):
    DIFFDRIVE = "diffdrive"
    QUAD = "quad"


class QuadMode(str, enum.Enum):
    """Flight phase. Takeoff and landing are fixed-rate vertical ramps during
    which attitude commands are overridden by the maneuver."""

    GROUNDED = "grounded"
    TAKEOFF = "takeoff"
    FLIGHT = "flight"
    LANDING = "landing"


# --- states ---------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class DiffDriveState:
    x: float
    y: float
    theta: float

    def position(self) -> Position3:
        return Position3(self.x, self.y, 0.0)


@dataclass(frozen=True, slots=True)
class QuadState:
    x: float
    y: float
    z: float
    vx: float
    vy: float
    psi: float    # yaw
    theta: float  # pitch
    phi: float    # roll
    mode: QuadMode = QuadMode.GROUNDED

    @property
    def airborne(self) -> bool:
        """False only when resting on the ground (z = 0, zero velocity)."""
        return self.mode is not QuadMode.GROUNDED

    def position(self) -> Position3:
        return Position3(self.x, self.y, self.z)


PlatformState = DiffDriveState | QuadState


def grounded_quad(x: float = 0.0, y: float = 0.0, psi: float = 0.0) -> QuadState:
    return QuadState(x, y, 0.0, 0.0, 0.0, psi, 0.0, 0.0, QuadMode.GROUNDED)


# --- commands ---------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Straight:
    v_ref: float


@dataclass(frozen=True, slots=True)
class Turn:
    a_ref: float


@dataclass(frozen=True, slots=True)
class Curve:
    v_ref: float
    r: float


@dataclass(frozen=True, slots=True)
class TakeOff:
    pass


@dataclass(frozen=True, slots=True)
class Land:
    pass


@dataclass(frozen=True, slots=True)
class Hover:
    pass


@dataclass(frozen=True, slots=True)
class SetAttitude:
    """The four combinable quad references, bundled: yaw, pitch, roll, gaz."""

    a_ref: float      # yaw reference, compared against the yaw angle
    theta_ref: float  # pitch reference
    phi_ref: float    # roll reference
    gaz: float        # vertical speed reference, m/s


Command = Straight | Turn | Curve | TakeOff | Land | Hover | SetAttitude

DIFFDRIVE_COMMANDS = (Straight, Turn, Curve)
QUAD_COMMANDS = (TakeOff, Land, Hover, SetAttitude)


# --- platform parameters ----------------------------------------------------


@dataclass(frozen=True, slots=True)
class Limits:
    """Saturation bounds on command references."""

    v_ref: float
    a_ref: float
    tilt: float
    gaz: float


@dataclass(frozen=True, slots=True)
class PlatformSpec:
    kind: PlatformKind
    M: float
    gain: float
    limits: Limits
    d_t: float              # dwell time: how long a predicate must persist
    q_d: float              # quantization distance around target/unsafe sets
    sensor_period: float
    integration_step: float
    hover_alt: float = 1.0
    takeoff_rate: float = 0.5

    def __post_init__(self):
        for name in ("M", "gain", "d_t", "q_d", "sensor_period", "integration_step",
                     "hover_alt", "takeoff_rate"):
            if getattr(self, name) <= 0:
                raise ValueError(f"PlatformSpec.{name} must be positive")
        if self.integration_step > self.sensor_period:
            raise ValueError("integration_step must not exceed sensor_period")


def diffdrive_spec(**overrides) -> PlatformSpec:
    base = dict(
        kind=PlatformKind.DIFFDRIVE,
        M=1.0,
        gain=2.0,
        limits=Limits(v_ref=0.5, a_ref=2.0, tilt=0.3, gaz=1.0),
        d_t=0.3,
        q_d=0.10,
        sensor_period=0.1,
        integration_step=0.001,
    )
    base.update(overrides)
    return PlatformSpec(**base)


def quad_spec(**overrides) -> PlatformSpec:
    base = dict(
        kind=PlatformKind.QUAD,
        M=1.0,
        gain=2.0,
        limits=Limits(v_ref=1.0, a_ref=math.pi, tilt=0.3, gaz=1.0),
        d_t=0.5,
        q_d=0.15,
        sensor_period=0.1,
        integration_step=0.001,
        hover_alt=1.0,
        takeoff_rate=0.5,
    )
    base.update(overrides)
    return PlatformSpec(**base)


def initial_state(spec: PlatformSpec, x: float, y: float, theta: float = 0.0) -> PlatformState:
    if spec.kind is PlatformKind.DIFFDRIVE:
        return DiffDriveState(x, y, normalize_angle(theta))
    return grounded_quad(x, y, normalize_angle(theta))


def state_position(s: PlatformState) -> Position3:
    return s.position()


def _clip(v: float, bound: float) -> float:
    return -bound if v < -bound else bound if v > bound else v


# --- integration ------------------------------------------------------------


def step_diffdrive(s: DiffDriveState, c: Command, h: float, spec: PlatformSpec) -> DiffDriveState:
    """One explicit-Euler step of the ground-robot ODE under command c."""
    if h <= 0:
        raise ValueError("step size must be positive")
    if not isinstance(c, DIFFDRIVE_COMMANDS):
        raise WrongPlatformCommand(f"{type(c).__name__} is not a ground-robot command")

    lim = spec.limits
    if isinstance(c, Straight):
        v = _clip(c.v_ref, lim.v_ref)
        omega = 0.0
    elif isinstance(c, Turn):
        v = 0.0
        omega = _clip(c.a_ref, lim.a_ref)
    else:
        if c.r == 0.0:
            raise ValueError("curve radius must be nonzero")
        v = _clip(c.v_ref, lim.v_ref)
        omega = v / c.r

    return DiffDriveState(
        x=s.x + v * math.cos(s.theta) * h,
        y=s.y + v * math.sin(s.theta) * h,
        theta=normalize_angle(s.theta + omega * h),
    )


def step_quad(
    s: QuadState,
    c: Command,
    h: float,
    spec: PlatformSpec,
    wind_ax: float = 0.0,
    wind_ay: float = 0.0,
) -> QuadState:
    """One explicit-Euler step of the quadrotor ODE under command c.

    Vertical motion is kinematic (z-rate equals the gaz reference). The
    optional wind terms add a bounded horizontal disturbance acceleration.
    """
    if h <= 0:
        raise ValueError("step size must be positive")
    if not isinstance(c, QUAD_COMMANDS):
        raise WrongPlatformCommand(f"{type(c).__name__} is not a quadrotor command")

    mode = s.mode
    if mode is QuadMode.GROUNDED:
        if isinstance(c, SetAttitude):
            raise CommandWhileGrounded("setAttitude requires the quad to be airborne")
        if isinstance(c, TakeOff):
            return _climb(s, h, spec)
        return s  # land / hover on the ground: no-op

    if mode is QuadMode.TAKEOFF:
        if isinstance(c, Land):
            return _descend(s, h, spec)
        return _climb(s, h, spec)  # maneuver overrides attitude commands

    if mode is QuadMode.LANDING:
        if isinstance(c, TakeOff):
            return _climb(s, h, spec)
        return _descend(s, h, spec)

    # free flight
    if isinstance(c, Land):
        return _descend(s, h, spec)
    if isinstance(c, (TakeOff, Hover)):
        c = SetAttitude(s.psi, 0.0, 0.0, 0.0)

    lim = spec.limits
    a_ref = _clip(c.a_ref, lim.a_ref)
    theta_ref = _clip(c.theta_ref, lim.tilt)
    phi_ref = _clip(c.phi_ref, lim.tilt)
    gaz = _clip(c.gaz, lim.gaz)

    sin_phi, cos_phi = math.sin(s.phi), math.cos(s.phi)
    sin_theta, cos_theta = math.sin(s.theta), math.cos(s.theta)
    sin_psi, cos_psi = math.sin(s.psi), math.cos(s.psi)

    thrust = (gaz + 10.0) / cos_phi / cos_theta
    ax = -thrust * (sin_phi * sin_psi + cos_phi * sin_theta * cos_psi) / spec.M + wind_ax
    ay = thrust * (sin_phi * cos_psi + cos_phi * sin_theta * sin_psi) / spec.M + wind_ay

    z = s.z + gaz * h
    if z < 0.0:
        z = 0.0

    return QuadState(
        x=s.x + s.vx * h,
        y=s.y + s.vy * h,
        z=z,
        vx=s.vx + ax * h,
        vy=s.vy + ay * h,
        psi=normalize_angle(s.psi + spec.gain * (a_ref - s.psi) * h),
        theta=normalize_angle(s.theta + spec.gain * (theta_ref - s.theta) * h),
        phi=normalize_angle(s.phi + spec.gain * (phi_ref - s.phi) * h),
        mode=QuadMode.FLIGHT,
    )


def _climb(s: QuadState, h: float, spec: PlatformSpec) -> QuadState:
    z = s.z + spec.takeoff_rate * h
    if z >= spec.hover_alt:
        return replace(s, z=spec.hover_alt, vx=0.0, vy=0.0, mode=QuadMode.FLIGHT)
    return replace(s, z=z, vx=0.0, vy=0.0, mode=QuadMode.TAKEOFF)


def _descend(s: QuadState, h: float, spec: PlatformSpec) -> QuadState:
    z = s.z - spec.takeoff_rate * h
    if z <= 0.0:
        return QuadState(s.x, s.y, 0.0, 0.0, 0.0, s.psi, 0.0, 0.0, QuadMode.GROUNDED)
    return replace(s, z=z, vx=0.0, vy=0.0, theta=0.0, phi=0.0, mode=QuadMode.LANDING)


def step(s: PlatformState, c: Command, h: float, spec: PlatformSpec,
         wind_ax: float = 0.0, wind_ay: float = 0.0) -> PlatformState:
    """Dispatch one integration step to the platform the spec describes."""
    if spec.kind is PlatformKind.DIFFDRIVE:
        return step_diffdrive(s, c, h, spec)
    return step_quad(s, c, h, spec, wind_ax, wind_ay)
