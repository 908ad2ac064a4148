"""Closed-loop waypoint trackers, one per platform.

A tracker maps (current state, waypoint, gains) to one low-level command and
is called every control tick. Both trackers are pure functions; all feedback
state lives in the platform state they read.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import Position3, normalize_angle
from .platforms import (
    Command,
    Curve,
    DiffDriveState,
    Hover,
    PlatformKind,
    PlatformSpec,
    PlatformState,
    QuadState,
    SetAttitude,
    Straight,
    TakeOff,
    Turn,
)

# Heading error above which the ground robot turns in place instead of arcing.
TURN_THRESHOLD = 0.5


@dataclass(frozen=True, slots=True)
class TrackerGains:
    """Proportional gains and saturations for both trackers.

    k_turn/k_speed/v_max drive the ground robot; k_xy/k_vel/tilt_max/k_z
    drive the quad (k_vel is a velocity damping term, needed because pure
    position feedback through the attitude loop has no damping at all).
    """

    k_turn: float
    k_speed: float
    v_max: float
    k_xy: float
    tilt_max: float
    k_z: float
    accept_radius: float
    k_vel: float = 0.0

    def __post_init__(self):
        for name in ("k_turn", "k_speed", "v_max", "k_xy", "tilt_max", "k_z", "accept_radius"):
            if getattr(self, name) <= 0:
                raise ValueError(f"TrackerGains.{name} must be positive")
        if self.tilt_max >= math.pi / 2:
            raise ValueError("tilt_max must stay below pi/2")


def default_gains(spec: PlatformSpec) -> TrackerGains:
    """Gains tuned for the built-in platform specs; accept radius is kept
    inside the quantization distance so holding a waypoint keeps the reach
    predicate satisfied despite jitter."""
    accept = 0.6 * spec.q_d
    if spec.kind is PlatformKind.DIFFDRIVE:
        return TrackerGains(
            k_turn=2.0, k_speed=0.8, v_max=spec.limits.v_ref,
            k_xy=0.3, tilt_max=min(0.25, spec.limits.tilt), k_z=0.8,
            accept_radius=accept,
        )
    return TrackerGains(
        k_turn=2.0, k_speed=0.8, v_max=spec.limits.v_ref,
        k_xy=0.3, tilt_max=min(0.25, spec.limits.tilt), k_z=0.8,
        accept_radius=accept, k_vel=0.5,
    )


def _clip(v: float, bound: float) -> float:
    return -bound if v < -bound else bound if v > bound else v


def track_step_diffdrive(s: DiffDriveState, wp: Position3, g: TrackerGains,
                         spec: PlatformSpec) -> Command:
    """Turn toward the waypoint when badly misaligned, otherwise arc onto it;
    hold still once inside the accept radius. Requires wp.z = 0."""
    dx = wp.x - s.x
    dy = wp.y - s.y
    distance = math.hypot(dx, dy)
    if distance <= g.accept_radius:
        return Straight(0.0)

    heading_error = normalize_angle(math.atan2(dy, dx) - s.theta)
    if abs(heading_error) > TURN_THRESHOLD:
        return Turn(_clip(g.k_turn * heading_error, spec.limits.a_ref))

    v = _clip(g.k_speed * distance, g.v_max)
    omega = _clip(g.k_turn * heading_error, spec.limits.a_ref)
    if abs(omega) < 1e-9:
        return Straight(v)
    return Curve(v, v / omega)


def track_step_quad(s: QuadState, wp: Position3, g: TrackerGains,
                    spec: PlatformSpec) -> Command:
    """Tilt toward the waypoint with PD feedback on horizontal position and
    proportional vertical speed; take off first when grounded."""
    if not s.airborne:
        return TakeOff()

    # Desired horizontal correction in tilt units, from position error with
    # velocity damping.
    ux = g.k_xy * (wp.x - s.x) - g.k_vel * s.vx
    uy = g.k_xy * (wp.y - s.y) - g.k_vel * s.vy

    # Invert the tilt-to-acceleration map of the implemented model. Its
    # determinant, cos(2*psi), vanishes at |psi| = pi/4, so yaw is regulated
    # to a fixed zero reference and the determinant is clamped while yaw
    # transits the ill-conditioned band.
    sin_psi, cos_psi = math.sin(s.psi), math.cos(s.psi)
    det = cos_psi * cos_psi - sin_psi * sin_psi
    if abs(det) < 0.25:
        det = math.copysign(0.25, det) if det != 0.0 else 0.25
    phi_ref = _clip((sin_psi * ux + cos_psi * uy) / det, g.tilt_max)
    theta_ref = _clip(-(cos_psi * ux + sin_psi * uy) / det, g.tilt_max)
    gaz = _clip(g.k_z * (wp.z - s.z), spec.limits.gaz)
    return SetAttitude(0.0, theta_ref, phi_ref, gaz)


def track_step(s: PlatformState, wp: Position3, g: TrackerGains,
               spec: PlatformSpec) -> Command:
    if spec.kind is PlatformKind.DIFFDRIVE:
        return track_step_diffdrive(s, wp, g, spec)
    return track_step_quad(s, wp, g, spec)


def hold_command(s: PlatformState, g: TrackerGains, spec: PlatformSpec) -> Command:
    """Command that keeps the robot where it is (station-keeping)."""
    if spec.kind is PlatformKind.DIFFDRIVE:
        return Straight(0.0)
    if not s.airborne:
        return Hover()
    return track_step_quad(s, s.position(), g, spec)
