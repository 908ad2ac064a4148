"""The reach-avoid controller and its shared variable holder.

The variable holder carries the six control API variables. Three writers
touch disjoint fields: the application (targetPos, unsafePos via
do_reach_avoid), the sensor task (currentPos), and the controller (the
active/done/failed flags). The controller evaluates the reach and crossed
predicates every tick, requires them to persist for the platform's dwell
time before latching done or failed, gives crossing priority over reaching
when both dwell windows complete on the same tick, and drops active without
setting either flag when the planner reports that no safe path exists.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from .geometry import (
    Position3,
    Region,
    SimTime,
    dist,
    dist_point_segment,
    dist_to_region,
)
from .planner import NO_PATH_FOUND, PlanParams, PlanResult, plan
from .platforms import Command, PlatformSpec, PlatformState
from .tracker import TrackerGains, hold_command, track_step

Recorder = Callable[..., None]


@dataclass(slots=True)
class VariableHolder:
    """Per-robot control API state (the six shared variables plus an epoch
    counter scoping them to the latest reach-avoid call)."""

    current_pos: Position3
    target_pos: Position3 | None = None
    unsafe_pos: Region = field(default_factory=Region)
    active: bool = False
    done: bool = False
    failed: bool = False
    epoch: int = 0


@dataclass(slots=True)
class DwellDetector:
    """Tracks how long a sampled predicate has held continuously."""

    true_since: SimTime | None = None

    def update(self, truth: bool, now: SimTime) -> float:
        if not truth:
            self.true_since = None
            return -1.0
        if self.true_since is None:
            self.true_since = now
        return now - self.true_since

    def reset(self):
        self.true_since = None


class RobotController:
    """Owns one robot's variable holder, dwell detectors, and planned path.

    Planning is budgeted: a plan is computed from the state snapshot at
    request time but its result only becomes visible after the configured
    latency, and the tracker keeps following the previous waypoint list in
    the meantime.
    """

    def __init__(
        self,
        start_pos: Position3,
        spec: PlatformSpec,
        gains: TrackerGains,
        plan_params: PlanParams,
        planner_rng: random.Random,
        plan_latency: float = 0.2,
    ):
        self.vh = VariableHolder(current_pos=start_pos)
        self.spec = spec
        self.gains = gains
        self.plan_params = plan_params
        self.planner_rng = planner_rng
        self.plan_latency = plan_latency
        self.replan_deviation = 2.0 * spec.q_d

        self._pending: tuple[SimTime, PlanResult] | None = None
        self._waypoints: list[Position3] = []
        self._polyline: list[Position3] = []
        self._no_path = False
        self._failure_pos: Position3 | None = None
        self._hold_pos: Position3 = start_pos
        self._reach_dwell = DwellDetector()
        self._crossed_dwell = DwellDetector()

    # -- application writer --------------------------------------------------

    def do_reach_avoid(self, x: Position3, u: Region, now: SimTime,
                       state: PlatformState, record: Recorder) -> None:
        """Set a new target and unsafe region, reset the flags, start a new
        epoch, and kick off planning."""
        vh = self.vh
        vh.target_pos = x
        vh.unsafe_pos = u
        vh.epoch += 1
        record("reachavoid_call", epoch=vh.epoch, target=x.as_tuple(),
               unsafe=[(b.min.as_tuple(), b.max.as_tuple()) for b in u.boxes])
        self._set_flag("done", False, now, record)
        self._set_flag("failed", False, now, record)
        self._set_flag("active", True, now, record)
        self._reach_dwell.reset()
        self._crossed_dwell.reset()
        self._no_path = False
        self._failure_pos = None
        self._request_plan(now, state)

    # -- sensor writer ---------------------------------------------------------

    def sensor_update(self, recorded_pos: Position3) -> None:
        self.vh.current_pos = recorded_pos

    # -- controller writer -----------------------------------------------------

    def controller_tick(self, now: SimTime, state: PlatformState,
                        record: Recorder) -> Command:
        """One control step: apply due plan results, run dwell detection on
        the reach/crossed predicates, update flags, and emit the motion
        command for this tick."""
        vh = self.vh
        self._apply_pending(now, record)

        if vh.target_pos is not None and not vh.done and not vh.failed:
            reach = dist(vh.current_pos, vh.target_pos) <= self.spec.q_d
            crossed = dist_to_region(vh.current_pos, vh.unsafe_pos) <= self.spec.q_d
            crossed_held = self._crossed_dwell.update(crossed, now)
            reach_held = self._reach_dwell.update(reach, now)
            if crossed_held >= self.spec.d_t:
                self._set_flag("failed", True, now, record)
                self._set_flag("active", False, now, record)
                self._hold_pos = vh.current_pos
            elif reach_held >= self.spec.d_t:
                self._set_flag("done", True, now, record)
                self._set_flag("active", False, now, record)
                self._hold_pos = vh.target_pos

        if vh.done or vh.failed:
            return track_step(state, self._hold_pos, self.gains, self.spec)

        if self._no_path:
            # Best-effort signal was raised; replan only once the robot has
            # actually moved away from where planning failed.
            if (self._failure_pos is not None
                    and dist(vh.current_pos, self._failure_pos) > self.replan_deviation
                    and self._pending is None):
                self._failure_pos = vh.current_pos
                self._request_plan(now, state)
            return track_step(state, self._hold_pos, self.gains, self.spec)

        if not self._waypoints:
            return hold_command(state, self.gains, self.spec)

        while (len(self._waypoints) > 1
               and dist(vh.current_pos, self._waypoints[0]) <= self.gains.accept_radius):
            self._waypoints.pop(0)

        if (self._pending is None and self._polyline
                and self._path_deviation(vh.current_pos) > self.replan_deviation):
            self._request_plan(now, state)

        return track_step(state, self._waypoints[0], self.gains, self.spec)

    # -- internals ---------------------------------------------------------------

    def _set_flag(self, name: str, value: bool, now: SimTime, record: Recorder):
        vh = self.vh
        if getattr(vh, name) != value:
            setattr(vh, name, value)
            record("flag_change", epoch=vh.epoch, flag=name, value=value)

    def _request_plan(self, now: SimTime, state: PlatformState):
        result = plan(
            self.vh.current_pos,
            state,
            self.vh.target_pos,
            self.vh.unsafe_pos,
            self.spec,
            self.gains,
            self.plan_params,
            self.planner_rng,
        )
        self._pending = (now + self.plan_latency, result)

    def _apply_pending(self, now: SimTime, record: Recorder):
        if self._pending is None:
            return
        ready, result = self._pending
        if now < ready:
            return
        self._pending = None
        vh = self.vh
        record("plan_result", epoch=vh.epoch, found=result.found,
               n_waypoints=len(result.waypoints or ()))
        if result.found:
            self._waypoints = list(result.waypoints)
            self._polyline = [vh.current_pos, *result.waypoints]
            self._no_path = False
            self._failure_pos = None
            if not vh.done and not vh.failed:
                self._set_flag("active", True, now, record)
        else:
            self._waypoints = []
            self._polyline = []
            self._no_path = True
            self._failure_pos = vh.current_pos
            self._hold_pos = vh.current_pos
            self._set_flag("active", False, now, record)

    def _path_deviation(self, p: Position3) -> float:
        pts = self._polyline
        best = dist(p, pts[0])
        for a, b in zip(pts, pts[1:]):
            d = dist_point_segment(p, a, b)
            if d < best:
                best = d
        return best
