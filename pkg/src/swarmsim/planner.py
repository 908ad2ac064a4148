"""Safe path planning: an RRT whose steering primitive is the real tracker
simulated against the platform dynamics.

Every candidate edge is validated by running the closed loop from the parent
node's stored platform state toward the sample; the edge is accepted only if
the whole simulated trajectory keeps the configured clearance from the unsafe
region and actually converges onto the sample. Samples that cannot be reached
are retried at the halfway point until the segment drops below a minimum
length. Planning stops at a tree-size threshold.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .geometry import Box, Position3, Region, dist, dist_to_region
from .platforms import PlatformKind, PlatformSpec, PlatformState, state_position, step
from .tracker import TrackerGains, track_step


@dataclass(frozen=True, slots=True)
class PlanParams:
    sample_bounds: Box
    max_tree_size: int = 500
    clearance_margin: float = 0.0   # 0 selects the platform default (= q_d)
    min_extend_dist: float = 0.0    # 0 selects the platform default (= q_d / 2)
    goal_radius: float = 0.0        # 0 selects the platform default (= q_d)
    goal_bias: float = 0.1
    steer_horizon: float = 10.0     # simulated seconds per extension attempt

    def resolved(self, spec: PlatformSpec) -> "PlanParams":
        """Fill the q_d-derived defaults for a concrete platform."""
        margin = self.clearance_margin or spec.q_d
        min_ext = self.min_extend_dist or spec.q_d / 2.0
        goal_r = self.goal_radius or spec.q_d
        if goal_r < spec.q_d:
            raise ValueError("goal_radius must be at least q_d")
        return PlanParams(self.sample_bounds, self.max_tree_size, margin,
                          min_ext, goal_r, self.goal_bias, self.steer_horizon)


@dataclass(slots=True)
class RrtNode:
    pos: Position3
    parent: int | None
    sim_state: PlatformState


@dataclass(slots=True)
class RrtTree:
    nodes: list[RrtNode] = field(default_factory=list)

    def nearest(self, p: Position3) -> int:
        best, best_d = 0, math.inf
        for i, node in enumerate(self.nodes):
            d = dist(node.pos, p)
            if d < best_d:
                best, best_d = i, d
        return best

    def path_to(self, index: int) -> list[Position3]:
        rev: list[Position3] = []
        cursor: int | None = index
        while cursor is not None and cursor != 0:
            node = self.nodes[cursor]
            rev.append(node.pos)
            cursor = node.parent
        rev.reverse()
        return rev


@dataclass(frozen=True, slots=True)
class Added:
    index: int


@dataclass(frozen=True, slots=True)
class Rejected:
    pass


ExtendOutcome = Added | Rejected


@dataclass(frozen=True, slots=True)
class PlanResult:
    waypoints: tuple[Position3, ...] | None

    @property
    def found(self) -> bool:
        return self.waypoints is not None


def path_found(waypoints) -> PlanResult:
    return PlanResult(tuple(waypoints))


NO_PATH_FOUND = PlanResult(None)


def simulate_tracking(
    start: PlatformState,
    wp: Position3,
    spec: PlatformSpec,
    gains: TrackerGains,
    unsafe: Region,
    margin: float,
    horizon: float,
) -> tuple[bool, PlatformState]:
    """Run tracker + dynamics toward wp for at most `horizon` simulated
    seconds. Succeeds when the position enters the tracker's accept radius
    with every intermediate pose at least `margin` away from the unsafe
    region; fails on a clearance violation or when the horizon expires.
    """
    h = spec.integration_step
    ticks_per_control = max(1, round(spec.sensor_period / h))
    n_steps = round(horizon / h)

    state = start
    command = None
    check_clearance = not unsafe.is_empty
    accept = gains.accept_radius
    for i in range(n_steps):
        if i % ticks_per_control == 0:
            pos = state_position(state)
            if check_clearance and dist_to_region(pos, unsafe) < margin:
                return False, state
            if dist(pos, wp) <= accept:
                return True, state
            command = track_step(state, wp, gains, spec)
        state = step(state, command, h, spec)
        if check_clearance and dist_to_region(state_position(state), unsafe) < margin:
            return False, state
    pos = state_position(state)
    if check_clearance and dist_to_region(pos, unsafe) < margin:
        return False, state
    return dist(pos, wp) <= accept, state


def extend(
    tree: RrtTree,
    sample: Position3,
    unsafe: Region,
    spec: PlatformSpec,
    gains: TrackerGains,
    p: PlanParams,
) -> ExtendOutcome:
    """Try to grow the tree toward `sample`, halving the segment on failure
    until it falls below the minimum extension length."""
    near_index = tree.nearest(sample)
    near = tree.nodes[near_index]
    target = sample
    while dist(near.pos, target) >= p.min_extend_dist:
        ok, end_state = simulate_tracking(
            near.sim_state, target, spec, gains, unsafe, p.clearance_margin, p.steer_horizon
        )
        if ok:
            tree.nodes.append(RrtNode(target, near_index, end_state))
            return Added(len(tree.nodes) - 1)
        target = Position3(
            (near.pos.x + target.x) / 2.0,
            (near.pos.y + target.y) / 2.0,
            (near.pos.z + target.z) / 2.0,
        )
    return Rejected()


def _sample_point(bounds: Box, rng: random.Random, ground: bool) -> Position3:
    x = rng.uniform(bounds.min.x, bounds.max.x)
    y = rng.uniform(bounds.min.y, bounds.max.y)
    z = 0.0 if ground else rng.uniform(bounds.min.z, bounds.max.z)
    return Position3(x, y, z)


def plan(
    current_pos: Position3,
    current_state: PlatformState,
    target_pos: Position3,
    unsafe: Region,
    spec: PlatformSpec,
    gains: TrackerGains,
    params: PlanParams,
    rng: random.Random,
) -> PlanResult:
    """Grow an RRT from the current state until some node lands within the
    goal radius of the target or the size threshold is hit.

    The target itself is sampled with probability `goal_bias` (and first of
    all), and a goal hit that is not exactly on the target is refined with
    one direct extension toward it so the returned path normally ends at the
    target position itself.
    """
    p = params.resolved(spec)
    if unsafe.contains(current_pos):
        return NO_PATH_FOUND
    if dist(current_pos, target_pos) <= p.goal_radius:
        return path_found([target_pos])

    ground = spec.kind is PlatformKind.DIFFDRIVE
    tree = RrtTree([RrtNode(current_pos, None, current_state)])
    first = True
    while len(tree.nodes) < p.max_tree_size:
        if first or rng.random() < p.goal_bias:
            sample = target_pos
        else:
            sample = _sample_point(p.sample_bounds, rng, ground)
        first = False

        outcome = extend(tree, sample, unsafe, spec, gains, p)
        if isinstance(outcome, Rejected):
            continue
        node = tree.nodes[outcome.index]
        if dist(node.pos, target_pos) > p.goal_radius:
            continue
        goal_index = outcome.index
        if node.pos != target_pos:
            refined = extend(tree, target_pos, unsafe, spec, gains, p)
            if isinstance(refined, Added):
                goal_index = refined.index
        return path_found(tree.path_to(goal_index))
    return NO_PATH_FOUND
