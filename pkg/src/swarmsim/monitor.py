"""Offline checker for the reach-avoid flag semantics.

Given a recorded trace and each robot's dwell time d_t and quantization
distance q_d, the checker splits every robot's timeline into epochs (one per
reach-avoid call, ending at the next call or at the end of the trace) and
verifies five conditions per epoch:

  D1  done implies an earlier reach sample in the same epoch
  D2  reach persisting for d_t implies done holds on a suffix of the epoch
  F1  failed implies an earlier crossed sample in the same epoch
  F2  crossed persisting for d_t implies failed holds on a suffix
  A1  active is never preceded by done or failed within the epoch

The continuous-time conditions are discharged over the recorded samples:

  * reach/crossed are evaluated at pose samples against the epoch's target
    and unsafe region, and held constant until the next sample;
  * "persists on [t1, t1+d_t]" means: t1 is a pose sample strictly after the
    epoch start, the window lies inside the epoch, every pose sample in the
    closed window satisfies the predicate, and the window holds at least
    ceil(d_t / sensor_period) samples;
  * quantified time points range over the epoch's grid: its boundaries plus
    every pose sample and flag change in it (a suffix witness t2 must lie in
    the epoch, so an empty suffix never discharges D2/F2).

D2/F2 verdicts follow the conditions as stated; the bounded detection
latency the runtime additionally promises (flag within one sensor period of
the first completed window) is reported per epoch in a separate latency
field and never turns a verdict into FAIL.

The checker is deliberately independent of the controller: it reads only the
trace format.
"""

from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass

from .errors import MalformedTrace
from .geometry import Box, Position3, Region, dist, dist_to_region
from .trace import KIND_CALL, KIND_FLAG, KIND_POSE, RobotMeta, Trace

CONDITIONS = ("D1", "D2", "F1", "F2", "A1")


class Status(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    VACUOUS = "VACUOUS"


@dataclass(frozen=True, slots=True)
class Verdict:
    robot: int
    epoch: int
    condition: str
    status: Status
    witness: str | None = None
    latency: float | None = None          # flag delay past the first window
    latency_exceeded: bool = False        # above the documented bound


@dataclass(slots=True)
class EpochData:
    """Everything condition evaluation needs, reconstructed per epoch."""

    robot: int
    epoch: int
    t0: float
    t_end: float
    target: Position3
    unsafe: Region
    sensor_period: float
    d_t: float
    q_d: float
    # grid: sorted evaluation times; at each grid time the sampled values of
    # the predicates (from the last pose at or before it) and the flags.
    grid: list[float]
    reach: list[bool]
    crossed: list[bool]
    done: list[bool]
    failed: list[bool]
    active: list[bool]
    pose_times: list[float]


def _parse_region(raw) -> Region:
    boxes = [
        Box(Position3(*lo), Position3(*hi))
        for lo, hi in raw
    ]
    return Region(boxes)


def _validate(trace: Trace):
    last_t = -math.inf
    for e in trace.events:
        if e.t < last_t:
            raise MalformedTrace(f"event time goes backwards at t={e.t}")
        last_t = e.t
        if e.kind == KIND_FLAG and "epoch" not in e.data:
            raise MalformedTrace(f"flag change without epoch at t={e.t}")


def reconstruct_epochs(trace: Trace, params: dict[int, RobotMeta]) -> list[EpochData]:
    """Split each robot's events into per-epoch sampled timelines."""
    _validate(trace)
    t_end_global = trace.end_time()
    epochs: list[EpochData] = []

    for robot in sorted({e.robot for e in trace.events if e.robot is not None}):
        meta = params.get(robot)
        if meta is None:
            continue
        events = trace.by_robot(robot)
        calls = [e for e in events if e.kind == KIND_CALL]
        if not calls:
            continue
        call_epochs = [c.data["epoch"] for c in calls]
        known = set(call_epochs)
        for e in events:
            if e.kind == KIND_FLAG and e.data["epoch"] not in known:
                raise MalformedTrace(
                    f"robot {robot}: flag change for unknown epoch {e.data['epoch']}"
                )

        poses = [(e.t, Position3(e.data["x"], e.data["y"], e.data["z"]))
                 for e in events if e.kind == KIND_POSE]
        pose_clock = [t for t, _ in poses]

        # Flag values carried into each epoch: walk events in file order and
        # snapshot right before each call; changes tagged with an epoch apply
        # within that epoch only.
        flags = {"done": False, "failed": False, "active": False}
        flag_events = [e for e in events if e.kind == KIND_FLAG]

        for k, call in enumerate(calls):
            t0 = call.t
            t_end = calls[k + 1].t if k + 1 < len(calls) else t_end_global
            epoch_id = call.data["epoch"]
            target = Position3(*call.data["target"])
            unsafe = _parse_region(call.data["unsafe"])

            epoch_flags = [e for e in flag_events if e.data["epoch"] == epoch_id]
            pose_in = [(t, p) for t, p in poses if t0 <= t <= t_end]

            grid = sorted({t0, t_end}
                          | {t for t, _ in pose_in}
                          | {e.t for e in epoch_flags})

            # sample-and-hold position over the whole robot timeline
            reach, crossed = [], []
            for t in grid:
                i = bisect.bisect_right(pose_clock, t) - 1
                if i < 0:
                    reach.append(False)
                    crossed.append(False)
                else:
                    p = poses[i][1]
                    reach.append(dist(p, target) <= meta.q_d)
                    crossed.append(dist_to_region(p, unsafe) <= meta.q_d)

            done, failed, active = [], [], []
            state = dict(flags)
            idx = 0
            ordered = sorted(epoch_flags, key=lambda e: e.t)
            for t in grid:
                while idx < len(ordered) and ordered[idx].t <= t:
                    state[ordered[idx].data["flag"]] = bool(ordered[idx].data["value"])
                    idx += 1
                done.append(state["done"])
                failed.append(state["failed"])
                active.append(state["active"])

            # Carry flag state across the boundary: apply this epoch's events
            # so the next epoch starts from where this one ended.
            for e in ordered:
                flags[e.data["flag"]] = bool(e.data["value"])

            epochs.append(EpochData(
                robot=robot, epoch=epoch_id, t0=t0, t_end=t_end,
                target=target, unsafe=unsafe,
                sensor_period=meta.sensor_period, d_t=meta.d_t, q_d=meta.q_d,
                grid=grid, reach=reach, crossed=crossed,
                done=done, failed=failed, active=active,
                pose_times=[t for t, _ in pose_in],
            ))
    return epochs


def _persistence_windows(ep: EpochData, pred: list[bool]) -> list[float]:
    """Start times (pose samples, strictly after t0) of windows where the
    predicate holds at every pose sample of [t1, t1 + d_t] within the epoch,
    with enough samples to discharge the continuous condition."""
    min_samples = math.ceil(ep.d_t / ep.sensor_period - 1e-9)
    pred_at = dict(zip(ep.grid, pred))
    times = ep.pose_times
    true_prefix = [0]
    for t in times:
        true_prefix.append(true_prefix[-1] + (1 if pred_at[t] else 0))
    out = []
    for i, t1 in enumerate(times):
        if t1 <= ep.t0 or t1 + ep.d_t > ep.t_end + 1e-12:
            continue
        j = bisect.bisect_right(times, t1 + ep.d_t + 1e-12)
        count = j - i
        if count < min_samples:
            continue
        if true_prefix[j] - true_prefix[i] == count:
            out.append(t1)
    return out


def _first_true(grid: list[float], values: list[bool]) -> float | None:
    for t, v in zip(grid, values):
        if v:
            return t
    return None


def _check_precedence(ep: EpochData, flag: list[bool], pred: list[bool],
                      flag_name: str, pred_name: str) -> tuple[Status, str | None]:
    """D1/F1: every time the flag holds, the predicate must have held at some
    grid point earlier in the epoch (or at the same time)."""
    if not any(flag):
        return Status.VACUOUS, None
    pred_seen = False
    for t, f, p in zip(ep.grid, flag, pred):
        pred_seen = pred_seen or p
        if f and not pred_seen:
            return Status.FAIL, (
                f"{flag_name} at t={t:.6g} with no prior {pred_name} in epoch"
            )
    return Status.PASS, None


def _check_persistence(ep: EpochData, pred: list[bool], flag: list[bool],
                       flag_name: str, pred_name: str
                       ) -> tuple[Status, str | None, float | None, bool]:
    """D2/F2: a persisting predicate obliges the flag to hold on a suffix."""
    windows = _persistence_windows(ep, pred)
    if not windows:
        return Status.VACUOUS, None, None, False
    # The flag must hold at every grid point from some t2 > t1 to the epoch
    # end; with a nonempty epoch grid that is exactly "true at the last grid
    # point and from the start of its final true-run, which must be > t1".
    # Every persisting t1 satisfies t1 < t_end, and t_end is on the grid, so
    # a suffix witness t2 > t1 exists exactly when the flag holds at the last
    # grid point (the suffix then extends back to the start of its final
    # true-run, which covers every grid point after any such t1).
    if not flag[-1]:
        t1 = windows[0]
        return Status.FAIL, (
            f"{pred_name} persists on [{t1:.6g}, {t1 + ep.d_t:.6g}] but "
            f"{flag_name} does not hold at the epoch end"
        ), None, False
    earliest_end = windows[0] + ep.d_t
    fire = _first_true(ep.grid, flag)
    latency = max(0.0, fire - earliest_end) if fire is not None else None
    exceeded = latency is not None and latency > ep.sensor_period + 1e-9
    return Status.PASS, None, latency, exceeded


def _check_no_precedent(ep: EpochData) -> tuple[Status, str | None]:
    """A1: active implies neither done nor failed at any earlier grid point."""
    if not any(ep.active):
        return Status.VACUOUS, None
    seen_done: float | None = None
    seen_failed: float | None = None
    for t, a, d, f in zip(ep.grid, ep.active, ep.done, ep.failed):
        if d and seen_done is None:
            seen_done = t
        if f and seen_failed is None:
            seen_failed = t
        if a and (seen_done is not None or seen_failed is not None):
            prior = "done" if seen_done is not None else "failed"
            prior_t = seen_done if seen_done is not None else seen_failed
            return Status.FAIL, f"active at t={t:.6g} after {prior} at t={prior_t:.6g}"
    return Status.PASS, None


def check_epoch(ep: EpochData) -> list[Verdict]:
    out = []
    status, witness = _check_precedence(ep, ep.done, ep.reach, "done", "reach")
    out.append(Verdict(ep.robot, ep.epoch, "D1", status, witness))
    status, witness, latency, exceeded = _check_persistence(
        ep, ep.reach, ep.done, "done", "reach")
    out.append(Verdict(ep.robot, ep.epoch, "D2", status, witness, latency, exceeded))
    status, witness = _check_precedence(ep, ep.failed, ep.crossed, "failed", "crossed")
    out.append(Verdict(ep.robot, ep.epoch, "F1", status, witness))
    status, witness, latency, exceeded = _check_persistence(
        ep, ep.crossed, ep.failed, "failed", "crossed")
    out.append(Verdict(ep.robot, ep.epoch, "F2", status, witness, latency, exceeded))
    status, witness = _check_no_precedent(ep)
    out.append(Verdict(ep.robot, ep.epoch, "A1", status, witness))
    return out


def check_trace(trace: Trace, overrides: dict[int, RobotMeta] | None = None) -> list[Verdict]:
    """Verify all five conditions for every robot and epoch of a trace.

    Parameters default to the per-robot metadata embedded in the trace;
    `overrides` replaces entries per robot id.
    """
    params = dict(trace.robots)
    if overrides:
        params.update(overrides)
    verdicts = []
    for ep in reconstruct_epochs(trace, params):
        verdicts.extend(check_epoch(ep))
    return verdicts


@dataclass(frozen=True, slots=True)
class Summary:
    counts: dict[str, dict[str, int]]
    failures: tuple[Verdict, ...]
    latency_exceeded: tuple[Verdict, ...]
    any_fail: bool

    def exit_code(self) -> int:
        return 2 if self.any_fail else 0


def summarize(verdicts: list[Verdict]) -> tuple[str, Summary]:
    counts = {c: {s.value: 0 for s in Status} for c in CONDITIONS}
    failures = []
    slow = []
    for v in verdicts:
        counts[v.condition][v.status.value] += 1
        if v.status is Status.FAIL:
            failures.append(v)
        if v.latency_exceeded:
            slow.append(v)
    lines = ["condition  pass  fail  vacuous"]
    for c in CONDITIONS:
        row = counts[c]
        lines.append(f"{c:<9} {row['PASS']:>5} {row['FAIL']:>5} {row['VACUOUS']:>8}")
    for v in failures:
        lines.append(f"FAIL {v.condition} robot={v.robot} epoch={v.epoch}: {v.witness}")
    for v in slow:
        lines.append(
            f"latency {v.condition} robot={v.robot} epoch={v.epoch}: "
            f"{v.latency:.3f}s past the dwell window"
        )
    summary = Summary(counts, tuple(failures), tuple(slow), bool(failures))
    lines.append("RESULT: " + ("FAIL" if failures else "PASS"))
    return "\n".join(lines) + "\n", summary


def verdicts_payload(verdicts: list[Verdict]) -> list[dict]:
    """Machine-readable form of a verdict list."""
    return [
        {
            "robot": v.robot,
            "epoch": v.epoch,
            "condition": v.condition,
            "status": v.status.value,
            "witness": v.witness,
            "latency": v.latency,
            "latency_exceeded": v.latency_exceeded,
        }
        for v in verdicts
    ]
