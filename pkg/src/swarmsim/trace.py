"""Trace recording and serialization.

A trace is one meta record plus a time-ordered list of events, serialized as
newline-delimited JSON (one self-describing object per line, UTF-8). The
format is the only coupling between the simulator that writes traces and the
monitor that judges them; docs/trace.md documents every field.

Serialization is canonical: keys are emitted in a fixed order and floats use
Python's shortest repr, so identical runs produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable

from .errors import MalformedTrace
from .geometry import Position3

FORMAT_VERSION = 1

# Event kinds a trace may contain.
KIND_POSE = "pose"
KIND_FLAG = "flag_change"
KIND_CALL = "reachavoid_call"
KIND_PLAN = "plan_result"
KIND_DSM_WRITE = "dsm_write"
KIND_DSM_DELIVER = "dsm_deliver"
KIND_APP_BLOCK = "app_block"
KIND_FAULT = "fault"


@dataclass(frozen=True, slots=True)
class RobotMeta:
    """Per-robot parameters the monitor needs to interpret a trace."""

    platform: str
    d_t: float
    q_d: float
    sensor_period: float


@dataclass(frozen=True, slots=True)
class TraceEvent:
    t: float
    robot: int | None  # None marks engine-level (system) events
    kind: str
    data: dict[str, Any]


@dataclass(slots=True)
class Trace:
    scenario: str
    seed: int
    robots: dict[int, RobotMeta]
    events: list[TraceEvent] = field(default_factory=list)

    def append(self, event: TraceEvent):
        self.events.append(event)

    def by_robot(self, robot: int) -> list[TraceEvent]:
        return [e for e in self.events if e.robot == robot]

    def end_time(self) -> float:
        return self.events[-1].t if self.events else 0.0


def encode_value(v):
    if isinstance(v, Position3):
        return {"$pos": [v.x, v.y, v.z]}
    return v


def decode_value(v):
    if isinstance(v, dict) and "$pos" in v:
        x, y, z = v["$pos"]
        return Position3(x, y, z)
    return v


def to_jsonl(trace: Trace) -> str:
    meta = {
        "kind": "meta",
        "version": FORMAT_VERSION,
        "scenario": trace.scenario,
        "seed": trace.seed,
        "robots": {
            str(rid): {
                "platform": m.platform,
                "d_t": m.d_t,
                "q_d": m.q_d,
                "sensor_period": m.sensor_period,
            }
            for rid, m in sorted(trace.robots.items())
        },
    }
    lines = [json.dumps(meta, separators=(",", ":"))]
    for e in trace.events:
        record = {"t": e.t, "robot": e.robot, "kind": e.kind}
        record.update(e.data)
        lines.append(json.dumps(record, separators=(",", ":")))
    return "\n".join(lines) + "\n"


def from_jsonl(text: str) -> Trace:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise MalformedTrace("empty trace file")
    head = json.loads(lines[0])
    if head.get("kind") != "meta":
        raise MalformedTrace("first record must be the meta record")
    robots = {
        int(rid): RobotMeta(
            platform=m["platform"],
            d_t=m["d_t"],
            q_d=m["q_d"],
            sensor_period=m["sensor_period"],
        )
        for rid, m in head.get("robots", {}).items()
    }
    trace = Trace(scenario=head.get("scenario", ""), seed=head.get("seed", 0), robots=robots)
    for line in lines[1:]:
        raw = json.loads(line)
        try:
            t = raw.pop("t")
            robot = raw.pop("robot")
            kind = raw.pop("kind")
        except KeyError as exc:
            raise MalformedTrace(f"event record missing field {exc}") from exc
        trace.append(TraceEvent(t=t, robot=robot, kind=kind, data=raw))
    return trace


def load(path) -> Trace:
    with open(path, "r", encoding="utf-8") as fh:
        return from_jsonl(fh.read())


def save(trace: Trace, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_jsonl(trace))


def export_csv(trace: Trace, robots: Iterable[int] | None = None) -> str:
    """Flatten a trace to one CSV row per pose sample.

    Columns: t, robot, x, y, z, epoch, done, failed, active, target_x,
    target_y, target_z. Flag and target columns hold the values current at
    the sample time (targets change only at reach-avoid calls).
    """
    selected = set(robots) if robots is not None else None
    flags: dict[int, dict[str, bool]] = {}
    targets: dict[int, tuple[float, float, float] | None] = {}
    rows = ["t,robot,x,y,z,epoch,done,failed,active,target_x,target_y,target_z"]
    for e in trace.events:
        if e.robot is None:
            continue
        if e.kind == KIND_CALL:
            targets[e.robot] = tuple(e.data["target"])
        elif e.kind == KIND_FLAG:
            flags.setdefault(e.robot, {"done": False, "failed": False, "active": False})[
                e.data["flag"]
            ] = e.data["value"]
        elif e.kind == KIND_POSE:
            if selected is not None and e.robot not in selected:
                continue
            f = flags.get(e.robot, {"done": False, "failed": False, "active": False})
            target = targets.get(e.robot)
            tx, ty, tz = target if target is not None else ("", "", "")
            rows.append(
                f"{e.t},{e.robot},{e.data['x']},{e.data['y']},{e.data['z']},"
                f"{e.data.get('epoch', 0)},{int(f['done'])},{int(f['failed'])},"
                f"{int(f['active'])},{tx},{ty},{tz}"
            )
    return "\n".join(rows) + "\n"
