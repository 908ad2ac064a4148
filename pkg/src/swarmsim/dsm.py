"""Replicated shared variables over a lossy, delayed message channel.

Each robot holds a replica of every declared variable. A local write applies
immediately at the writer and emits one timestamped update per other
participant; deliveries apply last-writer-wins with a (time, robot id)
timestamp, so replays and reorderings are idempotent. Periodic rebroadcast of
the latest known (value, timestamp) restores convergence on lossy channels.

Variables are single-writer multi-reader by default; a variable declared with
writer MULTI may be written by anyone and converges by the same
last-writer-wins rule.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import UnknownVariable, WriteByNonWriter
from .geometry import Position3, RobotId, SimTime

#: Writer marker for multi-writer variables.
MULTI = None

Value = int | float | bool | str | Position3 | None

#: Lamport-style (time, writer id) pair; lexicographic order totalizes writes.
Timestamp = tuple[SimTime, RobotId]

#: Timestamp every declared variable starts with; any real write beats it.
INITIAL_TIMESTAMP: Timestamp = (-1.0, -1)


@dataclass(frozen=True, slots=True)
class SharedVarDecl:
    name: str
    writer: RobotId | None  # MULTI (= None) for multi-writer
    initial: Value = None


@dataclass(frozen=True, slots=True)
class DsmUpdate:
    name: str
    value: Value
    timestamp: Timestamp
    origin: RobotId
    dest: RobotId


@dataclass(frozen=True, slots=True)
class ChannelModel:
    min_delay: float = 0.01
    max_delay: float = 0.05
    loss_prob: float = 0.0
    rebroadcast_period: float = 0.5

    def __post_init__(self):
        if not (0 <= self.min_delay <= self.max_delay):
            raise ValueError("need 0 <= min_delay <= max_delay")
        if not (0 <= self.loss_prob < 1):
            raise ValueError("need 0 <= loss_prob < 1")
        if self.rebroadcast_period <= 0:
            raise ValueError("rebroadcast_period must be positive")


class DsmReplica:
    """One robot's copy of the shared variables."""

    def __init__(self, robot: RobotId, participants: list[RobotId],
                 decls: list[SharedVarDecl]):
        self.robot = robot
        self.participants = list(participants)
        self.decls = {d.name: d for d in decls}
        self._store: dict[str, tuple[Value, Timestamp]] = {
            d.name: (d.initial, INITIAL_TIMESTAMP) for d in decls
        }
        self._next_rebroadcast: SimTime = 0.0
        # Applied-value history per variable, for the subsequence invariant.
        self.applied_log: dict[str, list[Value]] = {d.name: [] for d in decls}

    def read(self, name: str) -> Value:
        if name not in self._store:
            raise UnknownVariable(name)
        return self._store[name][0]

    def timestamp(self, name: str) -> Timestamp:
        return self._store[name][1]

    def snapshot(self) -> dict[str, tuple[Value, Timestamp]]:
        return dict(self._store)

    def write(self, name: str, value: Value, now: SimTime) -> list[DsmUpdate]:
        """Apply a local write and return one update per other participant.

        Raises WriteByNonWriter when a single-writer variable is written by
        a robot other than its declared writer.
        """
        decl = self.decls.get(name)
        if decl is None:
            raise UnknownVariable(name)
        if decl.writer is not MULTI and decl.writer != self.robot:
            raise WriteByNonWriter(
                f"robot {self.robot} cannot write {name!r} (writer is {decl.writer})"
            )
        ts: Timestamp = (now, self.robot)
        self._store[name] = (value, ts)
        self.applied_log[name].append(value)
        return [
            DsmUpdate(name, value, ts, self.robot, dest)
            for dest in self.participants
            if dest != self.robot
        ]

    def deliver(self, u: DsmUpdate) -> bool:
        """Apply an incoming update if it is newer; returns whether state changed."""
        if u.name not in self._store:
            raise UnknownVariable(u.name)
        _, current_ts = self._store[u.name]
        if u.timestamp > current_ts:
            self._store[u.name] = (u.value, u.timestamp)
            self.applied_log[u.name].append(u.value)
            return True
        return False

    def tick_rebroadcast(self, now: SimTime, period: float) -> list[DsmUpdate]:
        """Re-emit the latest (value, timestamp) of every variable this
        replica may broadcast, at most once per period. Single-writer
        variables are rebroadcast by their writer; multi-writer variables by
        everyone (the last-writer-wins rule discards stale copies)."""
        if now < self._next_rebroadcast:
            return []
        self._next_rebroadcast = now + period
        out: list[DsmUpdate] = []
        for name, decl in self.decls.items():
            if decl.writer is not MULTI and decl.writer != self.robot:
                continue
            value, ts = self._store[name]
            if ts == INITIAL_TIMESTAMP:
                continue
            out.extend(
                DsmUpdate(name, value, ts, self.robot, dest)
                for dest in self.participants
                if dest != self.robot
            )
        return out


class Channel:
    """Samples per-message loss and delay for updates entering the network."""

    def __init__(self, model: ChannelModel, rng: random.Random):
        self.model = model
        self.rng = rng

    def send(self, updates: list[DsmUpdate], now: SimTime) -> list[tuple[SimTime, DsmUpdate]]:
        """Return (delivery time, update) pairs for the messages that survive."""
        out = []
        for u in updates:
            lost = self.rng.random() < self.model.loss_prob
            delay = self.rng.uniform(self.model.min_delay, self.model.max_delay)
            if not lost:
                out.append((now + delay, u))
        return out
