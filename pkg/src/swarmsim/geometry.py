"""Points, axis-aligned box regions, and the distances the control semantics is built on.

All coordinates live in one fixed global frame shared by every robot, in
meters. Ground platforms keep z = 0; distances are always Euclidean in 3D.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Identity of a participant. The n robots of a run are numbered 0..n-1.
RobotId = int

# Simulated time in seconds, >= 0 and non-decreasing along any execution.
SimTime = float

#: Distance to an empty region. Compares greater than every finite distance.
INFINITE_DISTANCE = math.inf


@dataclass(frozen=True, slots=True)
class Position3:
    """A point in the shared 3D frame. Coordinates must be finite."""

    x: float
    y: float
    z: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)):
            raise ValueError(f"non-finite coordinate in {(self.x, self.y, self.z)}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


@dataclass(frozen=True, slots=True)
class Box:
    """Closed axis-aligned box, min <= max componentwise."""

    min: Position3
    max: Position3

    def __post_init__(self):
        if self.min.x > self.max.x or self.min.y > self.max.y or self.min.z > self.max.z:
            raise ValueError(f"box min {self.min} exceeds max {self.max}")

    def contains(self, p: Position3) -> bool:
        return (
            self.min.x <= p.x <= self.max.x
            and self.min.y <= p.y <= self.max.y
            and self.min.z <= p.z <= self.max.z
        )

    def distance_to(self, p: Position3) -> float:
        dx = max(self.min.x - p.x, 0.0, p.x - self.max.x)
        dy = max(self.min.y - p.y, 0.0, p.y - self.max.y)
        dz = max(self.min.z - p.z, 0.0, p.z - self.max.z)
        # hypot, not sqrt-of-squares: squaring tiny offsets would underflow
        # and report containment for points just outside the box
        return math.hypot(dx, dy, dz)


@dataclass(frozen=True)
class Region:
    """A union of axis-aligned boxes; the empty union is the empty region."""

    boxes: tuple[Box, ...] = ()
    identifier: str = ""

    def __post_init__(self):
        object.__setattr__(self, "boxes", tuple(self.boxes))

    @property
    def is_empty(self) -> bool:
        return not self.boxes

    def contains(self, p: Position3) -> bool:
        return any(b.contains(p) for b in self.boxes)


EMPTY_REGION = Region()


def dist(a: Position3, b: Position3) -> float:
    """Euclidean distance between two points."""
    dx = a.x - b.x
    dy = a.y - b.y
    dz = a.z - b.z
    return math.sqrt(dx * dx + dy * dy + dz * dz)


def dist_to_region(p: Position3, r: Region) -> float:
    """Minimum Euclidean distance from p to any box of r.

    Returns 0 when p lies inside a box and INFINITE_DISTANCE for the
    empty region, so an empty unsafe set can never be "crossed".
    """
    if not r.boxes:
        return INFINITE_DISTANCE
    return min(b.distance_to(p) for b in r.boxes)


def midpoint(a: Position3, b: Position3) -> Position3:
    return Position3((a.x + b.x) / 2.0, (a.y + b.y) / 2.0, (a.z + b.z) / 2.0)


def dist_point_segment(p: Position3, a: Position3, b: Position3) -> float:
    """Distance from p to the closed segment [a, b]."""
    abx, aby, abz = b.x - a.x, b.y - a.y, b.z - a.z
    apx, apy, apz = p.x - a.x, p.y - a.y, p.z - a.z
    denom = abx * abx + aby * aby + abz * abz
    if denom == 0.0:
        return dist(p, a)
    t = (apx * abx + apy * aby + apz * abz) / denom
    t = 0.0 if t < 0.0 else 1.0 if t > 1.0 else t
    return dist(p, Position3(a.x + t * abx, a.y + t * aby, a.z + t * abz))


def normalize_angle(theta: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    wrapped = math.fmod(theta + math.pi, 2.0 * math.pi)
    if wrapped <= 0.0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi
