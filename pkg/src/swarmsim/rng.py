"""Named, reproducible random streams.

Every source of randomness in a run is a child stream derived from the
scenario's root seed by hashing a label, so the channel, the planners, the
application tie-breaks, the disturbance, and the sensor noise each consume
their own independent generator. Re-running with the same root seed replays
every stream exactly, regardless of how other streams are consumed.
"""

from __future__ import annotations

import hashlib
import random

STREAM_CHANNEL = "channel"
STREAM_PLANNER = "planner"
STREAM_APP_TIEBREAK = "app-tiebreak"
STREAM_DISTURBANCE = "disturbance"
STREAM_SENSOR_NOISE = "sensor-noise"


def derive_seed(root_seed: int, label: str) -> int:
    digest = hashlib.sha256(f"{root_seed}:{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def stream(root_seed: int, label: str, robot: int | None = None) -> random.Random:
    """Return the generator for `label` (optionally scoped to one robot)."""
    if robot is not None:
        label = f"{label}:{robot}"
    return random.Random(derive_seed(root_seed, label))
