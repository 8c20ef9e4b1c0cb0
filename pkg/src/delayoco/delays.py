"""
Delay schedules, arrival sets and the in-flight feedback buffer.

Rounds are 1-based throughout. Feedback for the query made at round ``k``
with delay ``d_k`` becomes available at the end of round ``k + d_k - 1``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, NamedTuple, Sequence

import numpy as np

from .errors import ProtocolError, ScheduleError

ANONYMOUS = "anonymous"
STAMPED = "stamped"


@dataclass(frozen=True)
class DelaySchedule:
    delays: tuple[int, ...]
    kind: str = "custom"

    def __post_init__(self):
        delays = tuple(int(d) for d in self.delays)
        if len(delays) == 0:
            raise ScheduleError("delay schedule is empty")
        bad = [(k + 1, d) for k, d in enumerate(delays) if d < 1]
        if bad:
            raise ScheduleError(f"delays must be >= 1; offending (round, delay) pairs: {bad[:5]}")
        object.__setattr__(self, "delays", delays)

    @classmethod
    def periodic(cls, pattern: Sequence[int], T: int) -> "DelaySchedule":
        if len(pattern) == 0:
            raise ScheduleError("periodic pattern is empty")
        return cls(tuple(pattern[k % len(pattern)] for k in range(T)), "periodic")

    @classmethod
    def constant(cls, d: int, T: int) -> "DelaySchedule":
        return cls((d,) * T, "constant")

    @classmethod
    def unit(cls, T: int) -> "DelaySchedule":
        return cls((1,) * T, "unit")

    @property
    def T(self) -> int:
        return len(self.delays)

    @property
    def max_delay(self) -> int:
        return max(self.delays)

    @property
    def total_delay(self) -> int:
        """D, the sum of all delays."""
        return sum(self.delays)

    def delay(self, k: int) -> int:
        return self.delays[k - 1]


LOW_DELAY_PATTERN = (2, 3, 2, 1, 4, 1, 3)
HIGH_DELAY_PATTERN = (20, 30, 20, 10, 40, 10, 30)


def parse_schedule(text: str, T: int) -> DelaySchedule:
    """Build a schedule from CLI text.

    Accepted forms: ``periodic:2,3,2,1``, ``constant:4``, ``unit``, or a path
    to a UTF-8 file holding exactly ``T`` positive integers, one per line.
    """
    raw = text
    text = text.strip()
    head, _, tail = text.partition(":")
    try:
        if head == "periodic" and tail:
            return DelaySchedule.periodic([int(v) for v in tail.split(",")], T)
        if head == "constant" and tail:
            return DelaySchedule.constant(int(tail), T)
        if text == "unit":
            return DelaySchedule.unit(T)
    except ValueError as exc:
        if isinstance(exc, ScheduleError):
            raise
        raise ScheduleError(f"invalid schedule pattern {raw!r}: {exc}") from None
    path = Path(text)
    if not path.is_file():
        raise ScheduleError(f"invalid schedule {raw!r}: not a known pattern and no such file")
    return read_schedule_file(path, T)


def read_schedule_file(path: str | Path, T: int) -> DelaySchedule:
    lines = [ln.strip() for ln in Path(path).read_text(encoding="utf-8").splitlines()]
    lines = [ln for ln in lines if ln]
    try:
        delays = [int(ln) for ln in lines]
    except ValueError as exc:
        raise ScheduleError(f"{path}: {exc}") from None
    if len(delays) != T:
        raise ScheduleError(f"{path}: expected {T} delays, found {len(delays)}")
    return DelaySchedule(tuple(delays), "custom")


def write_schedule_file(schedule: DelaySchedule, path: str | Path) -> None:
    Path(path).write_text("".join(f"{d}\n" for d in schedule.delays), encoding="utf-8")


@dataclass(frozen=True)
class ArrivalSets:
    """``sets[t]`` lists the query rounds whose feedback lands at round t.

    Defined for ``t = 1 .. T + d - 1`` (rounds past T exist only so that
    every query is accounted for).
    """

    sets: dict[int, tuple[int, ...]]
    s: int
    T: int
    d: int

    def __getitem__(self, t: int) -> tuple[int, ...]:
        return self.sets.get(t, ())

    def sizes(self) -> np.ndarray:
        """|F_t| for t = 1 .. T+d-1 (index 0 is round 1)."""
        return np.array([len(self.sets[t]) for t in range(1, self.T + self.d)], dtype=int)

    @property
    def last_round(self) -> int:
        return self.T + self.d - 1


def arrival_sets(schedule: DelaySchedule, T: int | None = None) -> ArrivalSets:
    T = schedule.T if T is None else T
    if T != schedule.T:
        raise ScheduleError(f"schedule has {schedule.T} delays but T={T}")
    d = schedule.max_delay
    buckets: dict[int, list[int]] = {t: [] for t in range(1, T + d)}
    for k, dk in enumerate(schedule.delays, start=1):
        buckets[k + dk - 1].append(k)
    s = next(t for t in range(1, T + d) if buckets[t])
    return ArrivalSets({t: tuple(ks) for t, ks in buckets.items()}, s, T, d)


class Stamped(NamedTuple):
    """A delivered payload together with the round it was queried in."""

    round: int
    payload: Any


@dataclass
class FeedbackBuffer:
    """Feedback in flight between query and arrival.

    Within a round, payloads come out in ascending query round. In
    anonymous mode only the bare payloads are returned.
    """

    mode: str = ANONYMOUS
    _pending: dict[int, list[Stamped]] = field(default_factory=lambda: defaultdict(list), repr=False)
    _last_delivered: int = 0
    _count: int = 0

    def __post_init__(self):
        if self.mode not in (ANONYMOUS, STAMPED):
            raise ValueError(f"unknown buffer mode {self.mode!r}")

    def __len__(self) -> int:
        return self._count

    def enqueue(self, k: int, d_k: int, payload: Any) -> int:
        """Store ``payload`` from round ``k``; returns its arrival round."""
        if k < 1:
            raise ProtocolError(f"query round must be >= 1, got {k}")
        if d_k < 1:
            raise ScheduleError(f"delay must be >= 1, got {d_k}")
        arrival = k + d_k - 1
        if arrival <= self._last_delivered:
            raise ProtocolError(f"round {arrival} was already delivered; cannot enqueue into it")
        self._pending[arrival].append(Stamped(k, payload))
        self._count += 1
        return arrival

    def deliver(self, t: int) -> list:
        if t <= self._last_delivered:
            raise ProtocolError(f"round {t} requested after round {self._last_delivered} was delivered")
        missed = [a for a in self._pending if a < t]
        if missed:
            raise ProtocolError(f"delivery skipped rounds {sorted(missed)} that still hold feedback")
        self._last_delivered = t
        items = sorted(self._pending.pop(t, []), key=lambda item: item.round)
        self._count -= len(items)
        if self.mode == STAMPED:
            return items
        return [item.payload for item in items]

    def flush(self, start: int, stop: int) -> list:
        """Deliver rounds ``start .. stop`` inclusive and return everything that arrived."""
        out = []
        for t in range(start, stop + 1):
            out.extend(self.deliver(t))
        return out
