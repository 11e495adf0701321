"""Core event types, measurement functions, and time normalization.

Timestamps are integer microseconds everywhere; normalization to the unit
interval happens only at measurement / kernel boundaries.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Sequence

import numpy as np

from .errors import DegenerateWindow, OutOfWindow


@dataclass(frozen=True)
class Event:
    """A single brightness-change record (x, y, t, p)."""

    x: int
    y: int
    t: int
    p: int

    def __post_init__(self):
        if self.p not in (-1, 1):
            raise ValueError(f"polarity must be -1 or +1, got {self.p}")
        if self.t < 0:
            raise ValueError(f"timestamp must be non-negative, got {self.t}")


class MeasurementKind(Enum):
    POLARITY = "polarity"
    COUNT = "count"
    TIMESTAMP = "timestamp"


class EventWindow:
    """A time-bounded batch of events on a W x H sensor, sorted by timestamp.

    Events are stored as parallel int64 arrays (xs, ys, ts, ps); the arrays
    are frozen after construction so windows can be shared across threads.
    An empty window is valid.
    """

    __slots__ = ("xs", "ys", "ts", "ps", "t0", "t1", "width", "height")

    def __init__(self, xs, ys, ts, ps, t0: int, t1: int,
                 width: int, height: int, sort: bool = False):
        xs = np.asarray(xs, dtype=np.int64)
        ys = np.asarray(ys, dtype=np.int64)
        ts = np.asarray(ts, dtype=np.int64)
        ps = np.asarray(ps, dtype=np.int64)
        if not (xs.ndim == ys.ndim == ts.ndim == ps.ndim == 1):
            raise ValueError("event arrays must be one-dimensional")
        if not (len(xs) == len(ys) == len(ts) == len(ps)):
            raise ValueError("event arrays must have equal length")
        if t1 <= t0:
            raise DegenerateWindow(f"t1 ({t1}) must exceed t0 ({t0})")
        if width < 1 or height < 1:
            raise ValueError("sensor must be at least 1x1")
        if len(ts) and ts.min() < 0:
            raise ValueError("timestamps must be non-negative")
        if len(ps) and not np.isin(ps, (-1, 1)).all():
            raise ValueError("polarities must be -1 or +1")
        if sort:
            order = np.argsort(ts, kind="stable")
            xs, ys, ts, ps = xs[order], ys[order], ts[order], ps[order]
        elif len(ts) > 1 and (np.diff(ts) < 0).any():
            raise ValueError("events must be sorted non-decreasing by t")
        # Freeze read-only views; caller-owned buffers stay untouched.
        def _frozen(a: np.ndarray) -> np.ndarray:
            v = a.view()
            v.setflags(write=False)
            return v

        self.xs, self.ys, self.ts, self.ps = map(_frozen, (xs, ys, ts, ps))
        self.t0, self.t1 = int(t0), int(t1)
        self.width, self.height = int(width), int(height)

    @classmethod
    def from_events(cls, events: Sequence[Event], t0: int | None = None,
                    t1: int | None = None, width: int = 1, height: int = 1,
                    sort: bool = True) -> "EventWindow":
        xs = [e.x for e in events]
        ys = [e.y for e in events]
        ts = [e.t for e in events]
        ps = [e.p for e in events]
        if t0 is None:
            t0 = min(ts) if ts else 0
        if t1 is None:
            t1 = max(ts) if ts else t0 + 1
        return cls(xs, ys, ts, ps, t0, t1, width, height, sort=sort)

    def __len__(self) -> int:
        return len(self.ts)

    def __iter__(self) -> Iterator[Event]:
        for x, y, t, p in zip(self.xs, self.ys, self.ts, self.ps):
            yield Event(int(x), int(y), int(t), int(p))

    def __eq__(self, other) -> bool:
        if not isinstance(other, EventWindow):
            return NotImplemented
        return (self.t0 == other.t0 and self.t1 == other.t1
                and self.width == other.width and self.height == other.height
                and np.array_equal(self.xs, other.xs)
                and np.array_equal(self.ys, other.ys)
                and np.array_equal(self.ts, other.ts)
                and np.array_equal(self.ps, other.ps))

    @property
    def duration(self) -> int:
        return self.t1 - self.t0

    def sorted_by_time(self) -> "EventWindow":
        """Stable re-sort; idempotent on a valid window."""
        return EventWindow(self.xs, self.ys, self.ts, self.ps, self.t0,
                           self.t1, self.width, self.height, sort=True)


def canonical_time(t, window: EventWindow, check: bool = True):
    """Map a timestamp (scalar or array) to [0, 1] within the window."""
    if window.t1 <= window.t0:
        raise DegenerateWindow(f"t1 ({window.t1}) must exceed t0 ({window.t0})")
    t = np.asarray(t, dtype=np.float64)
    if check:
        if np.any(t < window.t0) or np.any(t > window.t1):
            raise OutOfWindow(
                f"timestamp outside [{window.t0}, {window.t1}]")
    s = (t - window.t0) / (window.t1 - window.t0)
    return float(s) if s.ndim == 0 else s


def bin_coordinate(s, bins: int):
    """Scale a unit-interval time to the bin axis [0, B-1]."""
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    s = np.asarray(s, dtype=np.float64)
    out = s * (bins - 1)
    return float(out) if out.ndim == 0 else out


def measure(e: Event, kind: MeasurementKind, window: EventWindow) -> float:
    """Evaluate the measurement function for one event."""
    if kind is MeasurementKind.POLARITY:
        return float(e.p)
    if kind is MeasurementKind.COUNT:
        return 1.0
    return canonical_time(e.t, window)


def measurement_values(window: EventWindow, kind: MeasurementKind,
                       ts=None, ps=None) -> np.ndarray:
    """Vectorized measurement over (a subset of) a window's events."""
    ts = window.ts if ts is None else ts
    ps = window.ps if ps is None else ps
    if kind is MeasurementKind.POLARITY:
        return ps.astype(np.float64)
    if kind is MeasurementKind.COUNT:
        return np.ones(len(ts), dtype=np.float64)
    return canonical_time(ts, window, check=False)
