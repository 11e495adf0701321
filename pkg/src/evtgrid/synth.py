"""Synthetic event generation from intensity-frame sequences.

Events follow the log brightness-change model: per pixel, a reference
level tracks the log intensity seen at the last event; whenever the
linearly interpolated log intensity moves a full contrast step C away from
the reference, an event is emitted at the interpolated crossing time and
the reference advances by exactly C.  The threshold is closed: crossings
landing exactly on C are emitted.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSequence, ParseError
from .events import EventWindow


@dataclass(frozen=True)
class FrameSequence:
    """Timestamped intensity frames plus the contrast threshold."""

    timestamps: np.ndarray  # microseconds, strictly increasing
    frames: np.ndarray      # (F, H, W), strictly positive intensities
    contrast: float

    def __post_init__(self):
        timestamps = np.asarray(self.timestamps, dtype=np.int64)
        frames = np.asarray(self.frames, dtype=np.float64)
        if frames.ndim != 3 or len(frames) < 2:
            raise InvalidSequence("need at least two equal-shaped frames")
        if len(timestamps) != len(frames):
            raise InvalidSequence(
                f"{len(timestamps)} timestamps for {len(frames)} frames")
        if (np.diff(timestamps) <= 0).any():
            raise InvalidSequence("timestamps must be strictly increasing")
        if timestamps[0] < 0:
            raise InvalidSequence("timestamps must be non-negative")
        if not (frames > 0).all():
            raise InvalidSequence("intensities must be strictly positive")
        if not self.contrast > 0:
            raise InvalidSequence(f"contrast must be > 0, "
                                  f"got {self.contrast}")
        object.__setattr__(self, "timestamps", timestamps)
        object.__setattr__(self, "frames", frames)


def simulate_events(seq: FrameSequence) -> EventWindow:
    """Emit threshold-crossing events for a frame sequence.

    Log intensity is linear in time between frames; crossing timestamps
    are rounded down to whole microseconds.  Output is sorted by t with
    ties broken by (y, x, polarity).
    """
    log_frames = np.log(seq.frames)
    times = seq.timestamps.astype(np.float64)
    C = seq.contrast
    _, H, W = seq.frames.shape
    eps = 1e-9
    records = []  # (t, y, x, p)
    for y in range(H):
        for x in range(W):
            trace = log_frames[:, y, x]
            ref = trace[0]
            for i in range(len(trace) - 1):
                la, lb = trace[i], trace[i + 1]
                ta, tb = times[i], times[i + 1]
                if lb > la:
                    while ref + C <= lb + eps:
                        ref += C
                        tc = ta + (ref - la) / (lb - la) * (tb - ta)
                        records.append((int(math.floor(tc)), y, x, 1))
                elif lb < la:
                    while ref - C >= lb - eps:
                        ref -= C
                        tc = ta + (ref - la) / (lb - la) * (tb - ta)
                        records.append((int(math.floor(tc)), y, x, -1))
    records.sort()
    if records:
        ts, ys, xs, ps = map(np.asarray, zip(*records))
    else:
        ts = ys = xs = ps = np.empty(0, dtype=np.int64)
    return EventWindow(xs, ys, ts, ps, int(seq.timestamps[0]),
                       int(seq.timestamps[-1]), W, H)


_PGM_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def read_pgm(data: bytes) -> np.ndarray:
    """Decode a binary (P5) 8-bit PGM image."""
    pos = 0
    tokens = []
    for _ in range(4):
        m = _PGM_TOKEN.match(data, pos)
        if not m:
            raise ParseError("truncated PGM header", offset=pos)
        tokens.append(m.group(1))
        pos = m.end()
    if tokens[0] != b"P5":
        raise ParseError(f"expected P5 magic, got {tokens[0]!r}", offset=0)
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise ParseError("non-integer PGM header field", offset=2) from None
    if not 0 < maxval < 256:
        raise ParseError(f"only 8-bit PGM supported (maxval {maxval})",
                         offset=pos)
    pos += 1  # single whitespace byte after maxval
    payload = data[pos:pos + width * height]
    if len(payload) != width * height:
        raise ParseError("truncated PGM payload", offset=pos)
    return np.frombuffer(payload, dtype=np.uint8).reshape(height, width)


def frame_sequence_from_pgms(images: list[np.ndarray], timestamps,
                             contrast: float) -> FrameSequence:
    """Stack 8-bit frames, remapping intensity 0 to 1 before the log."""
    shapes = {img.shape for img in images}
    if len(shapes) > 1:
        raise InvalidSequence(f"frames differ in shape: {sorted(shapes)}")
    frames = np.stack([np.maximum(img.astype(np.float64), 1.0)
                       for img in images])
    return FrameSequence(timestamps=np.asarray(timestamps, dtype=np.int64),
                         frames=frames, contrast=contrast)
