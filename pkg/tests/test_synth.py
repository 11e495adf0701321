import math

import numpy as np
import pytest

from evtgrid import FrameSequence, frame_sequence_from_pgms, read_pgm, simulate_events
from evtgrid.errors import InvalidSequence, ParseError


def ramp_sequence(l0=0.0, l1=1.0, t0=0, t1=1000, contrast=0.25):
    """Single pixel whose log intensity moves linearly from l0 to l1."""
    frames = np.exp(np.array([l0, l1]))[:, None, None]
    return FrameSequence(timestamps=np.array([t0, t1]), frames=frames,
                         contrast=contrast)


class TestFrameSequence:
    def test_needs_two_frames(self):
        with pytest.raises(InvalidSequence):
            FrameSequence(np.array([0]), np.ones((1, 2, 2)), 0.5)

    def test_timestamps_strictly_increasing(self):
        with pytest.raises(InvalidSequence):
            FrameSequence(np.array([0, 0]), np.ones((2, 2, 2)), 0.5)

    def test_positive_intensities(self):
        frames = np.ones((2, 2, 2))
        frames[1, 0, 0] = 0.0
        with pytest.raises(InvalidSequence):
            FrameSequence(np.array([0, 10]), frames, 0.5)

    def test_positive_contrast(self):
        with pytest.raises(InvalidSequence):
            FrameSequence(np.array([0, 10]), np.ones((2, 2, 2)), 0.0)


class TestSimulateEvents:
    def test_constant_frames(self):
        seq = FrameSequence(np.array([0, 500, 1000]),
                            np.full((3, 4, 4), 7.0), 0.25)
        assert len(simulate_events(seq)) == 0

    def test_linear_ramp(self):
        # Hand-solved crossings of r + kC for log L: 0 -> 1 over 1000 us,
        # C = 0.25: thresholds hit at t = 250, 500, 750, 1000.
        w = simulate_events(ramp_sequence())
        assert w.ts.tolist() == [250, 500, 750, 1000]
        assert w.ps.tolist() == [1, 1, 1, 1]
        assert (w.t0, w.t1) == (0, 1000)
        assert (w.width, w.height) == (1, 1)

    def test_reversed_ramp(self):
        w = simulate_events(ramp_sequence(l0=1.0, l1=0.0))
        assert w.ts.tolist() == [250, 500, 750, 1000]
        assert w.ps.tolist() == [-1, -1, -1, -1]

    def test_event_count_is_floor(self):
        for delta, C in ((1.0, 0.3), (2.7, 0.5), (0.2, 0.25), (1.0, 1.1)):
            seq = ramp_sequence(l0=0.0, l1=delta, contrast=C)
            assert len(simulate_events(seq)) == math.floor(delta / C)

    def test_doubling_contrast_never_increases_count(self):
        rng = np.random.default_rng(7)
        frames = rng.uniform(0.5, 10.0, size=(5, 3, 3))
        times = np.array([0, 100, 300, 600, 1000])
        for C in (0.05, 0.1, 0.2, 0.4):
            n1 = len(simulate_events(FrameSequence(times, frames, C)))
            n2 = len(simulate_events(FrameSequence(times, frames, 2 * C)))
            assert n2 <= n1

    def test_polarity_matches_slope(self):
        rng = np.random.default_rng(11)
        frames = rng.uniform(0.5, 10.0, size=(4, 2, 2))
        times = np.array([0, 400, 700, 1000])
        seq = FrameSequence(times, frames, 0.1)
        w = simulate_events(seq)
        log_frames = np.log(frames)
        for e in w:
            # Locate the segment containing the event and check the slope.
            i = int(np.searchsorted(times, e.t, side="right")) - 1
            i = min(i, len(times) - 2)
            slope = log_frames[i + 1, e.y, e.x] - log_frames[i, e.y, e.x]
            assert np.sign(slope) == e.p

    def test_output_sorted_with_tie_order(self):
        frames = np.exp(np.stack([np.zeros((2, 2)), np.ones((2, 2))]))
        seq = FrameSequence(np.array([0, 1000]), frames, 0.5)
        w = simulate_events(seq)
        # Every pixel crosses at the same instants; ties ordered (y, x).
        assert w.ts.tolist() == sorted(w.ts.tolist())
        for t in (500, 1000):
            chunk = [(y, x) for ti, y, x in zip(w.ts, w.ys, w.xs) if ti == t]
            assert chunk == sorted(chunk)

    def test_multi_threshold_jump(self):
        # |delta log| = 1.0 with C = 0.2 inside a single segment: five
        # events at distinct interpolated times.
        w = simulate_events(ramp_sequence(contrast=0.2))
        assert w.ts.tolist() == [200, 400, 600, 800, 1000]


class TestPgm:
    def encode(self, arr, comment=False):
        h, w = arr.shape
        head = b"P5\n"
        if comment:
            head += b"# a comment\n"
        head += f"{w} {h}\n255\n".encode()
        return head + arr.astype(np.uint8).tobytes()

    def test_round_trip(self):
        rng = np.random.default_rng(3)
        img = rng.integers(0, 256, size=(6, 9)).astype(np.uint8)
        assert np.array_equal(read_pgm(self.encode(img)), img)

    def test_comment_skipped(self):
        img = np.arange(12, dtype=np.uint8).reshape(3, 4)
        assert np.array_equal(read_pgm(self.encode(img, comment=True)), img)

    def test_bad_magic(self):
        with pytest.raises(ParseError):
            read_pgm(b"P2\n2 2\n255\n1 2 3 4\n")

    def test_truncated(self):
        img = np.zeros((4, 4), dtype=np.uint8)
        with pytest.raises(ParseError):
            read_pgm(self.encode(img)[:-1])

    def test_zero_intensity_remapped(self):
        img = np.zeros((2, 2), dtype=np.uint8)
        seq = frame_sequence_from_pgms([img, img], [0, 10], 0.5)
        assert (seq.frames == 1.0).all()
