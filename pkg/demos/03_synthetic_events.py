"""Generate events from a moving-edge intensity sequence and tensorize them.

Run: python3 demos/03_synthetic_events.py
"""
import numpy as np

import evtgrid as eg

# A bright vertical edge sweeping left to right over 16 frames.
W, H, F = 32, 16, 16
frames = np.full((F, H, W), 10.0)
for i in range(F):
    edge = 2 * i
    frames[i, :, :edge] = 200.0
timestamps = np.arange(F) * 5000  # 5 ms per frame

seq = eg.FrameSequence(timestamps=timestamps, frames=frames, contrast=0.3)
window = eg.simulate_events(seq)
pos = int((window.ps > 0).sum())
print(f"simulated {len(window)} events ({pos} positive, "
      f"{len(window) - pos} negative) over {window.duration / 1000:.0f} ms")

cfg = eg.GridConfig(width=W, height=H, bins=9,
                    measurement=eg.MeasurementKind.COUNT,
                    kernel=eg.Trilinear())
frame = eg.make_representation(window, cfg, eg.RepresentationKind.EVENT_FRAME)
print("\nevent-frame counts, one row shown per 4 sensor rows:")
for y in range(0, H, 4):
    print(" ".join(f"{v:4.1f}" for v in frame.data[y]))
