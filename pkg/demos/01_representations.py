"""Build every grid representation from one random event window.

Run: python3 demos/01_representations.py
"""
import numpy as np

import evtgrid as eg

rng = np.random.default_rng(0)
W, H, N = 32, 24, 5000
t0, t1 = 0, 100_000

ts = np.sort(rng.integers(t0, t1 + 1, N))
window = eg.EventWindow(rng.integers(0, W, N), rng.integers(0, H, N),
                        ts, rng.choice([-1, 1], N), t0, t1, W, H)
print(f"window: {len(window)} events on {W}x{H}, "
      f"{window.duration / 1000:.0f} ms")

cfg = eg.GridConfig(width=W, height=H, bins=9,
                    measurement=eg.MeasurementKind.TIMESTAMP,
                    kernel=eg.Trilinear())

for kind in eg.RepresentationKind:
    t = eg.make_representation(window, cfg, kind)
    print(f"{kind.value:>13}: shape {t.shape}, "
          f"sum {t.data.sum():10.2f}, max {t.data.max():6.3f}")

# The voxel grid is exactly the polarity-summed spike tensor.
est = eg.build_est(window, cfg)
voxel = eg.project(est, "polarity", eg.Reducer.SUM)
check = eg.make_representation(window, cfg, eg.RepresentationKind.VOXEL_GRID)
print("voxel == sum-over-polarity of EST:",
      np.array_equal(voxel.data, check.data))
