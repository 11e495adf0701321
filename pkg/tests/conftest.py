import numpy as np
import pytest

from evtgrid import EventWindow


def random_window(rng, n_events=200, width=8, height=8,
                  t0=0, t1=100_000, endpoint_events=False):
    """Uniform random events on a small sensor, sorted by timestamp."""
    ts = np.sort(rng.integers(t0, t1 + 1, size=n_events))
    if endpoint_events and n_events >= 2:
        ts[0], ts[-1] = t0, t1
    xs = rng.integers(0, width, size=n_events)
    ys = rng.integers(0, height, size=n_events)
    ps = rng.choice([-1, 1], size=n_events)
    return EventWindow(xs, ys, ts, ps, t0, t1, width, height)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
