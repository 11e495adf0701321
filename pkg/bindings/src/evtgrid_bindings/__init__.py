"""Thin array-interface wrapper around evtgrid.

Takes flat coordinate/timestamp/polarity arrays, returns a dense numpy
array with the same values, shape, and axis order as the core
representation builder.  Inputs are wrapped zero-copy where the layout
permits (1-d int64 arrays); otherwise they are copied.  No call mutates
its input arrays.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

import evtgrid
from evtgrid import (
    Alpha,
    BoundsMode,
    Delta,
    EventWindow,
    Exponential,
    GridConfig,
    Lookup,
    MeasurementKind,
    Mlp,
    Precision,
    RepresentationKind,
    Trilinear,
    default_lookup,
    default_mlp_weights,
    load_mlp_weights,
    make_representation,
)

__version__ = evtgrid.__version__

_KERNELS = ("delta", "trilinear", "exponential", "alpha", "mlp", "lookup")
_KINDS = {k.value: k for k in RepresentationKind}
_MEASUREMENTS = {m.value: m for m in MeasurementKind}


@dataclass
class BoundConfig:
    """Grid configuration as plain scalars and strings."""

    width: int
    height: int
    bins: int = 9
    measurement: str = "timestamp"
    kernel: str = "trilinear"
    tau: float = 1.0
    precision: str = "f32"
    strict: bool = False
    weights_path: str | None = None
    lut_resolution: int = 1001

    def validate(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError("sensor must be at least 1x1")
        if self.bins < 1:
            raise ValueError(f"bins must be >= 1, got {self.bins}")
        if self.measurement not in _MEASUREMENTS:
            raise ValueError(f"unknown measurement {self.measurement!r}")
        if self.kernel not in _KERNELS:
            raise ValueError(f"unknown kernel {self.kernel!r}")
        if self.tau <= 0:
            raise ValueError(f"tau must be > 0, got {self.tau}")
        if self.precision not in ("f32", "f64"):
            raise ValueError(f"precision must be f32 or f64, "
                             f"got {self.precision!r}")
        if self.lut_resolution < 2:
            raise ValueError("lut_resolution must be >= 2")


def _kernel_from_config(cfg: BoundConfig):
    if cfg.kernel == "delta":
        return Delta()
    if cfg.kernel == "trilinear":
        return Trilinear()
    if cfg.kernel == "exponential":
        return Exponential(tau=cfg.tau)
    if cfg.kernel == "alpha":
        return Alpha(tau=cfg.tau)
    if cfg.weights_path is not None:
        with open(cfg.weights_path, "rb") as fh:
            weights = load_mlp_weights(fh.read())
    else:
        weights = default_mlp_weights()
    if cfg.kernel == "mlp":
        return Mlp(weights=weights)
    return Lookup(table=default_lookup(Mlp(weights=weights), cfg.bins,
                                       cfg.lut_resolution))


def _grid_config(cfg: BoundConfig) -> GridConfig:
    return GridConfig(
        width=cfg.width,
        height=cfg.height,
        bins=cfg.bins,
        measurement=_MEASUREMENTS[cfg.measurement],
        kernel=_kernel_from_config(cfg),
        precision=Precision.FLOAT32 if cfg.precision == "f32"
        else Precision.FLOAT64,
        bounds_mode=BoundsMode.STRICT if cfg.strict
        else BoundsMode.LENIENT,
    )


def build_representation(x, y, t, p, t0: int, t1: int, cfg: BoundConfig,
                         kind: str) -> np.ndarray:
    """Build a representation from four flat parallel arrays.

    ``kind`` is one of: est, voxel, two-channel, event-frame, sae,
    count-image, est-stacked.  Returns the dense array with the core's
    axis order.
    """
    cfg.validate()
    if kind not in _KINDS:
        raise ValueError(f"unknown representation kind {kind!r}")
    arrays = [np.asarray(a, dtype=np.int64) for a in (x, y, t, p)]
    lengths = {len(a) for a in arrays}
    if len(lengths) != 1:
        raise ValueError(f"input arrays differ in length: "
                         f"{[len(a) for a in arrays]}")
    xs, ys, ts, ps = arrays
    if len(ts) and (np.diff(ts) < 0).any():
        order = np.argsort(ts, kind="stable")
        xs, ys, ts, ps = xs[order], ys[order], ts[order], ps[order]
    window = EventWindow(xs, ys, ts, ps, t0, t1, cfg.width, cfg.height)
    tensor = make_representation(window, _grid_config(cfg), _KINDS[kind])
    return tensor.data


def load_npy_equivalence(npy_path, x, y, t, p, t0: int, t1: int,
                         cfg: BoundConfig, kind: str) -> bool:
    """Whether an NPY file decodes bitwise-equal to build_representation."""
    stored = np.load(npy_path)
    built = build_representation(x, y, t, p, t0, t1, cfg, kind)
    if stored.shape != built.shape or stored.dtype != built.dtype:
        return False
    return stored.tobytes() == built.tobytes()
