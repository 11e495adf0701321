"""Dense grid tensorization of event windows.

The hot path is a per-event scatter: each event touches exactly B cells in
its own polarity slice (all kernels here have no spatial extent), O(N*B)
total.  ``build_est_reference`` is the brute-force per-cell gather used as
an oracle in tests; it shares nothing with the scatter except the scalar
kernel definitions.

Axis order is [polarity, bin, row, column], row-major, positive polarity
first.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .errors import GeometryMismatch, OutOfBounds, UnknownAxis
from .events import EventWindow, MeasurementKind, measurement_values
from .kernels import (
    Alpha,
    Delta,
    Exponential,
    KernelSpec,
    Lookup,
    Mlp,
    Trilinear,
    evaluate,
    lookup_eval,
    mlp_forward,
)

AXES_EST = ("polarity", "bin", "row", "column")


class Reducer(Enum):
    SUM = "sum"
    MAX = "max"


class RepresentationKind(Enum):
    EST = "est"
    VOXEL_GRID = "voxel"
    TWO_CHANNEL_IMAGE = "two-channel"
    EVENT_FRAME = "event-frame"
    SAE = "sae"
    COUNT_IMAGE = "count-image"
    EST_STACKED = "est-stacked"


class BoundsMode(Enum):
    STRICT = "strict"
    LENIENT = "lenient"


class Precision(Enum):
    FLOAT32 = "float32"
    FLOAT64 = "float64"

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(self.value)


@dataclass(frozen=True)
class GridConfig:
    width: int
    height: int
    bins: int = 9
    measurement: MeasurementKind = MeasurementKind.TIMESTAMP
    kernel: KernelSpec = field(default_factory=Trilinear)
    precision: Precision = Precision.FLOAT32
    bounds_mode: BoundsMode = BoundsMode.LENIENT

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("sensor must be at least 1x1")
        if self.bins < 1:
            raise ValueError(f"bins must be >= 1, got {self.bins}")


@dataclass(frozen=True)
class Tensor:
    """Dense row-major array with optionally named axes."""

    data: np.ndarray
    axes: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.axes is not None and len(self.axes) != self.data.ndim:
            raise ValueError(
                f"{len(self.axes)} axis names for {self.data.ndim}-d data")

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    def axis_index(self, name: str) -> int:
        if self.axes is None or name not in self.axes:
            raise UnknownAxis(f"axis {name!r} not in {self.axes}")
        return self.axes.index(name)


@dataclass(frozen=True)
class DropReport:
    spatial_dropped: int
    temporal_dropped: int
    total: int


def _check_geometry(window: EventWindow, cfg: GridConfig) -> None:
    if cfg.width != window.width or cfg.height != window.height:
        raise GeometryMismatch(
            f"config {cfg.width}x{cfg.height} vs window "
            f"{window.width}x{window.height}")


def _bounds_masks(window: EventWindow, cfg: GridConfig):
    spatial_ok = ((window.xs >= 0) & (window.xs < cfg.width)
                  & (window.ys >= 0) & (window.ys < cfg.height))
    temporal_ok = (window.ts >= window.t0) & (window.ts <= window.t1)
    return spatial_ok, temporal_ok


def _kept_mask(window: EventWindow, cfg: GridConfig) -> np.ndarray:
    spatial_ok, temporal_ok = _bounds_masks(window, cfg)
    if cfg.bounds_mode is BoundsMode.STRICT:
        if not spatial_ok.all():
            i = int(np.argmin(spatial_ok))
            raise OutOfBounds(
                f"event {i} at ({window.xs[i]}, {window.ys[i]}) outside "
                f"{cfg.width}x{cfg.height} sensor")
        if not temporal_ok.all():
            i = int(np.argmin(temporal_ok))
            raise OutOfBounds(
                f"event {i} at t={window.ts[i]} outside "
                f"[{window.t0}, {window.t1}]")
    return spatial_ok & temporal_ok


def drop_report(window: EventWindow, cfg: GridConfig) -> DropReport:
    """Counts of events build_est would drop in lenient mode."""
    spatial_ok, temporal_ok = _bounds_masks(window, cfg)
    spatial_dropped = int((~spatial_ok).sum())
    # Events failing both bounds are counted once, as spatial.
    temporal_dropped = int((spatial_ok & ~temporal_ok).sum())
    return DropReport(spatial_dropped, temporal_dropped, len(window))


def _bin_contributions(kernel, tstar, f, n_bin):
    """Weighted contributions of all events to one temporal bin."""
    return f * np.asarray(evaluate(kernel, tstar - n_bin))


def build_est(window: EventWindow, cfg: GridConfig,
              threads: int = 1) -> Tensor:
    """Discretized event spike tensor, shape [2, B, H, W]."""
    _check_geometry(window, cfg)
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    keep = _kept_mask(window, cfg)
    xs, ys, ts, ps = (window.xs[keep], window.ys[keep],
                      window.ts[keep], window.ps[keep])
    B, H, W = cfg.bins, cfg.height, cfg.width
    plane = H * W
    cells = 2 * B * plane
    if len(ts) == 0:
        data = np.zeros((2, B, H, W), dtype=cfg.precision.dtype)
        return Tensor(data=data, axes=AXES_EST)

    s = (ts - window.t0) / float(window.t1 - window.t0)
    tstar = s * (B - 1)
    f = measurement_values(window, cfg.measurement, ts=ts, ps=ps)
    pol_idx = np.where(ps > 0, 0, 1)
    base = pol_idx * (B * plane) + ys * W + xs

    if isinstance(cfg.kernel, (Trilinear, Delta)):
        acc = _scatter_finite(cfg.kernel, tstar, f, base, B, plane, cells)
    else:
        acc = _scatter_all_bins(cfg.kernel, tstar, f, base, B, plane,
                                cells, threads)
    data = acc.reshape(2, B, H, W).astype(cfg.precision.dtype)
    return Tensor(data=data, axes=AXES_EST)


def _scatter_finite(kernel, tstar, f, base, B, plane, cells) -> np.ndarray:
    """Fast path for kernels with support inside one bin step."""
    if isinstance(kernel, Delta):
        n = np.floor(tstar + 0.5).astype(np.int64)
        return np.bincount(base + n * plane, weights=f, minlength=cells)
    # Trilinear: split each event between its two bracketing bins.
    i0 = np.floor(tstar).astype(np.int64)
    i0 = np.minimum(i0, B - 1)
    frac = tstar - i0
    idx0 = base + i0 * plane
    acc = np.bincount(idx0, weights=f * (1.0 - frac), minlength=cells)
    up = i0 + 1 < B
    if up.any():
        acc += np.bincount(idx0[up] + plane, weights=(f * frac)[up],
                           minlength=cells)
    return acc


def _scatter_all_bins(kernel, tstar, f, base, B, plane, cells,
                      threads) -> np.ndarray:
    """General path: evaluate the kernel at every bin for every event.

    Each bin owns a disjoint slice of the output, so distributing bins
    across threads is bit-identical to the sequential loop.
    """
    def one_bin(n: int) -> np.ndarray:
        contrib = _bin_contributions(kernel, tstar, f, n)
        return np.bincount(base + n * plane, weights=contrib,
                           minlength=cells)

    if threads == 1 or B == 1:
        acc = np.zeros(cells, dtype=np.float64)
        for n in range(B):
            acc += one_bin(n)
        return acc
    with ThreadPoolExecutor(max_workers=min(threads, B)) as pool:
        parts = list(pool.map(one_bin, range(B)))
    acc = np.zeros(cells, dtype=np.float64)
    for part in parts:  # fixed order keeps the result bit-stable
        acc += part
    return acc


def _reference_kernel(kernel, u: np.ndarray) -> np.ndarray:
    """Scalar kernel formulas written out independently of kernels.evaluate."""
    if isinstance(kernel, Trilinear):
        return np.maximum(0.0, 1.0 - np.abs(u))
    if isinstance(kernel, Delta):
        return ((u >= -0.5) & (u < 0.5)).astype(np.float64)
    if isinstance(kernel, Exponential):
        return np.where(u <= 0, np.exp(np.minimum(u, 0.0) / kernel.tau)
                        / kernel.tau, 0.0)
    if isinstance(kernel, Alpha):
        s = -u
        return np.where(s >= 0, np.e * np.maximum(s, 0.0) / kernel.tau
                        * np.exp(-np.maximum(s, 0.0) / kernel.tau), 0.0)
    if isinstance(kernel, Mlp):
        return np.asarray(mlp_forward(kernel.weights, u))
    if isinstance(kernel, Lookup):
        return np.asarray(lookup_eval(kernel.table, u))
    raise TypeError(f"not a kernel spec: {kernel!r}")


def build_est_reference(window: EventWindow, cfg: GridConfig) -> Tensor:
    """Brute-force transliteration of the tensor definition.

    Gathers per cell over the full event list, O(2*B*H*W*N); intended for
    small instances only.  Accumulates in float64, casts at the end.
    """
    _check_geometry(window, cfg)
    keep = _kept_mask(window, cfg)
    xs, ys, ts, ps = (window.xs[keep], window.ys[keep],
                      window.ts[keep], window.ps[keep])
    B, H, W = cfg.bins, cfg.height, cfg.width
    out = np.zeros((2, B, H, W), dtype=np.float64)
    if len(ts):
        s = (ts - window.t0) / float(window.t1 - window.t0)
        tstar = s * (B - 1)
        f = measurement_values(window, cfg.measurement, ts=ts, ps=ps)
        for pi, pol in enumerate((1, -1)):
            for y in range(H):
                for x in range(W):
                    sel = (ps == pol) & (xs == x) & (ys == y)
                    if not sel.any():
                        continue
                    tsel, fsel = tstar[sel], f[sel]
                    for n in range(B):
                        out[pi, n, y, x] = float(
                            np.sum(fsel * _reference_kernel(cfg.kernel,
                                                            tsel - n)))
    return Tensor(data=out.astype(cfg.precision.dtype), axes=AXES_EST)


def project(t: Tensor, axis: str, reducer: Reducer) -> Tensor:
    """Reduce one named axis away with sum or max."""
    idx = t.axis_index(axis)
    if reducer is Reducer.SUM:
        data = t.data.sum(axis=idx)
    else:
        data = t.data.max(axis=idx)
    axes = tuple(a for i, a in enumerate(t.axes) if i != idx)
    return Tensor(data=data.astype(t.data.dtype), axes=axes)


def _build_sae(window: EventWindow, cfg: GridConfig) -> Tensor:
    """Per-pixel/polarity normalized timestamp of the most recent event.

    Structurally this is the max-over-bin projection of a timestamp/delta
    tensor, but cells aggregate coincident events with max rather than sum
    so the result is the latest timestamp even when several events share a
    bin.
    """
    _check_geometry(window, cfg)
    keep = _kept_mask(window, cfg)
    xs, ys, ts, ps = (window.xs[keep], window.ys[keep],
                      window.ts[keep], window.ps[keep])
    B, H, W = cfg.bins, cfg.height, cfg.width
    plane = H * W
    est = np.zeros(2 * B * plane, dtype=np.float64)
    if len(ts):
        s = (ts - window.t0) / float(window.t1 - window.t0)
        tstar = s * (B - 1)
        n = np.floor(tstar + 0.5).astype(np.int64)
        pol_idx = np.where(ps > 0, 0, 1)
        idx = pol_idx * (B * plane) + n * plane + ys * W + xs
        np.maximum.at(est, idx, s)
    est = est.reshape(2, B, H, W)
    data = est.max(axis=1).astype(cfg.precision.dtype)
    return Tensor(data=data, axes=("polarity", "row", "column"))


def make_representation(window: EventWindow, cfg: GridConfig,
                        kind: RepresentationKind,
                        threads: int = 1) -> Tensor:
    """Instantiate one of the named grid representations."""
    if kind is RepresentationKind.EST:
        return build_est(window, cfg, threads=threads)
    if kind is RepresentationKind.VOXEL_GRID:
        return project(build_est(window, cfg, threads=threads),
                       "polarity", Reducer.SUM)
    if kind is RepresentationKind.TWO_CHANNEL_IMAGE:
        return project(build_est(window, cfg, threads=threads),
                       "bin", Reducer.SUM)
    if kind is RepresentationKind.EVENT_FRAME:
        est = build_est(window, cfg, threads=threads)
        return project(project(est, "polarity", Reducer.SUM),
                       "bin", Reducer.SUM)
    if kind is RepresentationKind.SAE:
        sae_cfg = replace(cfg, measurement=MeasurementKind.TIMESTAMP,
                          kernel=Delta())
        return _build_sae(window, sae_cfg)
    if kind is RepresentationKind.COUNT_IMAGE:
        count_cfg = replace(cfg, measurement=MeasurementKind.COUNT,
                            kernel=Delta())
        return project(build_est(window, count_cfg, threads=threads),
                       "bin", Reducer.SUM)
    if kind is RepresentationKind.EST_STACKED:
        est = build_est(window, cfg, threads=threads)
        stacked = np.concatenate([est.data[0], est.data[1]], axis=0)
        return Tensor(data=stacked, axes=("bin", "row", "column"))
    raise TypeError(f"not a representation kind: {kind!r}")
