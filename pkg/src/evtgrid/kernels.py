"""Temporal aggregation kernels for event binning.

All kernels are evaluated on the signed bin-unit offset
``u = (event bin-coordinate) - (bin index)``.  Causal kernels (exponential,
alpha) are supported on u <= 0: an event contributes only to bins at or
after its own position.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import (
    InvalidRange,
    InvalidResolution,
    InvalidTau,
    NonFiniteWeight,
    ParseError,
    ShapeMismatch,
)

HIDDEN_UNITS = 30
LEAK = 0.1


def eval_trilinear(u):
    """max(0, 1 - |u|): symmetric, unit peak, support [-1, 1]."""
    u = np.asarray(u, dtype=np.float64)
    out = np.maximum(0.0, 1.0 - np.abs(u))
    return float(out) if out.ndim == 0 else out


def eval_exponential(u, tau: float):
    """Causal exponential decay, (1/tau) * exp(u/tau) for u <= 0."""
    if tau <= 0:
        raise InvalidTau(f"tau must be > 0, got {tau}")
    u = np.asarray(u, dtype=np.float64)
    out = np.where(u <= 0, np.exp(np.minimum(u, 0.0) / tau) / tau, 0.0)
    return float(out) if out.ndim == 0 else out


def eval_alpha(u, tau: float):
    """Causal alpha kernel, peak value 1 at u = -tau."""
    if tau <= 0:
        raise InvalidTau(f"tau must be > 0, got {tau}")
    u = np.asarray(u, dtype=np.float64)
    s = np.maximum(-u, 0.0)
    out = np.where(-u >= 0, math.e * s / tau * np.exp(-s / tau), 0.0)
    return float(out) if out.ndim == 0 else out


def eval_delta(u):
    """Nearest-bin indicator; half-open on the right so assignment is unique."""
    u = np.asarray(u, dtype=np.float64)
    out = ((u >= -0.5) & (u < 0.5)).astype(np.float64)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class MlpWeights:
    """Weights of the 1-30-30-1 LeakyReLU kernel network."""

    w1: np.ndarray  # (30, 1)
    b1: np.ndarray  # (30,)
    w2: np.ndarray  # (30, 30)
    b2: np.ndarray  # (30,)
    w3: np.ndarray  # (1, 30)
    b3: float
    leak: float = LEAK

    def __post_init__(self):
        h = HIDDEN_UNITS
        shapes = {"w1": (h, 1), "b1": (h,), "w2": (h, h), "b2": (h,),
                  "w3": (1, h)}
        for name, want in shapes.items():
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.shape != want:
                raise ShapeMismatch(
                    f"{name} must have shape {want}, got {arr.shape}")
            object.__setattr__(self, name, arr)
        if self.leak != LEAK:
            raise ShapeMismatch(f"leak must be {LEAK}, got {self.leak}")
        for name in ("w1", "b1", "w2", "b2", "w3"):
            if not np.isfinite(getattr(self, name)).all():
                raise NonFiniteWeight(f"{name} contains non-finite entries")
        if not math.isfinite(self.b3):
            raise NonFiniteWeight("b3 is non-finite")


def _lrelu(x: np.ndarray, leak: float) -> np.ndarray:
    return np.where(x > 0, x, leak * x)


def mlp_forward(w: MlpWeights, u):
    """Forward pass of the learned kernel; linear output layer."""
    u = np.asarray(u, dtype=np.float64)
    scalar = u.ndim == 0
    flat = np.atleast_1d(u).reshape(-1)
    h1 = _lrelu(flat[:, None] * w.w1[:, 0][None, :] + w.b1[None, :], w.leak)
    h2 = _lrelu(h1 @ w.w2.T + w.b2[None, :], w.leak)
    out = h2 @ w.w3[0] + w.b3
    if scalar:
        return float(out[0])
    return out.reshape(u.shape)


def trilinear_exact_weights() -> MlpWeights:
    """Weights that reproduce max(0, 1 - |u|) exactly.

    Uses relu(x) = (lrelu(x) - leak*x) / (1 - leak) and
    x = (lrelu(x) - lrelu(-x)) / (1 + leak) to route the exact hat function
    through two LeakyReLU layers; only four hidden units are active.
    """
    h = HIDDEN_UNITS
    a = LEAK
    w1 = np.zeros((h, 1))
    b1 = np.zeros(h)
    w1[0, 0] = 1.0   # h1 = lrelu(u)
    w1[1, 0] = -1.0  # h2 = lrelu(-u)
    # |u| = (h1 + h2) / (1 - leak); z = 1 - |u|
    w2 = np.zeros((h, h))
    b2 = np.zeros(h)
    w2[0, 0] = w2[0, 1] = -1.0 / (1.0 - a)
    b2[0] = 1.0   # g1 = lrelu(z)
    w2[1, 0] = w2[1, 1] = 1.0 / (1.0 - a)
    b2[1] = -1.0  # g2 = lrelu(-z)
    # relu(z) = (g1 - leak*(g1 - g2)/(1 + leak)) / (1 - leak)
    w3 = np.zeros((1, h))
    w3[0, 0] = (1.0 - a / (1.0 + a)) / (1.0 - a)
    w3[0, 1] = (a / (1.0 + a)) / (1.0 - a)
    return MlpWeights(w1=w1, b1=b1, w2=w2, b2=b2, w3=w3, b3=0.0)


@dataclass(frozen=True)
class LookupTable:
    """Uniform sampling of a kernel on [u_min, u_max], R >= 2 points."""

    u_min: float
    u_max: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if self.u_max <= self.u_min:
            raise InvalidRange(
                f"u_max ({self.u_max}) must exceed u_min ({self.u_min})")
        if values.ndim != 1 or len(values) < 2:
            raise InvalidResolution("lookup table needs >= 2 samples")
        if not np.isfinite(values).all():
            raise NonFiniteWeight("lookup table contains non-finite values")
        values = values.view()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def resolution(self) -> int:
        return len(self.values)


# Kernel specs: plain frozen dataclasses, dispatched by type.

@dataclass(frozen=True)
class Delta:
    pass


@dataclass(frozen=True)
class Trilinear:
    pass


@dataclass(frozen=True)
class Exponential:
    tau: float = 1.0

    def __post_init__(self):
        if self.tau <= 0:
            raise InvalidTau(f"tau must be > 0, got {self.tau}")


@dataclass(frozen=True)
class Alpha:
    tau: float = 1.0

    def __post_init__(self):
        if self.tau <= 0:
            raise InvalidTau(f"tau must be > 0, got {self.tau}")


@dataclass(frozen=True)
class Mlp:
    weights: MlpWeights


@dataclass(frozen=True)
class Lookup:
    table: LookupTable


KernelSpec = Union[Delta, Trilinear, Exponential, Alpha, Mlp, Lookup]

HANDCRAFTED_KERNELS = (Delta, Trilinear, Exponential, Alpha)


def evaluate(kernel: KernelSpec, u):
    """Evaluate any kernel spec at offset(s) u."""
    if isinstance(kernel, Trilinear):
        return eval_trilinear(u)
    if isinstance(kernel, Delta):
        return eval_delta(u)
    if isinstance(kernel, Exponential):
        return eval_exponential(u, kernel.tau)
    if isinstance(kernel, Alpha):
        return eval_alpha(u, kernel.tau)
    if isinstance(kernel, Mlp):
        return mlp_forward(kernel.weights, u)
    if isinstance(kernel, Lookup):
        return lookup_eval(kernel.table, u)
    raise TypeError(f"not a kernel spec: {kernel!r}")


def build_lookup(kernel: KernelSpec, u_min: float, u_max: float,
                 resolution: int = 1001) -> LookupTable:
    """Sample a kernel uniformly for interpolated evaluation."""
    if isinstance(kernel, Lookup):
        raise InvalidRange("cannot build a lookup table from a lookup table")
    if resolution < 2:
        raise InvalidResolution(f"resolution must be >= 2, got {resolution}")
    if u_max <= u_min:
        raise InvalidRange(f"u_max ({u_max}) must exceed u_min ({u_min})")
    grid = u_min + np.arange(resolution) * (u_max - u_min) / (resolution - 1)
    return LookupTable(u_min=float(u_min), u_max=float(u_max),
                       values=np.asarray(evaluate(kernel, grid)))


def lookup_eval(table: LookupTable, u):
    """Linear interpolation between bracketing samples; 0 outside the range."""
    u = np.asarray(u, dtype=np.float64)
    inside = (u >= table.u_min) & (u <= table.u_max)
    step = (table.u_max - table.u_min) / (table.resolution - 1)
    pos = np.clip((u - table.u_min) / step, 0.0, table.resolution - 1)
    i0 = np.minimum(pos.astype(np.int64), table.resolution - 2)
    frac = pos - i0
    vals = table.values[i0] * (1.0 - frac) + table.values[i0 + 1] * frac
    out = np.where(inside, vals, 0.0)
    return float(out) if out.ndim == 0 else out


def default_lookup(kernel: KernelSpec, bins: int,
                   resolution: int = 1001) -> LookupTable:
    """Lookup covering every offset reachable with `bins` temporal bins."""
    span = max(bins - 1, 1)
    return build_lookup(kernel, -span, span, resolution)


def load_mlp_weights(data: bytes | str) -> MlpWeights:
    """Parse and validate the JSON weight-file schema."""
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid weight JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ParseError("weight file must be a JSON object")
    try:
        w1 = np.asarray(obj["w1"], dtype=np.float64)
        b1 = np.asarray(obj["b1"], dtype=np.float64)
        w2 = np.asarray(obj["w2"], dtype=np.float64)
        b2 = np.asarray(obj["b2"], dtype=np.float64)
        w3 = np.asarray(obj["w3"], dtype=np.float64)
        b3 = obj["b3"]
        leak = obj.get("leak", LEAK)
    except KeyError as exc:
        raise ParseError(f"weight file missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ParseError(f"malformed weight arrays: {exc}") from None
    b3 = np.asarray(b3, dtype=np.float64).reshape(-1)
    if b3.shape != (1,):
        raise ShapeMismatch(f"b3 must hold one scalar, got {b3.shape}")
    return MlpWeights(w1=w1, b1=b1, w2=w2, b2=b2, w3=w3,
                      b3=float(b3[0]), leak=float(leak))


def dump_mlp_weights(w: MlpWeights) -> str:
    """Serialize weights to the JSON weight-file schema."""
    return json.dumps({
        "leak": w.leak,
        "w1": w.w1.tolist(),
        "b1": w.b1.tolist(),
        "w2": w.w2.tolist(),
        "b2": w.b2.tolist(),
        "w3": w.w3.tolist(),
        "b3": [w.b3],
    })


def default_mlp_weights() -> MlpWeights:
    """The packaged learned-kernel file (trilinear-exact initialization)."""
    from importlib.resources import files

    data = files("evtgrid").joinpath("data/trilinear_mlp.json").read_text()
    return load_mlp_weights(data)
