"""Command-line interface: convert, info, synth, bench."""
from __future__ import annotations

import argparse
import glob
import json
import statistics
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import io as eio
from . import synth as esynth
from .errors import EvtGridError
from .events import EventWindow, MeasurementKind
from .kernels import (
    Alpha,
    Delta,
    Exponential,
    Lookup,
    Mlp,
    Trilinear,
    default_lookup,
    default_mlp_weights,
    load_mlp_weights,
)
from .tensorize import (
    BoundsMode,
    GridConfig,
    Precision,
    RepresentationKind,
    build_est,
    drop_report,
    make_representation,
)

_REPRS = {
    "est": RepresentationKind.EST,
    "voxel": RepresentationKind.VOXEL_GRID,
    "two-channel": RepresentationKind.TWO_CHANNEL_IMAGE,
    "event-frame": RepresentationKind.EVENT_FRAME,
    "sae": RepresentationKind.SAE,
    "count-image": RepresentationKind.COUNT_IMAGE,
    "est-stacked": RepresentationKind.EST_STACKED,
}

_MEASUREMENTS = {
    "polarity": MeasurementKind.POLARITY,
    "count": MeasurementKind.COUNT,
    "timestamp": MeasurementKind.TIMESTAMP,
}


@dataclass
class BenchReport:
    """Timing summary for repeated representation builds."""

    events: int
    repeats: int
    times_s: list[float]
    config: dict

    @property
    def throughput_evs(self) -> float:
        return self.events / statistics.median(self.times_s)

    def to_json(self) -> str:
        return json.dumps({
            "events": self.events,
            "repeats": self.repeats,
            "times_s": self.times_s,
            "throughput_evs": self.throughput_evs,
            "config": self.config,
        })

    def to_text(self) -> str:
        med = statistics.median(self.times_s)
        lines = [
            f"{'events':<16}{self.events}",
            f"{'repeats':<16}{self.repeats}",
            f"{'median time':<16}{med * 1e3:.3f} ms",
            f"{'min time':<16}{min(self.times_s) * 1e3:.3f} ms",
            f"{'max time':<16}{max(self.times_s) * 1e3:.3f} ms",
            f"{'throughput':<16}{self.throughput_evs / 1e6:.2f} MEv/s",
            f"{'config':<16}{json.dumps(self.config)}",
        ]
        return "\n".join(lines)


def _add_grid_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--repr", default="est", choices=sorted(_REPRS))
    p.add_argument("--measurement", default="timestamp",
                   choices=sorted(_MEASUREMENTS))
    p.add_argument("--kernel", default="trilinear",
                   choices=["delta", "trilinear", "exponential", "alpha",
                            "mlp", "lookup"])
    p.add_argument("--tau", type=float, default=None,
                   help="time constant in bin units (exponential/alpha)")
    p.add_argument("--bins", type=int, default=9)
    p.add_argument("--width", type=int, default=None)
    p.add_argument("--height", type=int, default=None)
    p.add_argument("--weights", default=None,
                   help="MLP weight JSON (mlp/lookup kernels)")
    p.add_argument("--lut-resolution", type=int, default=None)
    p.add_argument("--precision", default="f32", choices=["f32", "f64"])
    p.add_argument("--strict", action="store_true")
    p.add_argument("--threads", type=int, default=1)


def _build_kernel(args, parser: argparse.ArgumentParser):
    if args.tau is not None and args.kernel not in ("exponential", "alpha"):
        parser.error(f"--tau is meaningless with --kernel {args.kernel}")
    if args.weights is not None and args.kernel not in ("mlp", "lookup"):
        parser.error(f"--weights is meaningless with --kernel {args.kernel}")
    if args.lut_resolution is not None and args.kernel != "lookup":
        parser.error("--lut-resolution requires --kernel lookup")
    tau = args.tau if args.tau is not None else 1.0
    if args.kernel == "delta":
        return Delta()
    if args.kernel == "trilinear":
        return Trilinear()
    if args.kernel == "exponential":
        return Exponential(tau=tau)
    if args.kernel == "alpha":
        return Alpha(tau=tau)
    if args.weights is not None:
        with open(args.weights, "rb") as fh:
            weights = load_mlp_weights(fh.read())
    else:
        weights = default_mlp_weights()
    if args.kernel == "mlp":
        return Mlp(weights=weights)
    resolution = args.lut_resolution or 1001
    return Lookup(table=default_lookup(Mlp(weights=weights), args.bins,
                                       resolution))


def _read_input(args, parser: argparse.ArgumentParser,
                require_geometry: bool = True) -> EventWindow:
    with open(args.input, "rb") as fh:
        data = fh.read()
    if args.format == "auto":
        fmt = eio.detect_format(data, filename=args.input)
    else:
        fmt = eio.EventFileFormat(args.format)
    sensor = None
    if args.width is not None or args.height is not None:
        if args.width is None or args.height is None:
            parser.error("--width and --height must be given together")
        sensor = (args.width, args.height)
    elif require_geometry and fmt is not eio.EventFileFormat.EVT1:
        parser.error(f"--width/--height are required for {fmt.value} input")
    return eio.read_events(data, fmt, sensor=sensor)


def _grid_config(window: EventWindow, args) -> GridConfig:
    return GridConfig(
        width=window.width,
        height=window.height,
        bins=args.bins,
        measurement=_MEASUREMENTS[args.measurement],
        kernel=args.cli_kernel,
        precision=Precision.FLOAT32 if args.precision == "f32"
        else Precision.FLOAT64,
        bounds_mode=BoundsMode.STRICT if args.strict else BoundsMode.LENIENT,
    )


def cmd_convert(args, parser) -> int:
    window = _read_input(args, parser)
    cfg = _grid_config(window, args)
    tensor = make_representation(window, cfg, _REPRS[args.repr],
                                 threads=args.threads)
    eio.write_tensor_npy(tensor, args.output)
    if cfg.bounds_mode is BoundsMode.LENIENT:
        rep = drop_report(window, cfg)
        print(f"dropped: {rep.spatial_dropped} spatial, "
              f"{rep.temporal_dropped} temporal of {rep.total} events")
    print(f"wrote {args.output} shape {tensor.shape}")
    return 0


def cmd_info(args, parser) -> int:
    window = _read_input(args, parser, require_geometry=False)
    pos = int((window.ps > 0).sum())
    neg = len(window) - pos
    pixels = window.width * window.height
    print(f"events: {len(window)} (+{pos}, -{neg})")
    print(f"t0: {window.t0} us")
    print(f"t1: {window.t1} us")
    print(f"duration: {window.duration} us")
    print(f"sensor: {window.width}x{window.height}")
    print(f"events/pixel: {len(window) / pixels:.3f}")
    return 0


def cmd_synth(args, parser) -> int:
    paths = sorted(glob.glob(args.frames))
    if not paths:
        parser.error(f"no frames match {args.frames!r}")
    images = []
    for path in paths:
        with open(path, "rb") as fh:
            images.append(esynth.read_pgm(fh.read()))
    with open(args.timestamps) as fh:
        timestamps = [int(line) for line in fh if line.strip()]
    seq = esynth.frame_sequence_from_pgms(images, timestamps, args.contrast)
    window = esynth.simulate_events(seq)
    fmt = (eio.EventFileFormat.EVT1 if args.output.endswith(".evt1")
           else eio.EventFileFormat.CSV)
    data = eio.write_events(window, fmt)
    with open(args.output, "wb") as fh:
        fh.write(data)
    print(f"wrote {args.output}: {len(window)} events")
    return 0


def _synthetic_window(n: int, width: int, height: int,
                      seed: int) -> EventWindow:
    rng = np.random.default_rng(seed)
    t0, t1 = 0, 100_000
    ts = np.sort(rng.integers(t0, t1 + 1, size=n))
    xs = rng.integers(0, width, size=n)
    ys = rng.integers(0, height, size=n)
    ps = rng.choice([-1, 1], size=n)
    return EventWindow(xs, ys, ts, ps, t0, t1, width, height)


def cmd_bench(args, parser) -> int:
    if args.repeats < 3:
        parser.error("--repeats must be at least 3")
    if args.synthetic is not None:
        width = args.width if args.width is not None else 240
        height = args.height if args.height is not None else 180
        args.width, args.height = width, height
        window = _synthetic_window(args.synthetic, width, height, args.seed)
    else:
        window = _read_input(args, parser)
    cfg = _grid_config(window, args)
    kind = _REPRS[args.repr]

    def run():
        if kind is RepresentationKind.EST:
            return build_est(window, cfg, threads=args.threads)
        return make_representation(window, cfg, kind, threads=args.threads)

    for _ in range(2):  # warmup
        run()
    times = []
    for _ in range(args.repeats):
        start = time.perf_counter()
        run()
        times.append(time.perf_counter() - start)
    report = BenchReport(
        events=len(window),
        repeats=args.repeats,
        times_s=times,
        config={
            "repr": args.repr,
            "measurement": args.measurement,
            "kernel": args.kernel,
            "bins": args.bins,
            "width": window.width,
            "height": window.height,
            "precision": args.precision,
            "threads": args.threads,
        },
    )
    print(report.to_json() if args.json else report.to_text())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evtgrid",
        description="Convert event-camera streams into dense grid tensors.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="events file -> NPY tensor")
    p.add_argument("--input", required=True)
    p.add_argument("--format", default="auto",
                   choices=["auto", "csv", "evt1", "atis"])
    _add_grid_flags(p)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("info", help="summarize an event file")
    p.add_argument("--input", required=True)
    p.add_argument("--format", default="auto",
                   choices=["auto", "csv", "evt1", "atis"])
    p.add_argument("--width", type=int, default=None)
    p.add_argument("--height", type=int, default=None)
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("synth", help="PGM frames -> synthetic events")
    p.add_argument("--frames", required=True, help="glob of P5 PGM files")
    p.add_argument("--timestamps", required=True,
                   help="file with one microsecond value per line")
    p.add_argument("--contrast", type=float, required=True)
    p.add_argument("--output", required=True, help=".evt1 or .csv path")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bench", help="time representation generation")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input")
    src.add_argument("--synthetic", type=int, metavar="N",
                     help="generate N uniform random events")
    p.add_argument("--format", default="auto",
                   choices=["auto", "csv", "evt1", "atis"])
    _add_grid_flags(p)
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.cli_kernel = _build_kernel(args, parser) \
            if hasattr(args, "kernel") else None
        return args.func(args, parser)
    except EvtGridError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"IoError: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
