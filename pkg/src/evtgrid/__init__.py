"""evtgrid: dense grid tensor representations for event-camera streams."""

from .errors import EvtGridError
from .events import (
    Event,
    EventWindow,
    MeasurementKind,
    bin_coordinate,
    canonical_time,
    measure,
)
from .kernels import (
    Alpha,
    Delta,
    Exponential,
    KernelSpec,
    Lookup,
    LookupTable,
    Mlp,
    MlpWeights,
    Trilinear,
    build_lookup,
    default_lookup,
    default_mlp_weights,
    dump_mlp_weights,
    eval_alpha,
    eval_delta,
    eval_exponential,
    eval_trilinear,
    load_mlp_weights,
    lookup_eval,
    mlp_forward,
    trilinear_exact_weights,
)
from .tensorize import (
    BoundsMode,
    DropReport,
    GridConfig,
    Precision,
    Reducer,
    RepresentationKind,
    Tensor,
    build_est,
    build_est_reference,
    drop_report,
    make_representation,
    project,
)
from .io import (
    EventFileFormat,
    detect_format,
    dump_tensor_npy,
    read_events,
    read_tensor_npy,
    read_tensor_npy_file,
    write_events,
    write_tensor_npy,
)
from .synth import FrameSequence, frame_sequence_from_pgms, read_pgm, simulate_events

__version__ = "0.1.0"

__all__ = [
    "Alpha",
    "BoundsMode",
    "Delta",
    "DropReport",
    "Event",
    "EventFileFormat",
    "EventWindow",
    "EvtGridError",
    "Exponential",
    "FrameSequence",
    "GridConfig",
    "KernelSpec",
    "Lookup",
    "LookupTable",
    "MeasurementKind",
    "Mlp",
    "MlpWeights",
    "Precision",
    "Reducer",
    "RepresentationKind",
    "Tensor",
    "Trilinear",
    "bin_coordinate",
    "build_est",
    "build_est_reference",
    "build_lookup",
    "canonical_time",
    "default_lookup",
    "default_mlp_weights",
    "detect_format",
    "drop_report",
    "dump_mlp_weights",
    "dump_tensor_npy",
    "eval_alpha",
    "eval_delta",
    "eval_exponential",
    "eval_trilinear",
    "frame_sequence_from_pgms",
    "load_mlp_weights",
    "lookup_eval",
    "make_representation",
    "measure",
    "mlp_forward",
    "project",
    "read_events",
    "read_pgm",
    "read_tensor_npy",
    "read_tensor_npy_file",
    "simulate_events",
    "trilinear_exact_weights",
    "write_events",
    "write_tensor_npy",
]
