"""Event stream and tensor file formats.

Three event formats are supported:

* ``Csv`` — header ``t,x,y,p``, integer fields, ``p`` in {-1, 0, 1} with
  0 mapped to -1.
* ``Evt1`` — canonical binary: magic ``EVT1``, version u8=1, width u16,
  height u16, t0 u64, t1 u64, then 16-byte records
  {t: u64, x: u16, y: u16, p: i8, pad: 3B}; all little-endian.
* ``AtisPacked`` — 5 bytes per event: x, y, then a 23-bit microsecond
  timestamp with the polarity in the top bit of the third byte.

Tensors are written as NPY v1.0 (``<f4``/``<f8``, C order only).
"""
from __future__ import annotations

import ast
from enum import Enum

import numpy as np

from .errors import (
    EmptyStream,
    IoError,
    ParseError,
    RangeOverflow,
    TruncatedRecord,
    UnknownFormat,
    UnsupportedDtype,
    UnsupportedOrder,
)
from .events import EventWindow
from .tensorize import Tensor

ATIS_T_LIMIT = 1 << 23

_EVT1_MAGIC = b"EVT1"
_EVT1_HEADER = np.dtype([
    ("magic", "S4"), ("version", "u1"), ("width", "<u2"), ("height", "<u2"),
    ("t0", "<u8"), ("t1", "<u8"),
])
_EVT1_RECORD = np.dtype([
    ("t", "<u8"), ("x", "<u2"), ("y", "<u2"), ("p", "i1"), ("pad", "V3"),
])

_NPY_MAGIC = b"\x93NUMPY"


class EventFileFormat(Enum):
    CSV = "csv"
    EVT1 = "evt1"
    ATIS_PACKED = "atis"


def _window_from_arrays(xs, ys, ts, ps, t0, t1, sensor):
    if sensor is not None:
        width, height = sensor
    else:
        width = int(max(xs) + 1) if len(xs) else 1
        height = int(max(ys) + 1) if len(ys) else 1
    if t1 <= t0:
        t1 = t0 + 1  # all events share one timestamp
    return EventWindow(xs, ys, ts, ps, t0, t1, width, height, sort=True)


def _read_csv(data: bytes, sensor) -> EventWindow:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError("CSV is not valid UTF-8", offset=exc.start) from None
    offset = 0
    header_seen = False
    xs, ys, ts, ps = [], [], [], []
    for line in text.splitlines(keepends=True):
        stripped = line.strip()
        if not header_seen:
            if stripped != "t,x,y,p":
                raise ParseError(f"expected header 't,x,y,p', got "
                                 f"{stripped!r}", offset=offset)
            header_seen = True
            offset += len(line.encode("utf-8"))
            continue
        if stripped:
            parts = stripped.split(",")
            if len(parts) != 4:
                raise ParseError(f"expected 4 fields, got {len(parts)}",
                                 offset=offset)
            try:
                t, x, y, p = (int(v) for v in parts)
            except ValueError:
                raise ParseError(f"non-integer field in {stripped!r}",
                                 offset=offset) from None
            if p == 0:
                p = -1
            if p not in (-1, 1):
                raise ParseError(f"polarity must be -1, 0 or 1, got {p}",
                                 offset=offset)
            ts.append(t)
            xs.append(x)
            ys.append(y)
            ps.append(p)
        offset += len(line.encode("utf-8"))
    if not header_seen:
        raise ParseError("empty CSV input", offset=0)
    if not ts:
        raise EmptyStream("CSV contains no event records")
    ts = np.asarray(ts, dtype=np.int64)
    return _window_from_arrays(xs, ys, ts, ps, int(ts.min()), int(ts.max()),
                               sensor)


def _write_csv(window: EventWindow) -> bytes:
    lines = ["t,x,y,p"]
    for t, x, y, p in zip(window.ts, window.xs, window.ys, window.ps):
        lines.append(f"{t},{x},{y},{p}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _read_evt1(data: bytes, sensor) -> EventWindow:
    hsize = _EVT1_HEADER.itemsize
    if len(data) < hsize:
        raise TruncatedRecord(f"EVT1 header needs {hsize} bytes, "
                              f"got {len(data)}")
    header = np.frombuffer(data[:hsize], dtype=_EVT1_HEADER)[0]
    if bytes(header["magic"]) != _EVT1_MAGIC:
        raise ParseError("bad EVT1 magic", offset=0)
    if header["version"] != 1:
        raise ParseError(f"unsupported EVT1 version {header['version']}",
                         offset=4)
    body = data[hsize:]
    if len(body) % _EVT1_RECORD.itemsize:
        raise TruncatedRecord(
            f"EVT1 body length {len(body)} is not a multiple of "
            f"{_EVT1_RECORD.itemsize}")
    records = np.frombuffer(body, dtype=_EVT1_RECORD)
    if len(records) == 0:
        raise EmptyStream("EVT1 file contains no events")
    bad = ~np.isin(records["p"], (-1, 1))
    if bad.any():
        i = int(np.argmax(bad))
        raise ParseError(f"polarity must be -1 or +1 in record {i}",
                         offset=hsize + i * _EVT1_RECORD.itemsize + 12)
    width, height = (sensor if sensor is not None
                     else (int(header["width"]), int(header["height"])))
    return EventWindow(records["x"].astype(np.int64),
                       records["y"].astype(np.int64),
                       records["t"].astype(np.int64),
                       records["p"].astype(np.int64),
                       int(header["t0"]), int(header["t1"]),
                       width, height, sort=True)


def _write_evt1(window: EventWindow) -> bytes:
    for name, value, limit in (("width", window.width, 1 << 16),
                               ("height", window.height, 1 << 16),
                               ("x", int(window.xs.max()), 1 << 16),
                               ("y", int(window.ys.max()), 1 << 16)):
        if value >= limit or value < 0:
            raise RangeOverflow(f"{name}={value} does not fit in u16")
    header = np.zeros(1, dtype=_EVT1_HEADER)
    header["magic"] = _EVT1_MAGIC
    header["version"] = 1
    header["width"] = window.width
    header["height"] = window.height
    header["t0"] = window.t0
    header["t1"] = window.t1
    records = np.zeros(len(window), dtype=_EVT1_RECORD)
    records["t"] = window.ts
    records["x"] = window.xs
    records["y"] = window.ys
    records["p"] = window.ps
    return header.tobytes() + records.tobytes()


def _read_atis(data: bytes, sensor) -> EventWindow:
    if len(data) % 5:
        raise TruncatedRecord(
            f"AtisPacked length {len(data)} is not a multiple of 5")
    raw = np.frombuffer(data, dtype=np.uint8).reshape(-1, 5).astype(np.int64)
    if len(raw) == 0:
        raise EmptyStream("AtisPacked file contains no events")
    xs = raw[:, 0]
    ys = raw[:, 1]
    ps = np.where(raw[:, 2] & 0x80, 1, -1)
    ts = ((raw[:, 2] & 0x7F) << 16) | (raw[:, 3] << 8) | raw[:, 4]
    return _window_from_arrays(xs, ys, ts, ps, int(ts.min()), int(ts.max()),
                               sensor)


def _write_atis(window: EventWindow) -> bytes:
    if int(window.xs.max()) > 255 or int(window.ys.max()) > 255 \
            or int(window.xs.min()) < 0 or int(window.ys.min()) < 0:
        raise RangeOverflow("AtisPacked requires 0 <= x, y <= 255")
    if int(window.ts.max()) >= ATIS_T_LIMIT:
        raise RangeOverflow(
            f"AtisPacked timestamps must be < 2^23 us, "
            f"got {int(window.ts.max())}")
    out = np.empty((len(window), 5), dtype=np.uint8)
    out[:, 0] = window.xs
    out[:, 1] = window.ys
    out[:, 2] = ((window.ps > 0).astype(np.uint8) << 7) \
        | ((window.ts >> 16) & 0x7F).astype(np.uint8)
    out[:, 3] = (window.ts >> 8) & 0xFF
    out[:, 4] = window.ts & 0xFF
    return out.tobytes()


def read_events(data: bytes, fmt: EventFileFormat,
                sensor: tuple[int, int] | None = None) -> EventWindow:
    """Decode an event stream; output is stably sorted by timestamp."""
    if fmt is EventFileFormat.CSV:
        return _read_csv(data, sensor)
    if fmt is EventFileFormat.EVT1:
        return _read_evt1(data, sensor)
    return _read_atis(data, sensor)


def write_events(window: EventWindow, fmt: EventFileFormat) -> bytes:
    """Encode an event window; rejects empty windows like the reader."""
    if len(window) == 0:
        raise EmptyStream("refusing to write a stream with zero events")
    if fmt is EventFileFormat.CSV:
        return _write_csv(window)
    if fmt is EventFileFormat.EVT1:
        return _write_evt1(window)
    return _write_atis(window)


def _csv_candidate(data: bytes) -> bool:
    try:
        first = data.split(b"\n", 1)[0].decode("ascii").strip()
    except UnicodeDecodeError:
        return False
    if first == "t,x,y,p":
        return True
    parts = first.split(",")
    if len(parts) != 4:
        return False
    try:
        [int(v) for v in parts]
    except ValueError:
        return False
    return True


def detect_format(data: bytes,
                  filename: str | None = None) -> EventFileFormat:
    """Identify the event format; refuses to guess on ambiguity."""
    candidates = []
    if data.startswith(_EVT1_MAGIC):
        candidates.append(EventFileFormat.EVT1)
    if _csv_candidate(data):
        candidates.append(EventFileFormat.CSV)
    if (len(data) > 0 and len(data) % 5 == 0 and filename is not None
            and filename.lower().endswith(".bin")):
        candidates.append(EventFileFormat.ATIS_PACKED)
    if len(candidates) != 1:
        raise UnknownFormat(
            "cannot identify event format"
            + (f" (candidates: {[c.value for c in candidates]})"
               if len(candidates) > 1 else ""))
    return candidates[0]


def dump_tensor_npy(t: Tensor) -> bytes:
    """Serialize a tensor as NPY v1.0 with a 64-byte-aligned header block."""
    data = np.ascontiguousarray(t.data)
    if data.dtype == np.float32:
        descr = "<f4"
    elif data.dtype == np.float64:
        descr = "<f8"
    else:
        raise UnsupportedDtype(f"cannot serialize dtype {data.dtype}")
    header = (f"{{'descr': '{descr}', 'fortran_order': False, "
              f"'shape': {tuple(data.shape)!r}, }}")
    # magic(6) + version(2) + header-length(2) + header text + '\n',
    # padded with spaces to a multiple of 64 and at least 128 bytes total.
    total = max(128, -(-(10 + len(header) + 1) // 64) * 64)
    header = header.ljust(total - 10 - 1) + "\n"
    hlen = len(header).to_bytes(2, "little")
    return _NPY_MAGIC + b"\x01\x00" + hlen + header.encode("latin1") \
        + data.tobytes()


def write_tensor_npy(t: Tensor, path) -> None:
    try:
        with open(path, "wb") as fh:
            fh.write(dump_tensor_npy(t))
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from None


def read_tensor_npy(data: bytes) -> Tensor:
    """Parse NPY v1.0 bytes; C-ordered <f4 / <f8 arrays only."""
    if not data.startswith(_NPY_MAGIC):
        raise ParseError("bad NPY magic", offset=0)
    if len(data) < 10:
        raise ParseError("truncated NPY preamble", offset=len(data))
    if data[6:8] != b"\x01\x00":
        raise ParseError(f"unsupported NPY version {data[6]}.{data[7]}",
                         offset=6)
    hlen = int.from_bytes(data[8:10], "little")
    if len(data) < 10 + hlen:
        raise ParseError("truncated NPY header", offset=len(data))
    try:
        header = ast.literal_eval(data[10:10 + hlen].decode("latin1"))
    except (ValueError, SyntaxError):
        raise ParseError("malformed NPY header dict", offset=10) from None
    if not isinstance(header, dict) or not {"descr", "fortran_order",
                                            "shape"} <= set(header):
        raise ParseError("NPY header missing required keys", offset=10)
    descr = header["descr"]
    if descr not in ("<f4", "<f8"):
        raise UnsupportedDtype(f"unsupported NPY dtype {descr!r}")
    if header["fortran_order"]:
        raise UnsupportedOrder("fortran_order=True is not supported")
    shape = tuple(int(d) for d in header["shape"])
    dtype = np.dtype(descr)
    expected = int(np.prod(shape)) * dtype.itemsize
    payload = data[10 + hlen:]
    if len(payload) != expected:
        raise ParseError(
            f"payload is {len(payload)} bytes, expected {expected}",
            offset=10 + hlen)
    arr = np.frombuffer(payload, dtype=dtype).reshape(shape).copy()
    return Tensor(data=arr, axes=None)


def read_tensor_npy_file(path) -> Tensor:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from None
    return read_tensor_npy(data)
