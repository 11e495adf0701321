"""Exception hierarchy shared across the package."""


class EvtGridError(Exception):
    """Base class for all evtgrid errors."""


# --- time / window ---

class DegenerateWindow(EvtGridError):
    """Window with t1 <= t0 cannot be normalized."""


class OutOfWindow(EvtGridError):
    """Timestamp outside [t0, t1] in strict mode."""


# --- kernels ---

class InvalidTau(EvtGridError):
    """Kernel time constant must be > 0."""


class ShapeMismatch(EvtGridError):
    """MLP weight arrays have wrong shapes or metadata."""


class NonFiniteWeight(EvtGridError):
    """MLP weight file contains NaN or infinity."""


class InvalidRange(EvtGridError):
    """Lookup-table range must satisfy u_max > u_min."""


class InvalidResolution(EvtGridError):
    """Lookup-table resolution must be >= 2."""


# --- tensorize ---

class GeometryMismatch(EvtGridError):
    """GridConfig sensor size disagrees with the event window."""


class OutOfBounds(EvtGridError):
    """Event outside sensor or window bounds in strict mode."""


class UnknownAxis(EvtGridError):
    """Projection axis not present in the tensor."""


# --- io ---

class ParseError(EvtGridError):
    """Malformed input; carries the byte offset where parsing failed."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class EmptyStream(EvtGridError):
    """Event stream with zero events."""


class TruncatedRecord(EvtGridError):
    """Byte stream ends mid-record."""


class RangeOverflow(EvtGridError):
    """Value exceeds the representable range of the target format."""


class UnknownFormat(EvtGridError):
    """Input bytes match no known event file format."""


class UnsupportedDtype(EvtGridError):
    """NPY dtype other than <f4 / <f8."""


class UnsupportedOrder(EvtGridError):
    """Fortran-ordered NPY files are not supported."""


class IoError(EvtGridError):
    """Filesystem-level failure while reading or writing."""


# --- synth ---

class InvalidSequence(EvtGridError):
    """Frame sequence violates its invariants."""
