"""Exception hierarchy shared by all lightwake modules."""


class LightwakeError(Exception):
    """Base class for every error raised by this package."""


# --- signal math ---------------------------------------------------------

class DegenerateSample(LightwakeError):
    """Acceleration vector too short to normalize (sensor fault, not stillness)."""


class OrderViolation(LightwakeError):
    """Timestamps handed to a stateful consumer went backwards or out of range."""


# --- detector ------------------------------------------------------------

class SessionTooShort(LightwakeError):
    """Sleep duration leaves no room for at least one learning period plus the final one."""


class InvalidThresholds(LightwakeError):
    """Threshold band with min above max."""


class PhaseViolation(LightwakeError):
    """Detector operation called in a phase that does not allow it."""


# --- sources -------------------------------------------------------------

class ParseError(LightwakeError):
    """Malformed trace file row; message carries the 1-based line number."""

    def __init__(self, message: str, line_number: int | None = None):
        super().__init__(message)
        self.line_number = line_number


class OrderError(LightwakeError):
    """Sample timestamps in a source are not strictly increasing."""


class RangeError(LightwakeError):
    """Acceleration component outside the sensor's +/-5 g envelope."""


class InvalidParams(LightwakeError):
    """Synthetic trace parameters violate their invariants."""


class BindError(LightwakeError):
    """Live listener could not bind its address."""


class ProtocolError(LightwakeError):
    """Invalid line on the live sample protocol; the connection is dropped."""


# --- engine --------------------------------------------------------------

class ConfigInvalid(LightwakeError):
    """Session configuration violates its invariants."""


class SourceFailed(LightwakeError):
    """Sample source raised mid-session; the partial event log was flushed."""


# --- sinks ---------------------------------------------------------------

class InvalidMelody(LightwakeError):
    """Melody is empty, has non-positive durations, or an unusable sample rate."""


class MalformedLog(LightwakeError):
    """Event log is syntactically corrupt (not a truncation)."""
