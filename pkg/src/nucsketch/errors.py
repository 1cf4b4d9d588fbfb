class NucSketchError(Exception):
    """Base class for all toolkit errors."""


class InputError(NucSketchError, ValueError):
    """Malformed or degenerate matrix input (non-finite, zero, shape mismatch)."""


class ParameterError(NucSketchError, ValueError):
    """A scalar parameter lies outside its admissible range."""


class CalibrationError(NucSketchError, RuntimeError):
    """No multiplier on the calibration grid met the target failure rate."""
