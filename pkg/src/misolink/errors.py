"""Exception types shared across the simulator."""


class MisolinkError(Exception):
    """Base class for all simulator errors."""


class DimensionError(MisolinkError):
    """Vector length / antenna count mismatch or an empty dimension."""


class DegenerateInputError(MisolinkError):
    """Input that has no well-defined result, e.g. normalizing a zero vector."""


class ParameterError(MisolinkError):
    """Parameter outside its documented domain."""


class InfeasibleSizeError(MisolinkError):
    """Requested codebook size exceeds the number of distinct candidates."""


class CodebookFormatError(MisolinkError):
    """Malformed codebook file; message carries the offending line number."""


class InsufficientDataError(MisolinkError):
    """Too few usable points for a fit or a floor check."""


class NoCrossingError(MisolinkError):
    """A curve never crosses the requested BER level."""


class UsageError(MisolinkError):
    """Bad command line or config file input; message names the offending token."""
