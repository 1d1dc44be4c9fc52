"""Exception hierarchy and process exit codes shared across the toolkit."""

# Exit codes used by the command line front end.
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_ASSOCIATION = 3
EXIT_DEGENERATE = 4


class TrajevalError(Exception):
    """Base class for all toolkit errors."""


class ParseError(TrajevalError):
    """A trajectory file line could not be parsed.

    Carries the 1-based line number of the offending line.
    """

    def __init__(self, line_number, message):
        super().__init__("line %d: %s" % (line_number, message))
        self.line_number = line_number


class EmptyTrajectoryError(TrajevalError):
    """A trajectory ended up with no poses (empty file, or everything removed)."""


class AssociationError(TrajevalError):
    """Timestamp association produced no matches."""


class EmptyWindowError(TrajevalError):
    """A relative-error delta leaves no valid pose couples."""


class InsufficientDataError(TrajevalError):
    """Fewer data points than the operation needs (e.g. alignment with < 2 pairs)."""


class DegenerateGeometryError(TrajevalError):
    """Geometry does not constrain the requested quantity (e.g. coincident points)."""


class ConfigError(TrajevalError):
    """A report configuration file is malformed."""
