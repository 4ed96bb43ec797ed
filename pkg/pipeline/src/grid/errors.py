"""
errors.py

Exception hierarchy shared by every stage of the harmonic toolkit.

Library code raises the narrowest subclass; the CLI maps ConfigError to exit
code 2 and AssertionFailure to exit code 1.

Created: July 21, 2025
"""


class HarmonicToolkitError(Exception):
    """Base class for all toolkit errors."""


class InvalidParameterError(HarmonicToolkitError, ValueError):
    """A numeric parameter is outside its admissible range."""


class GeometryMismatchError(HarmonicToolkitError, ValueError):
    """Two objects live on different grids (dimension or level differ)."""


class CubeOutOfRangeError(HarmonicToolkitError, IndexError):
    """A cube leaves the domain of a non-periodic grid."""


class ConfigError(HarmonicToolkitError):
    """
    Malformed harness configuration.

    Attributes:
        line (int | None): 1-based line in the config file, when known.
        field (str | None): "[section] key" of the offending entry, when known.
    """

    def __init__(self, message, line=None, field=None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.field = field

    def __str__(self):
        where = []
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.field:
            where.append(self.field)
        prefix = ": ".join(where)
        return f"{prefix}: {self.message}" if prefix else self.message


class AssertionFailure(HarmonicToolkitError):
    """One or more report rows failed an enabled assertion."""

    def __init__(self, row_ids, reasons=None):
        self.row_ids = list(row_ids)
        self.reasons = dict(reasons or {})
        super().__init__(f"{len(self.row_ids)} row(s) failed: {self.row_ids}")
