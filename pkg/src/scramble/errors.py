"""Exception types shared across the package.

Argument errors raise the builtin ValueError; everything that can only
happen at runtime (resource budgets, numerical self-checks, fitting on
degenerate data, malformed CSV input) gets a distinct class so callers
and the command line tool can translate them into exit codes.
"""


class ScrambleError(Exception):
    """Base class for runtime failures raised by this package."""


class ResourceLimitError(ScrambleError):
    """A requested object exceeds a hard size budget (memory guard)."""


class NumericalConsistencyError(ScrambleError):
    """An internal numerical cross-check failed beyond tolerance."""


class FitWindowError(ScrambleError):
    """No usable growth window exists for a power-law fit."""


class CsvFormatError(ScrambleError):
    """A CSV input file is malformed.

    Carries the 1-based row number of the offending line so the CLI can
    report it.
    """

    def __init__(self, row, message):
        super().__init__(f"row {row}: {message}")
        self.row = row
