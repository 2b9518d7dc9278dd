"""Exception hierarchy.

Everything raised on purpose derives from :class:`DecoyError`, so callers
(the sweep driver, the CLI) can record a failure per point and move on.
"""


class DecoyError(Exception):
    """Base class for all package errors."""


class InvalidIntensity(DecoyError, ValueError):
    pass


class InvalidDistribution(DecoyError, ValueError):
    pass


class DegenerateDecoyState(DecoyError, ValueError):
    pass


class DegenerateSourcePair(DecoyError, ValueError):
    """Decoy and signal are proportional in their first two photon numbers."""


class DegenerateChannel(DecoyError, ValueError):
    pass


class TruncationMismatch(DecoyError, ValueError):
    pass


class IncompleteData(DecoyError, ValueError):
    pass


class InconsistentCounts(DecoyError, ValueError):
    pass


class UndefinedErrorBound(DecoyError, ValueError):
    """The yield lower bound is not positive: no key can be extracted."""


class InfeasibleProblem(DecoyError, ValueError):
    """The observations leave the optimization problem with no feasible point."""


class OracleTooLarge(DecoyError, ValueError):
    pass


class InvalidProbability(DecoyError, ValueError):
    pass


class InvalidGrid(DecoyError, ValueError):
    pass


class ConfigError(DecoyError, ValueError):
    pass


class ParseError(DecoyError, ValueError):
    def __init__(self, message, row=None, column=None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.row = row
        self.column = column
