"""Exception hierarchy shared across the package."""


class AmpliSatError(Exception):
    """Base class for all domain errors raised by this package."""


class DimacsError(AmpliSatError):
    """Malformed DIMACS CNF input."""


class MissingHeader(DimacsError):
    pass


class ClauseCountMismatch(DimacsError):
    pass


class VariableOutOfRange(AmpliSatError):
    pass


class EmptyClause(AmpliSatError):
    pass


class TautologicalClause(AmpliSatError):
    pass


class DuplicateLiteral(AmpliSatError):
    pass


class LengthMismatch(AmpliSatError):
    pass


class IndexOutOfRange(AmpliSatError):
    pass


class TooManyVariables(AmpliSatError):
    pass


class TargetUnreachable(AmpliSatError):
    pass


class InvalidWidth(AmpliSatError):
    pass


class NoSolutions(AmpliSatError):
    pass


class InvalidPoint(AmpliSatError):
    pass


class InvalidConfig(AmpliSatError):
    pass


class EmptySolutionSet(AmpliSatError):
    pass
