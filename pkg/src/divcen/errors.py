"""Exception types shared across the package."""


class DivcenError(Exception):
    """Base class for all errors raised by this package."""


class OutOfRangeNode(DivcenError):
    """An edge endpoint lies outside [0, n)."""


class ParseError(DivcenError):
    """A text input line could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class MissingNode(DivcenError):
    """An affiliation file does not cover every node."""


class DuplicateNode(DivcenError):
    """An affiliation file lists a node more than once."""


class BadSimplex(DivcenError):
    """An affiliation row is not a probability vector within tolerance."""


class SinkPresent(DivcenError):
    """A random-walk solver was given a graph with zero-out-degree nodes."""


class NonConvergence(DivcenError):
    """An iterative solver hit its iteration cap before reaching tolerance."""


class DegenerateMass(DivcenError):
    """Every aggregated node score collapsed to zero during an update."""


class WrongK(DivcenError):
    """An operation defined for two communities got K != 2 affiliations."""


class TooFewSamples(DivcenError):
    """A statistical test needs at least two observations per sample."""


class DegenerateRange(DivcenError):
    """All scores being bucketed are equal, so no interval width exists."""


class Disconnected(DivcenError):
    """The graph (taken undirected) is not connected."""


class NotSymmetric(DivcenError):
    """An operation requiring a symmetrized graph got a directed one."""


class BadK(DivcenError):
    """A top-k request lies outside [1, n]."""


class BadParams(DivcenError):
    """Generator or command parameters violate their constraints."""
