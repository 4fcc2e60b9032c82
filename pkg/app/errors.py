"""
Exception types shared by the search engine.

Core modules raise these; the CLI and the HTTP service translate them
into exit codes and status constants.
"""


class GraphSearchError(Exception):
    """Base class for every error raised by the package."""


class ArgumentError(GraphSearchError, ValueError):
    """A precondition of an operation was violated."""


class ParseError(GraphSearchError):
    """
    Raised for malformed edge-list or vertex-list input.

    Attributes:
        line_no (int): 1-based line number of the offending line.
    """

    def __init__(self, message, line_no=None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class IndexFormatError(GraphSearchError):
    """An index file is truncated, foreign or from another format version."""


class ParamsMismatchError(ArgumentError):
    """Index label parameters differ from the requested run parameters."""


class DisconnectedQueryError(ArgumentError):
    """The query graph is not connected."""


class StaleIndexWarning(UserWarning):
    """The index was built for a different graph than the one supplied."""
