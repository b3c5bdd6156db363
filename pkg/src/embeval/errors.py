"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class ParseError(ToolkitError):
    """A malformed input file. Carries the file path and 1-based line number."""

    def __init__(self, path, line_no, message):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{self.path}:{line_no}: {message}")


class AlignmentError(ToolkitError):
    """Gold and predicted sequences do not line up token for token."""


class ProtocolError(ToolkitError):
    """An embedding provider violated the record-file protocol."""


class ZeroVectorError(ToolkitError):
    """Cosine similarity requested for a zero vector."""
