"""Exception hierarchy shared by every pvbyte module."""


class PVByteError(Exception):
    """Base class for all errors raised by pvbyte."""


class InvalidSequenceError(PVByteError, ValueError):
    """Input is not a strictly increasing sequence of non-negative integers."""


class MalformedInputError(PVByteError, ValueError):
    """An encoded byte stream is truncated or otherwise unparseable."""


class CorruptionError(PVByteError):
    """A stored sequence fails an internal consistency check on decode."""


class MalformedCollectionError(PVByteError, ValueError):
    """A binary collection file does not follow the length-prefixed layout."""


class IncompatibleIndexError(PVByteError):
    """An index file has the wrong magic, version or a broken offset table."""


class QueryParseError(PVByteError, ValueError):
    """A query file contains a non-integer token."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line
