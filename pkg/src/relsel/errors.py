"""Exception hierarchy shared by every relsel structure."""

from __future__ import annotations


class RelSelError(Exception):
    """Base class for all errors raised by relsel."""


class RangeError(RelSelError, IndexError):
    """A position or prefix length lies outside the structure."""


class NotFoundError(RelSelError, LookupError):
    """The requested occurrence does not exist."""


class UnsupportedAlphabetError(RelSelError, ValueError):
    """The text uses more distinct symbols than a sequence can index."""


class InvalidInputError(RelSelError, ValueError):
    """Input data is malformed for the requested operation."""


class ResourceLimitError(RelSelError, RuntimeError):
    """A configured computation budget would be exceeded."""


class UnsupportedQueryError(RelSelError, ValueError):
    """The index mode cannot answer the requested query kind."""


def check_position(i: int, n: int, *, what: str = "position") -> None:
    """Validate a 1-based position against a length ``n``."""

    if not 1 <= i <= n:
        raise RangeError(f"{what} {i} outside 1..{n}")


def check_prefix(i: int, n: int) -> None:
    """Validate a prefix length against a length ``n``."""

    if not 0 <= i <= n:
        raise RangeError(f"prefix length {i} outside 0..{n}")


class AnswerMismatchError(RelSelError, RuntimeError):
    """Two index modes returned different answers for the same queries."""
