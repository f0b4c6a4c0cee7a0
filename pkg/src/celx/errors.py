"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class CelxError(Exception):
    """Base class for every error raised by the package."""


class UnknownIdentifier(CelxError):
    def __init__(self, kind: str, name: str):
        super().__init__(f"unknown {kind} {name!r}")
        self.kind = kind
        self.name = name


class InvalidTransfer(CelxError):
    pass


class PolicyViolation(CelxError):
    pass


class ClassError(CelxError):
    """A proposition does not belong to the required grammar class."""


class NotInitial(CelxError):
    pass


class NotDecodable(CelxError):
    pass


class PreconditionError(CelxError):
    pass


class ParseError(CelxError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
        self.line = line
        self.column = column
