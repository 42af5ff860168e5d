from __future__ import annotations


class MiniCError(Exception):
    """Base class for front-end errors; carries a source position."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.message = message
        self.line = line
        self.col = col


class MiniCSyntaxError(MiniCError):
    pass


class DuplicateSymbol(MiniCError):
    pass


class UndeclaredSymbol(MiniCError):
    pass


class DirectiveError(MiniCError):
    pass


class UnknownDirective(DirectiveError):
    pass


class InvalidDirectiveParam(DirectiveError):
    pass


class UnresolvedDirectiveTarget(DirectiveError):
    pass


class ConflictingDirective(DirectiveError):
    pass
