"""MiniC front end: parsing, pretty-printing and hardware-compatibility checks."""

from .ast import Program
from .compat import CompatError, CompatReport, check_hw_compat
from .errors import (
    ConflictingDirective,
    DirectiveError,
    DuplicateSymbol,
    InvalidDirectiveParam,
    MiniCError,
    MiniCSyntaxError,
    UndeclaredSymbol,
    UnknownDirective,
    UnresolvedDirectiveTarget,
)
from .parser import parse_file, parse_program
from .printer import format_program
from .types import FLOAT64, INT32, UINT32, TypeSpec

__all__ = [
    "Program", "CompatError", "CompatReport", "check_hw_compat", "ConflictingDirective",
    "DirectiveError", "DuplicateSymbol", "InvalidDirectiveParam", "MiniCError",
    "MiniCSyntaxError", "UndeclaredSymbol", "UnknownDirective", "UnresolvedDirectiveTarget",
    "parse_file", "parse_program", "format_program", "FLOAT64", "INT32", "UINT32", "TypeSpec",
]
