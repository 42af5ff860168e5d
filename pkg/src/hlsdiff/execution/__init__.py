"""Dual-mode execution: software reference semantics and hardware semantics."""

from .arith import coerce, wrap_int, wrap_to_width
from .hwconfig import HardwareConfig
from .inputs import InputFormat, InputFormatError, SlotFormat, TestInput, derive_format
from .interp import (
    DEFAULT_BUDGET,
    HARDWARE,
    SOFTWARE,
    BudgetExhausted,
    Executable,
    Fault,
    IncompatibleProgram,
    InputShapeError,
    run_hardware,
    run_software,
)
from .trace import Event, ExecTrace

__all__ = [
    "coerce", "wrap_int", "wrap_to_width", "HardwareConfig", "InputFormat", "InputFormatError",
    "SlotFormat", "TestInput", "derive_format", "DEFAULT_BUDGET", "HARDWARE", "SOFTWARE",
    "BudgetExhausted", "Executable", "Fault", "IncompatibleProgram", "InputShapeError",
    "run_hardware", "run_software", "Event", "ExecTrace",
]
