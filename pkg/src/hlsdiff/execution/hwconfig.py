from __future__ import annotations

from dataclasses import dataclass, field

from ..minic import ast as A
from ..minic.types import TypeSpec


@dataclass
class HardwareConfig:
    """Hardware-mode parameters, derived from a program's directives.

    Keys are qualified symbols (``func::var``, ``func::label``) except for
    function-level settings, which are keyed by function name.
    """

    types: dict = field(default_factory=dict)
    static: dict = field(default_factory=dict)
    pipeline: dict = field(default_factory=dict)
    unroll: dict = field(default_factory=dict)
    dataflow: dict = field(default_factory=dict)
    stack_limit: dict = field(default_factory=dict)

    @classmethod
    def from_program(cls, p: A.Program) -> "HardwareConfig":
        cfg = cls()
        for b in p.directives:
            if b.directive == "width":
                w, signed = b.params
                cfg.types[b.target] = TypeSpec("int" if signed else "uint", w)
            elif b.directive == "fixed":
                w, i, signed = b.params
                cfg.types[b.target] = TypeSpec("fixed", w, i, signed)
            elif b.directive == "static_array":
                cfg.static[b.target] = b.params[0]
            elif b.directive == "pipeline":
                cfg.pipeline[b.target] = b.params[0]
            elif b.directive == "unroll":
                cfg.unroll[b.target] = b.params[0]
            elif b.directive == "dataflow":
                cfg.dataflow[b.target] = b.params[0]
            elif b.directive == "stack_limit":
                cfg.stack_limit[b.target] = b.params[0]
        return cfg

    @property
    def reorders(self) -> bool:
        """True when some directive changes execution order."""
        return bool(self.pipeline or self.unroll or self.dataflow)
