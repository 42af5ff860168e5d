from __future__ import annotations

from dataclasses import dataclass

KINDS = ("int", "uint", "fixed", "float")


@dataclass(frozen=True)
class TypeSpec:
    """Scalar element type: kind, total width and (for fixed) integer bits."""

    kind: str
    width: int
    int_bits: int = 0
    signed: bool = True

    def __post_init__(self):
        if self.kind == "uint":
            object.__setattr__(self, "signed", False)
        elif self.kind == "int":
            object.__setattr__(self, "signed", True)
        if self.kind not in KINDS:
            raise ValueError(f"unknown type kind {self.kind!r}")
        if not 1 <= self.width <= 64:
            raise ValueError(f"width must lie in [1, 64], got {self.width}")
        if self.kind == "fixed" and not 0 <= self.int_bits <= self.width:
            raise ValueError(f"fixed int_bits must lie in [0, {self.width}], got {self.int_bits}")

    @property
    def frac_bits(self) -> int:
        return self.width - self.int_bits if self.kind == "fixed" else 0

    @property
    def is_integer(self) -> bool:
        return self.kind in ("int", "uint")

    def bounds(self) -> tuple[float, float]:
        """Closed representable range."""
        if self.kind == "float":
            return (-float("inf"), float("inf"))
        if self.signed:
            lo, hi = -(1 << (self.width - 1)), (1 << (self.width - 1)) - 1
        else:
            lo, hi = 0, (1 << self.width) - 1
        if self.kind == "fixed":
            scale = 1 << self.frac_bits
            return (lo / scale, hi / scale)
        return (lo, hi)

    def describe(self) -> str:
        if self.kind == "float":
            return "float"
        if self.kind == "fixed":
            sign = "" if self.signed else ", unsigned"
            return f"fixed<{self.width}, {self.int_bits}{sign}>"
        if self.width == 32 and self.kind == "int" and self.signed:
            return "int"
        if self.width == 32 and self.kind == "uint":
            return "uint"
        return f"{'int' if self.signed else 'uint'}<{self.width}>"


INT32 = TypeSpec("int", 32, signed=True)
UINT32 = TypeSpec("uint", 32, signed=False)
FLOAT64 = TypeSpec("float", 64)

BASE_TYPES = {"int": INT32, "uint": UINT32, "float": FLOAT64}
