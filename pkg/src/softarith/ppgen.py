"""Partial-product matrices for generic and constant-operand multiplication.

Constant-operand (unrolled) matrices keep one row per set bit of the
constant; each retained row references the shared multiplicand signals
directly, which lets the reduction stage recognize duplicate adder chains
by signal identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .netlist import NetlistBuilder

MAX_CONST_BITS = 64


@dataclass
class Row:
    shift: int
    bits: list[int]                 # signal at position i has weight shift + i
    selector: Optional[int] = None  # constant-operand bit index for unrolled rows

    def end(self) -> int:
        """One past the highest occupied weight."""
        return self.shift + len(self.bits)


@dataclass
class PartialProductMatrix:
    rows: list[Row]
    mult_width: int                 # multiplicand width n
    constant: Optional[int] = None  # set for unrolled matrices
    op_width: Optional[int] = None  # symbolic operand width m for generic matrices

    def product_width(self) -> int:
        if self.constant is not None:
            if self.constant == 0:
                return 1
            return self.mult_width + self.constant.bit_length()
        return self.mult_width + self.op_width

    def to_jsonable(self) -> dict:
        return {
            "mult_width": self.mult_width,
            "constant": self.constant,
            "op_width": self.op_width,
            "rows": [{"shift": r.shift, "bits": r.bits, "selector": r.selector}
                     for r in self.rows],
        }


def generate_unrolled(builder: NetlistBuilder, width: int, constant: int,
                      max_const_bits: int = MAX_CONST_BITS,
                      bus: str = "a") -> PartialProductMatrix:
    """One shifted multiplicand row per set bit of `constant`."""
    if width < 1:
        raise ValueError("multiplicand width must be >= 1")
    if constant < 0 or constant >= 1 << max_const_bits:
        raise ValueError(f"constant must be in [0, 2^{max_const_bits})")
    a = builder.input_buses.get(bus) or builder.add_input_bus(bus, width)
    rows = [Row(shift=i, bits=list(a), selector=i)
            for i in range(constant.bit_length()) if (constant >> i) & 1]
    return PartialProductMatrix(rows, mult_width=width, constant=constant)


def generate_generic(builder: NetlistBuilder, width_a: int, width_b: int,
                     bus_a: str = "a", bus_b: str = "b") -> PartialProductMatrix:
    """AND-array matrix: row j holds a_i & b_j at shift j."""
    if width_a < 1 or width_b < 1:
        raise ValueError("operand widths must be >= 1")
    a = builder.input_buses.get(bus_a) or builder.add_input_bus(bus_a, width_a)
    b = builder.input_buses.get(bus_b) or builder.add_input_bus(bus_b, width_b)
    rows = []
    for j, bj in enumerate(b):
        rows.append(Row(shift=j, bits=[builder.gate("AND2", ai, bj) for ai in a]))
    return PartialProductMatrix(rows, mult_width=width_a, op_width=width_b)
