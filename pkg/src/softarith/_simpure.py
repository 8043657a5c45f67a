"""Pure-Python simulation backend.

Lane-parallel over arbitrary-width Python ints: each signal holds one bitmask
with one bit per simulation lane.  Used when the compiled core is unavailable
(or explicitly disabled); shares the program format in :mod:`softarith.sim`.
"""

from __future__ import annotations

OP_CONST0 = 0
OP_CONST1 = 1
OP_NOT = 2
OP_AND = 3
OP_OR = 4
OP_XOR = 5
OP_MUX = 6
OP_FASUM = 7
OP_FACARRY = 8
OP_LUT = 9


def run(program, values: list[int], n_lanes: int) -> None:
    """Execute `program` in place over `values` (one mask per signal)."""
    full = (1 << n_lanes) - 1
    luts = program.luts
    for code, a0, a1, a2, out, aux in program.ops:
        if code == OP_AND:
            v = values[a0] & values[a1]
        elif code == OP_XOR:
            v = values[a0] ^ values[a1]
        elif code == OP_OR:
            v = values[a0] | values[a1]
        elif code == OP_NOT:
            v = values[a0] ^ full
        elif code == OP_FASUM:
            v = values[a0] ^ values[a1] ^ values[a2]
        elif code == OP_FACARRY:
            a, b, c = values[a0], values[a1], values[a2]
            v = (a & b) | (c & (a ^ b))
        elif code == OP_MUX:
            s = values[a0]
            v = (values[a2] & s) | (values[a1] & ~s & full)
        elif code == OP_CONST0:
            v = 0
        elif code == OP_CONST1:
            v = full
        elif code == OP_LUT:
            tt, ins = luts[aux]
            acc = 0
            k = len(ins)
            for row in range(1 << k):
                if not (tt >> row) & 1:
                    continue
                term = full
                for i in range(k):
                    x = values[ins[i]]
                    term &= x if (row >> i) & 1 else x ^ full
                    if not term:
                        break
                acc |= term
            v = acc
        else:
            raise ValueError(f"bad opcode {code}")
        values[out] = v
