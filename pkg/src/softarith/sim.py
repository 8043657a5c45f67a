"""Bit-exact netlist simulation.

Netlists are compiled to a flat op program evaluated lane-parallel: every
signal carries one bit per simulation lane, so an exhaustive sweep of a
B-input netlist is a single program run over 2^B lanes.  A compiled core
(`softarith._simcore`, built from Cython) is selected at import time when
available; otherwise the pure-Python backend is used.  Set the environment
variable ``SOFTARITH_PURE_SIM=1`` to force the fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _simpure
from .netlist import Netlist
from ._simpure import (OP_CONST0, OP_CONST1, OP_NOT, OP_AND, OP_OR, OP_XOR,
                       OP_MUX, OP_FASUM, OP_FACARRY, OP_LUT)

try:
    if os.environ.get("SOFTARITH_PURE_SIM"):
        raise ImportError("pure backend forced")
    from . import _simcore
    BACKEND = "compiled"
except ImportError:
    _simcore = None
    BACKEND = "pure"

GATE_OPCODE = {"NOT": OP_NOT, "AND2": OP_AND, "OR2": OP_OR, "XOR2": OP_XOR, "MUX2": OP_MUX}


@dataclass
class Program:
    n_signals: int
    ops: list[tuple]                # (code, a0, a1, a2, out, aux)
    luts: list[tuple]               # (ttable, input signal tuple)
    input_signals: list[int]
    _arrays: Optional[tuple] = None

    def arrays(self):
        """Column arrays for the compiled backend, built on first use."""
        if self._arrays is None:
            cols = list(zip(*self.ops)) if self.ops else [[]] * 6
            code, a0, a1, a2, out, aux = (np.asarray(c, dtype=np.int32) for c in cols)
            lut_tt = np.asarray([t for t, _ in self.luts], dtype=np.uint64)
            lut_k = np.asarray([len(i) for _, i in self.luts], dtype=np.int32)
            lut_off = np.zeros(len(self.luts), dtype=np.int32)
            if len(self.luts):
                lut_off[1:] = np.cumsum(lut_k)[:-1]
            lut_in = np.asarray([s for _, ins in self.luts for s in ins], dtype=np.int32)
            self._arrays = (code, a0, a1, a2, out, aux, lut_tt, lut_off, lut_k, lut_in)
        return self._arrays


def compile_program(netlist: Netlist) -> Program:
    ops: list[tuple] = []
    luts: list[tuple] = []
    inputs: list[int] = []
    for nid in netlist.topo_order():
        node = netlist.nodes[nid]
        if node.kind == "input":
            inputs.append(node.outputs[0])
        elif node.kind == "const":
            ops.append((OP_CONST1 if node.value else OP_CONST0, 0, 0, 0, node.outputs[0], 0))
        elif node.kind == "gate":
            ins = node.inputs + [0] * (3 - len(node.inputs))
            ops.append((GATE_OPCODE[node.op], ins[0], ins[1], ins[2], node.outputs[0], 0))
        elif node.kind == "lut":
            luts.append((node.ttable, tuple(node.inputs)))
            ops.append((OP_LUT, 0, 0, 0, node.outputs[0], len(luts) - 1))
        elif node.kind == "fa":
            a, b, c = node.inputs
            ops.append((OP_FASUM, a, b, c, node.outputs[0], 0))
            ops.append((OP_FACARRY, a, b, c, node.outputs[1], 0))
        elif node.kind == "ha":
            a, b = node.inputs
            ops.append((OP_XOR, a, b, 0, node.outputs[0], 0))
            ops.append((OP_AND, a, b, 0, node.outputs[1], 0))
        else:
            raise ValueError(f"cannot simulate node kind {node.kind!r}")
    return Program(netlist.n_signals, ops, luts, inputs)


# -- mask helpers ---------------------------------------------------------

def _mask_to_words(mask: int, n_words: int) -> np.ndarray:
    raw = mask.to_bytes(n_words * 8, "little")
    return np.frombuffer(raw, dtype="<u8").copy()


def _words_to_mask(words: np.ndarray, n_lanes: int) -> int:
    mask = int.from_bytes(words.astype("<u8").tobytes(), "little")
    return mask & ((1 << n_lanes) - 1)


def evaluate(program: Program, input_masks: dict[int, int], n_lanes: int,
             want: list[int]) -> dict[int, int]:
    """Run the program; returns lane masks for the requested signals."""
    if _simcore is not None:
        n_words = max(1, (n_lanes + 63) // 64)
        words = np.zeros((program.n_signals, n_words), dtype=np.uint64)
        for sig, mask in input_masks.items():
            words[sig] = _mask_to_words(mask, n_words)
        _simcore.run(*program.arrays(), words)
        return {s: _words_to_mask(words[s], n_lanes) for s in want}
    values = [0] * program.n_signals
    for sig, mask in input_masks.items():
        values[sig] = mask
    _simpure.run(program, values, n_lanes)
    full = (1 << n_lanes) - 1
    return {s: values[s] & full for s in want}


# -- user-facing simulation ----------------------------------------------

def _check_assignment(netlist: Netlist, assignment: dict[str, int]):
    for name, sigs in netlist.input_buses.items():
        if name not in assignment:
            raise KeyError(f"missing value for input bus {name!r}")
        v = assignment[name]
        if v < 0 or v >= 1 << len(sigs):
            raise ValueError(f"value {v} does not fit {len(sigs)}-bit bus {name!r}")


def simulate(netlist: Netlist, assignment: dict[str, int],
             program: Optional[Program] = None) -> dict[str, int]:
    """Evaluate one input assignment; buses are little-endian unsigned."""
    _check_assignment(netlist, assignment)
    out = simulate_batch(netlist, {k: [v] for k, v in assignment.items()}, program)
    return {name: int(vals[0]) for name, vals in out.items()}


def simulate_batch(netlist: Netlist, assignments: dict[str, list[int]],
                   program: Optional[Program] = None) -> dict[str, np.ndarray]:
    """Evaluate many assignments at once (one lane each)."""
    if program is None:
        program = compile_program(netlist)
    n_lanes = None
    input_masks: dict[int, int] = {}
    for name, sigs in netlist.input_buses.items():
        vals = assignments[name]
        if n_lanes is None:
            n_lanes = len(vals)
        elif n_lanes != len(vals):
            raise ValueError("all input buses need the same number of vectors")
        for i, s in enumerate(sigs):
            mask = 0
            for lane, v in enumerate(vals):
                mask |= ((v >> i) & 1) << lane
            input_masks[s] = mask
    if n_lanes is None:
        n_lanes = 1
    want = sorted({s for sigs in netlist.output_buses.values() for s in sigs})
    masks = evaluate(program, input_masks, n_lanes, want)
    return {name: _decode_bus(sigs, masks, n_lanes)
            for name, sigs in netlist.output_buses.items()}


def _decode_bus(sigs: list[int], masks: dict[int, int], n_lanes: int) -> np.ndarray:
    out = np.zeros(n_lanes, dtype=np.uint64)
    n_bytes = (n_lanes + 7) // 8
    for i, s in enumerate(sigs):
        raw = np.frombuffer(masks[s].to_bytes(n_bytes, "little"), dtype=np.uint8)
        bits = np.unpackbits(raw, bitorder="little")[:n_lanes]
        out |= bits.astype(np.uint64) << np.uint64(i)
    return out


def exhaustive_outputs(netlist: Netlist, program: Optional[Program] = None
                       ) -> dict[str, np.ndarray]:
    """Sweep all input combinations.

    Lane index encodes the inputs: buses in declaration order, bus bits
    little-endian, first bus in the least significant position.
    """
    if program is None:
        program = compile_program(netlist)
    total_bits = sum(len(s) for s in netlist.input_buses.values())
    if total_bits > 24:
        raise ValueError(f"{total_bits} input bits is too many for an exhaustive sweep")
    n_lanes = 1 << total_bits
    lanes = np.arange(n_lanes, dtype=np.uint64)
    input_masks: dict[int, int] = {}
    pos = 0
    for sigs in netlist.input_buses.values():
        for s in sigs:
            bits = ((lanes >> np.uint64(pos)) & np.uint64(1)).astype(np.uint8)
            input_masks[s] = int.from_bytes(
                np.packbits(bits, bitorder="little").tobytes(), "little")
            pos += 1
    want = sorted({s for sigs in netlist.output_buses.values() for s in sigs})
    masks = evaluate(program, input_masks, n_lanes, want)
    return {name: _decode_bus(sigs, masks, n_lanes)
            for name, sigs in netlist.output_buses.items()}
