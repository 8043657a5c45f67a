"""Combinational netlist IR: gates, LUTs, adder primitives, and carry chains.

Signals are dense integer ids, each driven by exactly one node output (or a
primary input).  Buses are little-endian lists of signal ids.  Netlists are
built through :class:`NetlistBuilder` and treated as immutable afterwards;
transform passes construct new netlists rather than mutating in place.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional

GATE_OPS = ("NOT", "AND2", "OR2", "XOR2", "MUX2")
GATE_ARITY = {"NOT": 1, "AND2": 2, "OR2": 2, "XOR2": 2, "MUX2": 3}

# MUX2 input order is (sel, d0, d1): output = d1 if sel else d0.

SCHEMA_VERSION = 1


@dataclass
class Node:
    kind: str                      # input | const | gate | lut | fa | ha
    inputs: list[int] = field(default_factory=list)
    outputs: list[int] = field(default_factory=list)
    op: Optional[str] = None       # gate op
    name: Optional[str] = None     # input bus name
    bit: Optional[int] = None      # input bit index
    value: Optional[int] = None    # const 0|1
    ttable: Optional[int] = None   # lut truth table, bit r = output for minterm r


@dataclass
class AdderChain:
    """Ordered run of full adders linked cout -> cin."""

    members: list[int]             # node ids, all kind == "fa"
    cin0: int                      # signal id feeding the first cin


@dataclass
class Diagnostic:
    code: str
    node: Optional[int]
    message: str

    def __str__(self):
        where = f" (node {self.node})" if self.node is not None else ""
        return f"{self.code}{where}: {self.message}"


@dataclass
class NetlistStats:
    full_adders: int
    half_adders: int
    gates: int
    luts: int
    chains: int
    chain_length_hist: dict[int, int]


class Netlist:
    def __init__(self, nodes, chains, input_buses, output_buses, n_signals):
        self.nodes: list[Node] = nodes
        self.chains: list[AdderChain] = chains
        self.input_buses: dict[str, list[int]] = input_buses
        self.output_buses: dict[str, list[int]] = output_buses
        self.n_signals: int = n_signals
        self._driver: Optional[list] = None

    # -- structure queries ------------------------------------------------

    def driver(self, sig: int):
        """Return (node_id, out_position) driving `sig`, or None."""
        if self._driver is None:
            table = [None] * self.n_signals
            for nid, node in enumerate(self.nodes):
                for pos, s in enumerate(node.outputs):
                    table[s] = (nid, pos)
            self._driver = table
        return self._driver[sig]

    def consumers(self):
        """Map signal -> list of node ids reading it."""
        cons: dict[int, list[int]] = {}
        for nid, node in enumerate(self.nodes):
            for s in node.inputs:
                cons.setdefault(s, []).append(nid)
        return cons

    def topo_order(self):
        """Node ids in dependency order; raises ValueError on a cycle."""
        n = len(self.nodes)
        producer = {}
        for nid, node in enumerate(self.nodes):
            for s in node.outputs:
                producer[s] = nid
        indeg = [0] * n
        succ: list[list[int]] = [[] for _ in range(n)]
        for nid, node in enumerate(self.nodes):
            for s in node.inputs:
                p = producer.get(s)
                if p is not None:
                    succ[p].append(nid)
                    indeg[nid] += 1
        order = [nid for nid in range(n) if indeg[nid] == 0]
        i = 0
        while i < len(order):
            u = order[i]
            i += 1
            for v in succ[u]:
                indeg[v] -= 1
                if indeg[v] == 0:
                    order.append(v)
        if len(order) != n:
            raise ValueError("netlist contains a combinational cycle")
        return order

    # -- serialization ----------------------------------------------------

    def to_json(self) -> str:
        nodes = []
        for node in self.nodes:
            entry = {"kind": node.kind, "inputs": node.inputs, "outputs": node.outputs}
            if node.op is not None:
                entry["op"] = node.op
            if node.name is not None:
                entry["name"] = node.name
                entry["bit"] = node.bit
            if node.value is not None:
                entry["value"] = node.value
            if node.ttable is not None:
                entry["ttable"] = format(node.ttable, "x")
            nodes.append(entry)
        doc = {
            "version": SCHEMA_VERSION,
            "n_signals": self.n_signals,
            "nodes": nodes,
            "chains": [{"members": c.members, "cin0": c.cin0} for c in self.chains],
            "inputs": self.input_buses,
            "outputs": self.output_buses,
        }
        return json.dumps(doc, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "Netlist":
        doc = json.loads(text)
        if doc.get("version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported netlist schema version {doc.get('version')!r}")
        nodes = []
        for entry in doc["nodes"]:
            nodes.append(Node(
                kind=entry["kind"],
                inputs=list(entry["inputs"]),
                outputs=list(entry["outputs"]),
                op=entry.get("op"),
                name=entry.get("name"),
                bit=entry.get("bit"),
                value=entry.get("value"),
                ttable=int(entry["ttable"], 16) if "ttable" in entry else None,
            ))
        chains = [AdderChain(list(c["members"]), c["cin0"]) for c in doc["chains"]]
        return cls(nodes, chains, dict(doc["inputs"]), dict(doc["outputs"]), doc["n_signals"])


class NetlistBuilder:
    def __init__(self):
        self.nodes: list[Node] = []
        self.chains: list[AdderChain] = []
        self.input_buses: dict[str, list[int]] = {}
        self.output_buses: dict[str, list[int]] = {}
        self.n_signals = 0
        self._consts: dict[int, int] = {}

    def _sig(self) -> int:
        s = self.n_signals
        self.n_signals += 1
        return s

    def add_input_bus(self, name: str, width: int) -> list[int]:
        if name in self.input_buses:
            raise ValueError(f"duplicate input bus {name!r}")
        sigs = []
        for i in range(width):
            s = self._sig()
            self.nodes.append(Node(kind="input", outputs=[s], name=name, bit=i))
            sigs.append(s)
        self.input_buses[name] = sigs
        return sigs

    def const(self, value: int) -> int:
        if value not in (0, 1):
            raise ValueError("const bit must be 0 or 1")
        if value not in self._consts:
            s = self._sig()
            self.nodes.append(Node(kind="const", outputs=[s], value=value))
            self._consts[value] = s
        return self._consts[value]

    def gate(self, op: str, *ins: int) -> int:
        if op not in GATE_OPS:
            raise ValueError(f"unknown gate op {op!r}")
        if len(ins) != GATE_ARITY[op]:
            raise ValueError(f"{op} takes {GATE_ARITY[op]} inputs, got {len(ins)}")
        s = self._sig()
        self.nodes.append(Node(kind="gate", op=op, inputs=list(ins), outputs=[s]))
        return s

    def lut(self, ttable: int, ins: Iterable[int]) -> int:
        ins = list(ins)
        k = len(ins)
        if k > 6:
            raise ValueError("LUT fan-in exceeds 6")
        if ttable < 0 or ttable >= 1 << (1 << k):
            raise ValueError("truth table does not fit the input count")
        s = self._sig()
        self.nodes.append(Node(kind="lut", inputs=ins, outputs=[s], ttable=ttable))
        return s

    def full_adder(self, a: int, b: int, cin: int) -> tuple[int, int]:
        s, co = self._sig(), self._sig()
        self.nodes.append(Node(kind="fa", inputs=[a, b, cin], outputs=[s, co]))
        return s, co

    def half_adder(self, a: int, b: int) -> tuple[int, int]:
        s, co = self._sig(), self._sig()
        self.nodes.append(Node(kind="ha", inputs=[a, b], outputs=[s, co]))
        return s, co

    def chain(self, pairs: list[tuple[int, int]], cin0: Optional[int] = None) -> tuple[list[int], int]:
        """Ripple chain over (a, b) pairs; returns (sum signals, final carry)."""
        if not pairs:
            raise ValueError("chain needs at least one member")
        if cin0 is None:
            cin0 = self.const(0)
        carry = cin0
        members, sums = [], []
        for a, b in pairs:
            members.append(len(self.nodes))
            s, carry = self.full_adder(a, b, carry)
            sums.append(s)
        self.chains.append(AdderChain(members, cin0))
        return sums, carry

    def set_output_bus(self, name: str, sigs: list[int]):
        if name in self.output_buses:
            raise ValueError(f"duplicate output bus {name!r}")
        self.output_buses[name] = list(sigs)

    def build(self) -> Netlist:
        return Netlist(self.nodes, self.chains, self.input_buses, self.output_buses, self.n_signals)


def validate(netlist: Netlist) -> list[Diagnostic]:
    """Structural check; empty list means the netlist is well-formed."""
    diags: list[Diagnostic] = []
    seen_driver: dict[int, int] = {}
    for nid, node in enumerate(netlist.nodes):
        for s in node.outputs:
            if s in seen_driver:
                diags.append(Diagnostic("multi-driver", nid,
                                        f"signal {s} already driven by node {seen_driver[s]}"))
            seen_driver[s] = nid
        if node.kind == "gate":
            want = GATE_ARITY.get(node.op, -1)
            if node.op not in GATE_OPS:
                diags.append(Diagnostic("bad-op", nid, f"unknown gate op {node.op!r}"))
            elif len(node.inputs) != want:
                diags.append(Diagnostic("arity", nid,
                                        f"{node.op} needs {want} inputs, has {len(node.inputs)}"))
            if len(node.outputs) != 1:
                diags.append(Diagnostic("arity", nid, "gate must have exactly 1 output"))
        elif node.kind == "lut":
            k = len(node.inputs)
            if k > 6:
                diags.append(Diagnostic("arity", nid, f"LUT fan-in {k} exceeds 6"))
            if node.ttable is None or node.ttable < 0 or node.ttable >= 1 << (1 << min(k, 6)):
                diags.append(Diagnostic("ttable", nid, "truth table length is not 2^k bits"))
            if len(node.outputs) != 1:
                diags.append(Diagnostic("arity", nid, "LUT must have exactly 1 output"))
        elif node.kind == "fa":
            if len(node.inputs) != 3 or len(node.outputs) != 2:
                diags.append(Diagnostic("arity", nid, "full adder needs 3 inputs / 2 outputs"))
        elif node.kind == "ha":
            if len(node.inputs) != 2 or len(node.outputs) != 2:
                diags.append(Diagnostic("arity", nid, "half adder needs 2 inputs / 2 outputs"))
        elif node.kind == "const":
            if node.value not in (0, 1):
                diags.append(Diagnostic("const", nid, "const value must be 0 or 1"))
        elif node.kind == "input":
            pass
        else:
            diags.append(Diagnostic("bad-kind", nid, f"unknown node kind {node.kind!r}"))

    # dangling inputs
    for nid, node in enumerate(netlist.nodes):
        for s in node.inputs:
            if s not in seen_driver:
                diags.append(Diagnostic("undriven", nid, f"input signal {s} has no driver"))

    for name, sigs in netlist.output_buses.items():
        for i, s in enumerate(sigs):
            if s not in seen_driver:
                diags.append(Diagnostic("undriven-output", None,
                                        f"output {name}[{i}] (signal {s}) has no driver"))

    # chain shape and carry exclusivity
    consumers = netlist.consumers()
    for cid, chain in enumerate(netlist.chains):
        if not chain.members:
            diags.append(Diagnostic("chain-empty", None, f"chain {cid} has no members"))
            continue
        ok = True
        for mid in chain.members:
            if mid >= len(netlist.nodes) or netlist.nodes[mid].kind != "fa":
                diags.append(Diagnostic("chain-member", mid, f"chain {cid} member is not a full adder"))
                ok = False
        if not ok:
            continue
        first = netlist.nodes[chain.members[0]]
        if first.inputs[2] != chain.cin0:
            diags.append(Diagnostic("chain-cin", chain.members[0],
                                    f"chain {cid} first cin does not match cin0"))
        for a, b in zip(chain.members, chain.members[1:]):
            cout = netlist.nodes[a].outputs[1]
            if netlist.nodes[b].inputs[2] != cout:
                diags.append(Diagnostic("chain-link", b,
                                        f"chain {cid}: cout of node {a} does not feed cin of node {b}"))
            users = consumers.get(cout, [])
            if [u for u in users if u != b]:
                diags.append(Diagnostic("chain-exclusivity", a,
                                        f"chain {cid}: intermediate carry {cout} has outside consumers"))

    try:
        netlist.topo_order()
    except ValueError:
        diags.append(Diagnostic("cycle", None, "netlist contains a combinational cycle"))
    return diags


def stats(netlist: Netlist) -> NetlistStats:
    fa = sum(1 for n in netlist.nodes if n.kind == "fa")
    ha = sum(1 for n in netlist.nodes if n.kind == "ha")
    gates = sum(1 for n in netlist.nodes if n.kind == "gate")
    luts = sum(1 for n in netlist.nodes if n.kind == "lut")
    hist: dict[int, int] = {}
    for chain in netlist.chains:
        hist[len(chain.members)] = hist.get(len(chain.members), 0) + 1
    return NetlistStats(fa, ha, gates, luts, len(netlist.chains), hist)
