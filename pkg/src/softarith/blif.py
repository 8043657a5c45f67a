"""BLIF export (and a small importer used for round-trip checks).

Adder primitives are expanded into gate-level ``.names`` tables: a 3-input
parity for the sum and a majority for the carry.  Tables are emitted in a
stable topological order, so exports are deterministic.
"""

from __future__ import annotations

from .netlist import Netlist, NetlistBuilder

_GATE_COVERS = {
    "NOT": ["0 1"],
    "AND2": ["11 1"],
    "OR2": ["1- 1", "-1 1"],
    "XOR2": ["01 1", "10 1"],
    # inputs (sel, d0, d1)
    "MUX2": ["01- 1", "1-1 1"],
}
_FA_SUM = ["001 1", "010 1", "100 1", "111 1"]
_FA_CARRY = ["11- 1", "1-1 1", "-11 1"]


def export_blif(netlist: Netlist, model: str = "softarith") -> str:
    """Serialize to BLIF text; raises ValueError on unnamed primary I/O."""
    sig_name: dict[int, str] = {}
    for bus, sigs in netlist.input_buses.items():
        if not bus:
            raise ValueError("unnamed primary input bus")
        for i, s in enumerate(sigs):
            sig_name[s] = f"{bus}[{i}]"

    def name(s: int) -> str:
        return sig_name.get(s, f"n{s}")

    lines = [f".model {model}"]
    ins = [f"{bus}[{i}]" for bus, sigs in netlist.input_buses.items() for i in range(len(sigs))]
    lines.append(".inputs " + " ".join(ins))
    outs = []
    for bus, sigs in netlist.output_buses.items():
        if not bus:
            raise ValueError("unnamed primary output bus")
        outs.extend(f"{bus}[{i}]" for i in range(len(sigs)))
    lines.append(".outputs " + " ".join(outs))

    for nid in netlist.topo_order():
        node = netlist.nodes[nid]
        if node.kind == "input":
            continue
        if node.kind == "const":
            lines.append(f".names {name(node.outputs[0])}")
            if node.value:
                lines.append("1")
        elif node.kind == "gate":
            lines.append(".names " + " ".join(name(s) for s in node.inputs)
                         + f" {name(node.outputs[0])}")
            lines.extend(_GATE_COVERS[node.op])
        elif node.kind == "lut":
            lines.append(".names " + " ".join(name(s) for s in node.inputs)
                         + f" {name(node.outputs[0])}")
            k = len(node.inputs)
            if k == 0:
                if node.ttable & 1:
                    lines.append("1")
            else:
                for row in range(1 << k):
                    if (node.ttable >> row) & 1:
                        lines.append("".join(str((row >> j) & 1) for j in range(k)) + " 1")
        elif node.kind in ("fa", "ha"):
            ins_n = [name(s) for s in node.inputs]
            s_out, c_out = (name(s) for s in node.outputs)
            if node.kind == "fa":
                lines.append(f".names {' '.join(ins_n)} {s_out}")
                lines.extend(_FA_SUM)
                lines.append(f".names {' '.join(ins_n)} {c_out}")
                lines.extend(_FA_CARRY)
            else:
                lines.append(f".names {' '.join(ins_n)} {s_out}")
                lines.extend(["01 1", "10 1"])
                lines.append(f".names {' '.join(ins_n)} {c_out}")
                lines.append("11 1")

    # buffers tying internal signals to their primary-output names
    for bus, sigs in netlist.output_buses.items():
        for i, s in enumerate(sigs):
            lines.append(f".names {name(s)} {bus}[{i}]")
            lines.append("1 1")
    lines.append(".end")
    return "\n".join(lines) + "\n"


def _bus_bit(token: str):
    if token.endswith("]") and "[" in token:
        bus, idx = token[:-1].rsplit("[", 1)
        if idx.isdigit():
            return bus, int(idx)
    return token, 0


def parse_blif(text: str) -> Netlist:
    """Parse the single-output-cover BLIF subset produced by export_blif."""
    raw_lines: list[str] = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].rstrip()
        if not line:
            continue
        if raw_lines and raw_lines[-1].endswith("\\"):
            raw_lines[-1] = raw_lines[-1][:-1] + line
        else:
            raw_lines.append(line)

    inputs: list[str] = []
    outputs: list[str] = []
    tables: list[tuple[list[str], str, list[str]]] = []
    i = 0
    while i < len(raw_lines):
        line = raw_lines[i]
        if line.startswith(".inputs"):
            inputs.extend(line.split()[1:])
        elif line.startswith(".outputs"):
            outputs.extend(line.split()[1:])
        elif line.startswith(".names"):
            parts = line.split()[1:]
            ins, out = parts[:-1], parts[-1]
            covers = []
            while i + 1 < len(raw_lines) and not raw_lines[i + 1].startswith("."):
                covers.append(raw_lines[i + 1])
                i += 1
            tables.append((ins, out, covers))
        elif line.startswith((".model", ".end")):
            pass
        else:
            raise ValueError(f"unsupported BLIF construct: {line}")
        i += 1

    builder = NetlistBuilder()
    sig_of: dict[str, int] = {}
    buses: dict[str, dict[int, str]] = {}
    for tok in inputs:
        bus, idx = _bus_bit(tok)
        buses.setdefault(bus, {})[idx] = tok
    for bus, bits in buses.items():
        sigs = builder.add_input_bus(bus, max(bits) + 1)
        for idx, tok in bits.items():
            sig_of[tok] = sigs[idx]

    # tables are emitted in dependency order by export_blif
    for ins, out, covers in tables:
        tt = 0
        k = len(ins)
        for cover in covers:
            fields = cover.split()
            pattern = fields[0] if k else ""
            if (fields[-1] if fields else "1") != "1":
                raise ValueError("only 1-covers are supported")
            rows = [0]
            for j, ch in enumerate(pattern):
                if ch == "1":
                    rows = [r | (1 << j) for r in rows]
                elif ch == "-":
                    rows = rows + [r | (1 << j) for r in rows]
                elif ch != "0":
                    raise ValueError(f"bad cover character {ch!r}")
            if k == 0:
                rows = [0]
            for r in rows:
                tt |= 1 << r
        try:
            in_sigs = [sig_of[t] for t in ins]
        except KeyError as exc:
            raise ValueError(f"table input {exc} defined after use") from exc
        sig_of[out] = builder.lut(tt, in_sigs)

    out_buses: dict[str, dict[int, int]] = {}
    for tok in outputs:
        bus, idx = _bus_bit(tok)
        out_buses.setdefault(bus, {})[idx] = sig_of[tok]
    for bus, bits in out_buses.items():
        builder.set_output_bus(bus, [bits[i] for i in range(max(bits) + 1)])
    return builder.build()
