"""Greedy LUT technology mapping for the gate-level compression logic.

Constant propagation and dead-node sweep first, then depth-oriented cone
covering: gates are processed in topological order, each cone grows while
its leaf support stays within k, preferring the merge that reduces depth
and then leaf count.  Multi-fanout gates become cone roots (LUT outputs).
Adder primitives and carry chains pass through untouched.
"""

from __future__ import annotations

from dataclasses import dataclass

from .netlist import AdderChain, Netlist, Node


@dataclass
class MappedNetlist:
    netlist: Netlist
    lut_levels: dict[int, int]      # node id -> depth (LUT levels from inputs)

    @property
    def luts(self):
        return [n for n in self.netlist.nodes if n.kind == "lut"]


def _gate_eval(op: str, vals: list[int]) -> int:
    if op == "NOT":
        return vals[0] ^ 1
    if op == "AND2":
        return vals[0] & vals[1]
    if op == "OR2":
        return vals[0] | vals[1]
    if op == "XOR2":
        return vals[0] ^ vals[1]
    if op == "MUX2":
        return vals[2] if vals[0] else vals[1]
    raise ValueError(op)


def _propagate_constants(netlist: Netlist):
    """Fold gates with constant inputs; returns (replacement map, const values).

    Replacements map a gate output either to another signal or to a constant
    via the returned const-signal table.
    """
    const_val: dict[int, int] = {}
    alias: dict[int, int] = {}
    for node in netlist.nodes:
        if node.kind == "const":
            const_val[node.outputs[0]] = node.value

    def res(s: int) -> int:
        while s in alias:
            s = alias[s]
        return s

    const_sig = {v: s for s, v in const_val.items()}

    def const_for(value: int):
        return const_sig.get(value)

    for nid in netlist.topo_order():
        node = netlist.nodes[nid]
        if node.kind != "gate":
            continue
        ins = [res(s) for s in node.inputs]
        vals = [const_val.get(s) for s in ins]
        out = node.outputs[0]
        if all(v is not None for v in vals):
            target = const_for(_gate_eval(node.op, vals))
            if target is not None:
                alias[out] = target
                const_val[out] = const_val[target]
            continue
        # partial simplifications on 2-input gates
        op = node.op
        if op == "AND2":
            for i in (0, 1):
                if vals[i] == 0 and const_for(0) is not None:
                    alias[out] = const_for(0)
                    const_val[out] = 0
                    break
                if vals[i] == 1:
                    alias[out] = ins[1 - i]
                    break
        elif op == "OR2":
            for i in (0, 1):
                if vals[i] == 1 and const_for(1) is not None:
                    alias[out] = const_for(1)
                    const_val[out] = 1
                    break
                if vals[i] == 0:
                    alias[out] = ins[1 - i]
                    break
        elif op == "XOR2":
            for i in (0, 1):
                if vals[i] == 0:
                    alias[out] = ins[1 - i]
                    break
        elif op == "MUX2":
            if vals[0] is not None:
                alias[out] = ins[2] if vals[0] else ins[1]
    return alias


def map_to_luts(netlist: Netlist, k: int = 6) -> MappedNetlist:
    """Cover all gates with <= k-input LUTs; functional equivalence preserved."""
    if k not in (4, 5, 6):
        raise ValueError("k must be 4, 5, or 6")

    if not any(n.kind == "gate" for n in netlist.nodes):
        levels: dict[int, int] = {}
        sig_level: dict[int, int] = {}
        for nid in netlist.topo_order():
            node = netlist.nodes[nid]
            lvl = max((sig_level.get(s, 0) for s in node.inputs), default=0)
            if node.kind == "lut":
                lvl += 1
                levels[nid] = lvl
            for s in node.outputs:
                sig_level[s] = lvl
        return MappedNetlist(netlist, levels)

    alias = _propagate_constants(netlist)

    def res(s: int) -> int:
        while s in alias:
            s = alias[s]
        return s

    producer: dict[int, int] = {}
    for nid, node in enumerate(netlist.nodes):
        for s in node.outputs:
            producer[s] = nid

    # fanout over resolved signals, counting bus outputs as consumers
    fanout: dict[int, int] = {}
    live_consumers: dict[int, list[int]] = {}
    for nid, node in enumerate(netlist.nodes):
        for s in node.inputs:
            r = res(s)
            fanout[r] = fanout.get(r, 0) + 1
            live_consumers.setdefault(r, []).append(nid)
    for sigs in netlist.output_buses.values():
        for s in sigs:
            fanout[res(s)] = fanout.get(res(s), 0) + 1

    def is_gate_sig(s: int) -> bool:
        nid = producer.get(s)
        return nid is not None and netlist.nodes[nid].kind == "gate"

    # live = reaches an output bus or a non-gate consumer, post-aliasing
    live: set[int] = set()
    stack = [res(s) for sigs in netlist.output_buses.values() for s in sigs]
    for nid, node in enumerate(netlist.nodes):
        if node.kind in ("fa", "ha", "lut"):
            stack.extend(res(s) for s in node.inputs)
    while stack:
        s = stack.pop()
        if s in live:
            continue
        live.add(s)
        nid = producer.get(s)
        if nid is not None and netlist.nodes[nid].kind == "gate":
            stack.extend(res(x) for x in netlist.nodes[nid].inputs)

    # gate depth for the merge preference
    depth: dict[int, int] = {}
    for nid in netlist.topo_order():
        node = netlist.nodes[nid]
        if node.kind == "gate":
            d = 0
            for s in node.inputs:
                r = res(s)
                if is_gate_sig(r):
                    d = max(d, depth.get(r, 0))
            depth[node.outputs[0]] = d + 1

    # roots: live gate signals consumed by a non-gate, an output bus, or >1 user
    roots: list[int] = []
    root_set: set[int] = set()
    out_sigs = {res(s) for sigs in netlist.output_buses.values() for s in sigs}
    for nid, node in enumerate(netlist.nodes):
        if node.kind != "gate":
            continue
        s = node.outputs[0]
        if s in alias or s not in live:
            continue
        users = live_consumers.get(s, [])
        non_gate = any(netlist.nodes[u].kind != "gate" for u in users)
        if s in out_sigs or non_gate or fanout.get(s, 0) > 1:
            roots.append(s)
            root_set.add(s)

    def cone_cover(root: int) -> tuple[set[int], list[int]]:
        """Grow a cone from `root`; returns (gate signals inside, leaf signals)."""
        cone = {root}
        leaves = []
        for s in netlist.nodes[producer[root]].inputs:
            leaves.append(res(s))
        while True:
            cand = []
            for leaf in leaves:
                if not is_gate_sig(leaf) or leaf in root_set or leaf in cone:
                    continue
                new_leaves = set(leaves) - {leaf}
                for s in netlist.nodes[producer[leaf]].inputs:
                    new_leaves.add(res(s))
                if len(new_leaves) <= k:
                    cand.append((-depth.get(leaf, 0), len(new_leaves), leaf, new_leaves))
            if not cand:
                break
            cand.sort(key=lambda c: (c[0], c[1], c[2]))
            _, _, leaf, new_leaves = cand[0]
            cone.add(leaf)
            leaves = sorted(new_leaves)
        return cone, sorted(set(leaves))

    def cone_ttable(cone: set[int], leaves: list[int], root: int) -> int:
        members = sorted(cone, key=lambda s: depth.get(s, 0))
        tt = 0
        for row in range(1 << len(leaves)):
            vals = {leaf: (row >> i) & 1 for i, leaf in enumerate(leaves)}
            for s in members:
                node = netlist.nodes[producer[s]]
                vals[s] = _gate_eval(node.op, [vals[res(x)] for x in node.inputs])
            if vals[root]:
                tt |= 1 << row
        return tt

    # emit: new LUT covers queued from roots; uncovered leaf gates become roots
    pending = list(roots)
    covered: dict[int, tuple[int, list[int]]] = {}
    seen = set(pending)
    while pending:
        root = pending.pop(0)
        cone, leaves = cone_cover(root)
        covered[root] = (cone_ttable(cone, leaves, root), leaves)
        for leaf in leaves:
            if is_gate_sig(leaf) and leaf not in seen:
                root_set.add(leaf)
                seen.add(leaf)
                pending.append(leaf)

    # rebuild, dropping all gates, keeping signal ids stable
    new_nodes: list[Node] = []
    old_to_new: dict[int, int] = {}
    needed_consts: set[int] = set()

    def needed(s: int) -> int:
        r = res(s)
        nid = producer.get(r)
        if nid is not None and netlist.nodes[nid].kind == "const":
            needed_consts.add(nid)
        return r

    for nid, node in enumerate(netlist.nodes):
        if node.kind == "gate" or node.kind == "const":
            continue
        old_to_new[nid] = len(new_nodes)
        new_nodes.append(Node(kind=node.kind,
                              inputs=[needed(s) for s in node.inputs],
                              outputs=list(node.outputs),
                              op=node.op, name=node.name, bit=node.bit,
                              value=node.value, ttable=node.ttable))
    out_buses = {bus: [needed(s) for s in sigs]
                 for bus, sigs in netlist.output_buses.items()}
    for root in covered:
        tt, leaves = covered[root]
        leaves = [needed(s) for s in leaves]
        new_nodes.append(Node(kind="lut", inputs=leaves, outputs=[root], ttable=tt))
    for nid in sorted(needed_consts):
        node = netlist.nodes[nid]
        old_to_new[nid] = len(new_nodes)
        new_nodes.append(Node(kind="const", outputs=list(node.outputs), value=node.value))

    chains = [AdderChain([old_to_new[m] for m in c.members], res(c.cin0))
              for c in netlist.chains]
    mapped = Netlist(new_nodes, chains, dict(netlist.input_buses), out_buses,
                     netlist.n_signals)

    levels: dict[int, int] = {}
    sig_level: dict[int, int] = {}
    for nid in mapped.topo_order():
        node = mapped.nodes[nid]
        lvl = max((sig_level.get(s, 0) for s in node.inputs), default=0)
        if node.kind == "lut":
            lvl += 1
            levels[nid] = lvl
        for s in node.outputs:
            sig_level[s] = lvl
    return MappedNetlist(mapped, levels)


def lut_usage_split(mapped: MappedNetlist) -> dict:
    """Histogram of distinct-input counts per LUT plus the 6-LUT fraction."""
    hist: dict[int, int] = {}
    for node in mapped.netlist.nodes:
        if node.kind == "lut":
            n = len(set(node.inputs))
            hist[n] = hist.get(n, 0) + 1
    total = sum(hist.values())
    return {
        "histogram": dict(sorted(hist.items())),
        "six_lut_fraction": (hist.get(6, 0) / total) if total else 0.0,
    }
