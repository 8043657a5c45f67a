"""Greedy clustering of a mapped netlist into ALMs and logic blocks.

Three phases: adder chains are sliced two bits per ALM and laid into
consecutive slots (chains may span consecutive LBs over the dedicated
carry links); operand LUTs that feed only their own slot's adders are
fused in arith mode; on DD5/DD6, leftover LUTs are absorbed into
concurrent arithmetic ALMs whose operands can ride the Z bypass inputs.
Whatever remains is clustered seed-and-grow by shared-signal affinity.

The heuristic is a deterministic stand-in for a timing-driven packer:
results are meant to be compared *between* architecture variants, not
against any particular commercial tool's absolute ALM counts.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional, Union

from .arch import AlmContents, ArchSpec, mode_legal
from .lutmap import MappedNetlist
from .netlist import Diagnostic, Netlist


@dataclass
class AlmSlot:
    mode: str                           # one of arch.MODES
    chain: Optional[int] = None         # chain index, when adder bits present
    positions: list[int] = field(default_factory=list)   # member offsets in chain
    adder_nodes: list[int] = field(default_factory=list)
    luts: list[int] = field(default_factory=list)        # lut node ids
    luts_feed_adder: bool = False
    adder_via_z: bool = False

    def to_jsonable(self) -> dict:
        return {"mode": self.mode, "chain": self.chain,
                "positions": list(self.positions),
                "adder_nodes": list(self.adder_nodes),
                "luts": list(self.luts),
                "luts_feed_adder": self.luts_feed_adder,
                "adder_via_z": self.adder_via_z}


@dataclass
class LogicBlockCluster:
    slots: list[AlmSlot] = field(default_factory=list)

    def to_jsonable(self) -> dict:
        return {"slots": [s.to_jsonable() for s in self.slots]}


@dataclass
class PackOptions:
    unrelated_clustering: bool = False
    lb_budget: Optional[int] = None
    seed: Optional[int] = None          # shuffles LUT ordering when set
    max_concurrent_luts: int = 2        # 1 restricts DD5 slots to one 5-LUT


@dataclass
class Placement:
    clusters: list[LogicBlockCluster]
    netlist: Netlist
    arch_variant: str
    unplaced: list[int] = field(default_factory=list)

    def occupied_alms(self) -> int:
        return sum(len(c.slots) for c in self.clusters)

    def to_jsonable(self) -> dict:
        return {"arch": self.arch_variant,
                "unplaced": list(self.unplaced),
                "clusters": [c.to_jsonable() for c in self.clusters]}


# -- pin bookkeeping ------------------------------------------------------

class _ClusterState:
    """Incremental signal accounting for one LB under construction."""

    def __init__(self, netlist: Netlist, const_sigs: set):
        self.cluster = LogicBlockCluster()
        self.netlist = netlist
        self.const = const_sigs
        self.consumed: set[int] = set()
        self.produced: set[int] = set()
        self.z: set[int] = set()

    @property
    def ext(self) -> set:
        return self.consumed - self.produced

    def slot_signals(self, slot: AlmSlot, first_in_chain: bool):
        """(consumed, produced) signal sets for one slot's contents."""
        consumed, produced = set(), set()
        nodes = self.netlist.nodes
        for i, nid in enumerate(slot.adder_nodes):
            node = nodes[nid]
            consumed.update(node.inputs[:2])
            if first_in_chain and i == 0:
                consumed.add(node.inputs[2])     # real cin0 costs a pin
            produced.update(node.outputs)
        for nid in slot.luts:
            consumed.update(nodes[nid].inputs)
            produced.update(nodes[nid].outputs)
        return consumed - self.const, produced

    def add_slot(self, slot: AlmSlot, first_in_chain=False):
        consumed, produced = self.slot_signals(slot, first_in_chain)
        self.consumed |= consumed
        self.produced |= produced
        self.cluster.slots.append(slot)

    def add_lut(self, slot: AlmSlot, lut_id: int):
        node = self.netlist.nodes[lut_id]
        slot.luts.append(lut_id)
        self.consumed.update(set(node.inputs) - self.const)
        self.produced.update(node.outputs)


def _adder_operands(netlist: Netlist, slot: AlmSlot, const_sigs: set) -> set:
    ops = set()
    for nid in slot.adder_nodes:
        ops.update(netlist.nodes[nid].inputs[:2])
    return ops - const_sigs


def _const_signals(netlist: Netlist) -> set:
    return {s for n in netlist.nodes if n.kind == "const" for s in n.outputs}


def _lut_inputs(netlist: Netlist, lut_id: int, const_sigs: set) -> frozenset:
    return frozenset(netlist.nodes[lut_id].inputs) - const_sigs


def pack(mapped: Union[MappedNetlist, Netlist], arch: ArchSpec,
         options: Optional[PackOptions] = None) -> Placement:
    """Cluster a mapped netlist into logic blocks; see module docstring."""
    netlist = mapped.netlist if isinstance(mapped, MappedNetlist) else mapped
    if any(n.kind == "gate" for n in netlist.nodes):
        raise ValueError("netlist has unmapped gates; run LUT mapping first")
    opt = options or PackOptions()
    const_sigs = _const_signals(netlist)
    out_sigs = {s for sigs in netlist.output_buses.values() for s in sigs}

    chain_member = {nid for c in netlist.chains for nid in c.members}
    units = [(cid, list(c.members), c.cin0) for cid, c in enumerate(netlist.chains)]
    for nid, node in enumerate(netlist.nodes):
        if node.kind in ("fa", "ha") and nid not in chain_member:
            units.append((None, [nid], node.inputs[2] if node.kind == "fa" else None))

    states: list[_ClusterState] = []
    unplaced: list[int] = []

    def new_state() -> Optional[_ClusterState]:
        if opt.lb_budget is not None and len(states) >= opt.lb_budget:
            return None
        st = _ClusterState(netlist, const_sigs)
        states.append(st)
        return st

    # phase 1: slice chains two bits per ALM, consecutive slots, LBs in order
    cur = None
    for cid, members, cin0 in units:
        if opt.lb_budget is not None:
            room = (opt.lb_budget - len(states)) * arch.alms_per_lb
            if cur is not None:
                room += arch.alms_per_lb - len(cur.cluster.slots)
            if (len(members) + 1) // 2 > room:
                unplaced.extend(members)    # never split a chain over the budget
                continue
        for off in range(0, len(members), 2):
            if cur is None or len(cur.cluster.slots) >= arch.alms_per_lb:
                cur = new_state()
                if cur is None:
                    unplaced.extend(members[off:])
                    break
            piece = members[off:off + 2]
            slot = AlmSlot(mode="arith", chain=cid,
                           positions=list(range(off, off + len(piece))),
                           adder_nodes=piece)
            first = off == 0 and cin0 is not None and cin0 not in const_sigs
            cur.add_slot(slot, first_in_chain=first)

    # phase 2a: fuse operand LUTs whose whole fanout is one slot's adders
    consumers = netlist.consumers()
    fused: set[int] = set()
    lut_ids = [nid for nid, n in enumerate(netlist.nodes) if n.kind == "lut"]
    lut_of_sig = {netlist.nodes[nid].outputs[0]: nid for nid in lut_ids}
    for st in states:
        for slot in st.cluster.slots:
            if not slot.adder_nodes:
                continue
            slot_set = set(slot.adder_nodes)
            direct = _adder_operands(netlist, slot, const_sigs)
            cand = []
            for s in sorted(direct):
                nid = lut_of_sig.get(s)
                if nid is None or nid in fused or s in out_sigs:
                    continue
                if any(c not in slot_set for c in consumers.get(s, [])):
                    continue
                ins = _lut_inputs(netlist, nid, const_sigs)
                if len(ins) <= 4:
                    cand.append((nid, s, ins))
            for nid, s, ins in cand:
                if len(slot.luts) >= 4:
                    break
                lut_sets = [_lut_inputs(netlist, l, const_sigs)
                            for l in slot.luts] + [ins]
                direct_now = _adder_operands(netlist, slot, const_sigs) - {
                    netlist.nodes[l].outputs[0] for l in slot.luts} - {s}
                pins = set().union(*lut_sets) | direct_now
                if len(pins) > arch.general_alm_inputs:
                    continue
                new_ext = (st.consumed | ins) - (st.produced | {s})
                if len(new_ext - st.produced) > arch.ext_pin_cap:
                    continue
                st.add_lut(slot, nid)
                slot.luts_feed_adder = True
                fused.add(nid)

    pending = [nid for nid in lut_ids if nid not in fused]
    if opt.seed is not None:
        random.Random(opt.seed).shuffle(pending)

    # phase 2b: DD variants route external adder operands over the Z bypass
    # (cheaper entry whether or not a LUT moves in), then absorb free LUTs
    # into those concurrent ALMs
    if arch.variant in ("dd5", "dd6"):
        for st in states:
            for slot in st.cluster.slots:
                if slot.mode != "arith" or slot.luts or not slot.adder_nodes:
                    continue
                ops = _adder_operands(netlist, slot, const_sigs)
                if ops & st.produced or len(st.z | ops) > arch.addmux_xbar_pins:
                    continue
                slot.mode = "arith_concurrent5"
                slot.adder_via_z = True
                st.z |= ops
        pending = _absorb_concurrent(netlist, arch, opt, states, pending,
                                     const_sigs)

    # phase 3: remaining LUTs, seed-and-grow affinity clustering
    pending = _cluster_luts(netlist, arch, opt, states, pending, const_sigs,
                            new_state)
    unplaced.extend(pending)

    clusters = [st.cluster for st in states if st.cluster.slots]
    return Placement(clusters, netlist, arch.variant, unplaced)


def _absorb_concurrent(netlist, arch, opt, states, pending, const_sigs):
    """Place LUTs alongside adder bits via the Z bypass; returns leftovers."""
    leftovers = []
    for lut_id in pending:
        ins = _lut_inputs(netlist, lut_id, const_sigs)
        if len(ins) > 6 or (len(ins) == 6 and arch.variant != "dd6"):
            leftovers.append(lut_id)
            continue
        mode = "arith_concurrent5" if len(ins) <= 5 else "arith_concurrent6"
        cand = []
        for ci, st in enumerate(states):
            if len((st.consumed | ins) - st.produced) > arch.ext_pin_cap:
                continue
            for si, slot in enumerate(st.cluster.slots):
                if mode == "arith_concurrent5":
                    if (slot.mode != mode
                            or len(slot.luts) >= opt.max_concurrent_luts):
                        continue
                    union = ins.union(*(_lut_inputs(netlist, l, const_sigs)
                                        for l in slot.luts))
                    if len(union) > arch.general_alm_inputs:
                        continue
                else:   # a 6-LUT takes over an empty concurrent slot (DD6)
                    if slot.mode != "arith_concurrent5" or slot.luts:
                        continue
                affinity = len(ins & (st.consumed | st.produced))
                cand.append((-affinity, ci, si))
        if not cand:
            leftovers.append(lut_id)
            continue
        cand.sort()
        aff, ci, si = cand[0]
        if aff == 0 and not opt.unrelated_clustering:
            leftovers.append(lut_id)        # affinity mode: no shared signals
            continue
        st, slot = states[ci], states[ci].cluster.slots[si]
        slot.mode = mode
        st.add_lut(slot, lut_id)
    return leftovers


def _cluster_luts(netlist, arch, opt, states, pending, const_sigs, new_state):
    """Seed-and-grow clustering of leftover LUTs; returns unplaced ids."""
    def fits_slot(st, lut_id, ins):
        """Find or make a slot for the LUT inside `st`; None if impossible."""
        if len(ins) <= 5:
            for slot in st.cluster.slots:
                if slot.mode == "two_lut5" and len(slot.luts) == 1:
                    other = _lut_inputs(netlist, slot.luts[0], const_sigs)
                    if len(ins | other) <= arch.general_alm_inputs:
                        return slot
        if len(st.cluster.slots) < arch.alms_per_lb:
            return AlmSlot(mode="two_lut5" if len(ins) <= 5 else "lut6")
        return None

    def try_place(st, lut_id) -> bool:
        ins = _lut_inputs(netlist, lut_id, const_sigs)
        if len((st.consumed | ins) - st.produced) > arch.ext_pin_cap:
            return False
        slot = fits_slot(st, lut_id, ins)
        if slot is None:
            return False
        if not slot.luts and slot not in st.cluster.slots:
            st.cluster.slots.append(slot)
        st.add_lut(slot, lut_id)
        return True

    def grow(st, pending, min_affinity=0):
        while pending:
            best = None
            for i, lut_id in enumerate(pending):
                ins = _lut_inputs(netlist, lut_id, const_sigs)
                affinity = len(ins & (st.consumed | st.produced))
                if affinity < min_affinity:
                    continue
                key = (-affinity, i)
                if best is None or key < best[0]:
                    best = (key, i)
            if best is None:
                break
            i = best[1]
            if try_place(st, pending[i]):
                pending.pop(i)
            elif opt.unrelated_clustering:
                # densest-first fallback before giving up on this LB
                for j in range(len(pending)):
                    if j != i and try_place(st, pending[j]):
                        pending.pop(j)
                        break
                else:
                    break
            else:
                break
        return pending

    pending = list(pending)
    # top up LBs opened by earlier phases before opening fresh ones
    for st in list(states):
        if not pending:
            break
        if len(st.cluster.slots) < arch.alms_per_lb:
            pending = grow(st, pending,
                           min_affinity=0 if opt.unrelated_clustering else 1)
    while pending:
        st = new_state()
        if st is None:
            return pending                  # LB budget exhausted
        if not try_place(st, pending[0]):
            return pending                  # cannot happen with sane arch
        pending.pop(0)
        pending = grow(st, pending)
    return pending


# -- auditing -------------------------------------------------------------

def legality_check(placement: Placement, arch: ArchSpec) -> list[Diagnostic]:
    """Re-derive every slot and cluster invariant from scratch."""
    diags: list[Diagnostic] = []
    netlist = placement.netlist
    const_sigs = _const_signals(netlist)

    placed: dict[int, tuple[int, int]] = {}
    chain_slots: dict[int, list[tuple[int, int, list[int]]]] = {}
    slot_no = 0

    for ci, cluster in enumerate(placement.clusters):
        if len(cluster.slots) > arch.alms_per_lb:
            diags.append(Diagnostic("lb-slots", None,
                                    f"LB {ci} holds {len(cluster.slots)} ALMs"))
        consumed, produced, z = set(), set(), set()
        for si, slot in enumerate(cluster.slots):
            for nid in slot.adder_nodes + slot.luts:
                if nid in placed:
                    diags.append(Diagnostic("duplicate", nid,
                                            "element placed twice"))
                placed[nid] = (ci, si)
            contents = AlmContents(
                lut_inputs=[_lut_inputs(netlist, l, const_sigs)
                            for l in slot.luts],
                adder_bits=len(slot.adder_nodes),
                luts_feed_adder=slot.luts_feed_adder,
                adder_via_z=slot.adder_via_z)
            ok, why = mode_legal(arch, slot.mode, contents)
            if not ok:
                diags.append(Diagnostic("mode", None,
                                        f"LB {ci} ALM {si}: " + "; ".join(why)))
            # fused operand LUTs feed the adder internally, no ALM output used
            n_out = len(slot.adder_nodes) + (
                0 if slot.luts_feed_adder else len(slot.luts))
            if n_out > arch.alm_outputs:
                diags.append(Diagnostic("alm-outputs", None,
                                        f"LB {ci} ALM {si} needs {n_out} outputs"))
            if slot.chain is not None:
                chain_slots.setdefault(slot.chain, []).append(
                    (slot_no, ci, slot.positions))
            for nid in slot.adder_nodes:
                node = netlist.nodes[nid]
                consumed.update(set(node.inputs[:2]) - const_sigs)
                produced.update(node.outputs)
                if slot.adder_via_z:
                    z.update(set(node.inputs[:2]) - const_sigs)
            # chain-internal carries ride dedicated wiring, but a real cin0
            # entering at position 0 does cost a crossbar pin
            if slot.chain is not None and 0 in slot.positions:
                cin0 = netlist.chains[slot.chain].cin0
                if cin0 not in const_sigs:
                    consumed.add(cin0)
            elif slot.chain is None:        # stray adders: cin is a normal pin
                for nid in slot.adder_nodes:
                    node = netlist.nodes[nid]
                    if node.kind == "fa" and node.inputs[2] not in const_sigs:
                        consumed.add(node.inputs[2])
            for nid in slot.luts:
                consumed.update(set(netlist.nodes[nid].inputs) - const_sigs)
                produced.update(netlist.nodes[nid].outputs)
            slot_no += 1
        ext = consumed - produced
        if len(ext) > arch.ext_pin_cap:
            diags.append(Diagnostic("pin-budget", None,
                                    f"LB {ci} uses {len(ext)} external inputs "
                                    f"(cap {arch.ext_pin_cap})"))
        if z - ext:
            diags.append(Diagnostic("z-local", None,
                                    f"LB {ci} Z-routes locally produced signals"))
        if len(z) > arch.addmux_xbar_pins:
            diags.append(Diagnostic("z-budget", None,
                                    f"LB {ci} Z-routes {len(z)} signals "
                                    f"(cap {arch.addmux_xbar_pins})"))
        if arch.variant == "baseline" and z:
            diags.append(Diagnostic("z-baseline", None,
                                    f"LB {ci} uses Z on the baseline"))

    # chain contiguity across the global (LB, ALM) order
    for cid, entries in chain_slots.items():
        entries.sort()
        flat = [p for _, _, positions in entries for p in positions]
        length = len(netlist.chains[cid].members)
        if flat != list(range(length)):
            diags.append(Diagnostic("chain-order", None,
                                    f"chain {cid} positions not consecutive"))
        nos = [no for no, _, _ in entries]
        if any(b != a + 1 for a, b in zip(nos, nos[1:])):
            diags.append(Diagnostic("chain-gap", None,
                                    f"chain {cid} slots not adjacent"))

    unplaced = set(placement.unplaced)
    for nid, node in enumerate(netlist.nodes):
        if node.kind in ("lut", "fa", "ha") and nid not in placed \
                and nid not in unplaced:
            diags.append(Diagnostic("missing", nid, "element never placed"))
    return diags


def concurrency_stats(placement: Placement) -> dict:
    """Occupancy partition plus the concurrent-LUT headline count."""
    concurrent_alms = concurrent_luts = arith = lut_only = six_lut = 0
    netlist = placement.netlist
    for cluster in placement.clusters:
        for slot in cluster.slots:
            if (slot.mode in ("arith_concurrent5", "arith_concurrent6")
                    and slot.luts):
                concurrent_alms += 1
                concurrent_luts += len(slot.luts)
            elif slot.adder_nodes:
                arith += 1      # includes Z-fed slots with no LUT moved in
            else:
                lut_only += 1
            if any(len(set(netlist.nodes[l].inputs)) == 6 for l in slot.luts):
                six_lut += 1
    return {"concurrent_alms": concurrent_alms,
            "concurrent_luts": concurrent_luts,
            "arith_alms": arith,
            "lut_only_alms": lut_only,
            "six_lut_alms": six_lut,
            "total_alms": placement.occupied_alms()}
