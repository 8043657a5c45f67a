"""Area, delay, and area-delay-product reporting over a placement.

Area is ALM-granular: occupied ALMs times the variant's per-ALM figure
(crossbar shares are already amortized into that figure).  Delay is the
longest combinational input-to-output path over the placed netlist, with
edge weights drawn from the architecture's delay table; every reported
path carries a component breakdown that sums to the total.  Routing
between logic blocks is not modeled, so absolute delays are a proxy —
only deltas between variants are meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .arch import ArchSpec
from .lutmap import MappedNetlist
from .packer import Placement


@dataclass
class PathStep:
    signal: int
    components: list[tuple[str, float]]     # (delay component label, ps)


@dataclass
class Report:
    alm_count: int
    lb_count: int
    total_area: float                       # MWTA
    critical_path_ps: float
    adp: float                              # MWTA * ps
    path: list[PathStep] = field(default_factory=list)
    concurrency: dict = field(default_factory=dict)

    def breakdown(self) -> list[tuple[str, float]]:
        return [c for step in self.path for c in step.components]

    def to_jsonable(self) -> dict:
        return {
            "alm_count": self.alm_count,
            "lb_count": self.lb_count,
            "total_area_mwta": self.total_area,
            "critical_path_ps": self.critical_path_ps,
            "adp": self.adp,
            "concurrency": self.concurrency,
            "critical_path": [
                {"signal": s.signal, "components": s.components}
                for s in self.path],
        }


def area(placement: Placement, arch: ArchSpec) -> float:
    """Occupied ALMs times the per-ALM area for the variant."""
    return placement.occupied_alms() * arch.alm_area()


def adp(total_area: float, critical_path_ps: float) -> float:
    return total_area * critical_path_ps


def critical_path(placement: Placement, mapped: MappedNetlist | None,
                  arch: ArchSpec) -> tuple[float, list[PathStep]]:
    """Longest input-to-output path; returns (ps, per-signal breakdown).

    Edge costs: any crossbar entry is lb_in_to_alm_in (or lb_in_to_z for
    Z-routed adder operands); LUT traversal costs lut_delay_per_level;
    adder entry costs the variant's general path unless the operand rides
    Z; each new chain ALM adds carry_per_alm.
    """
    if not placement.clusters:
        return 0.0, []
    netlist = placement.netlist
    d = arch.delay
    slot_of: dict[int, object] = {}
    for cluster in placement.clusters:
        for slot in cluster.slots:
            for nid in slot.adder_nodes + slot.luts:
                slot_of[nid] = slot

    adder_entry = (d.alm_in_to_adder_baseline if arch.variant == "baseline"
                   else d.alm_in_to_adder_dd)

    # arrival[s] = ps; trace[s] = (predecessor signal or None, edge components)
    arrival: dict[int, float] = {}
    trace: dict[int, tuple] = {}
    producer = {}
    for nid, node in enumerate(netlist.nodes):
        for s in node.outputs:
            producer[s] = nid

    def arr(s) -> float:
        return arrival.get(s, 0.0)

    def settle(out: int, cands: list[tuple[float, int | None, list]]):
        best = max(cands, key=lambda c: c[0], default=(0.0, None, []))
        arrival[out] = best[0]
        trace[out] = (best[1], best[2])

    def operand_cost(s: int, slot) -> tuple[float, int | None, list]:
        """Arrival contribution of adder operand `s` into `slot`."""
        if slot is not None and getattr(slot, "adder_via_z", False):
            comps = [("lb_in_to_z", d.lb_in_to_z), ("z_to_adder", d.z_to_adder)]
            return arr(s) + d.lb_in_to_z + d.z_to_adder, s, comps
        pid = producer.get(s)
        if (slot is not None and pid is not None and pid in slot.luts
                and slot.luts_feed_adder):
            # fused operand LUT: its traversal is inside the adder-entry figure
            lut = netlist.nodes[pid]
            base, prev = 0.0, None
            for x in lut.inputs:
                if arr(x) >= base:
                    base, prev = arr(x), x
            comps = [("lb_in_to_alm_in", d.lb_in_to_alm_in),
                     ("adder_entry", adder_entry)]
            return base + d.lb_in_to_alm_in + adder_entry, prev, comps
        comps = [("lb_in_to_alm_in", d.lb_in_to_alm_in),
                 ("adder_entry", adder_entry)]
        return arr(s) + d.lb_in_to_alm_in + adder_entry, s, comps

    const_sigs = set()
    for nid in netlist.topo_order():
        node = netlist.nodes[nid]
        if node.kind in ("input",):
            for s in node.outputs:
                arrival[s] = 0.0
                trace[s] = (None, [])
        elif node.kind == "const":
            const_sigs.update(node.outputs)
        elif node.kind == "lut":
            slot = slot_of.get(nid)
            if slot is not None and slot.luts_feed_adder:
                continue                    # folded into the adder entry path
            out = node.outputs[0]
            cands = []
            for s in node.inputs:
                if s in const_sigs:
                    continue
                comps = [("lb_in_to_alm_in", d.lb_in_to_alm_in),
                         ("lut", d.lut_delay_per_level)]
                cands.append((arr(s) + d.lb_in_to_alm_in
                              + d.lut_delay_per_level, s, comps))
            if (arch.variant == "dd6" and slot is not None
                    and getattr(slot, "mode", "") == "arith_concurrent6"):
                cands = [(t + d.dd6_output_mux_penalty, p,
                          c + [("dd6_output_mux", d.dd6_output_mux_penalty)])
                         for t, p, c in cands] or cands
            settle(out, cands)
        elif node.kind in ("fa", "ha"):
            slot = slot_of.get(nid)
            s_out = node.outputs[0]
            cout = node.outputs[1] if len(node.outputs) > 1 else None
            cands = [operand_cost(s, slot) for s in node.inputs[:2]
                     if s not in const_sigs]
            if node.kind == "fa":
                cin = node.inputs[2]
                if cin not in const_sigs:
                    pid = producer.get(cin)
                    from_chain = (pid is not None
                                  and netlist.nodes[pid].kind == "fa")
                    if from_chain:
                        # carry link; per-ALM cost only when changing slots
                        hop = (d.carry_per_alm
                               if slot_of.get(pid) is not slot else 0.0)
                        comps = ([("carry", hop)] if hop else [])
                        cands.append((arr(cin) + hop, cin, comps))
                    else:
                        cands.append(operand_cost(cin, slot))
            settle(s_out, cands)
            if cout is not None:
                arrival[cout] = arrival[s_out]
                trace[cout] = trace[s_out]

    best_total, best_sig = 0.0, None
    for sigs in netlist.output_buses.values():
        for s in sigs:
            if s in const_sigs:
                continue
            total = arr(s) + d.lut_out_to_alm_out
            if total >= best_total:
                best_total, best_sig = total, s
    if best_sig is None:
        return 0.0, []

    steps: list[PathStep] = []
    if d.lut_out_to_alm_out:
        steps.append(PathStep(best_sig, [("lut_out_to_alm_out",
                                          d.lut_out_to_alm_out)]))
    s = best_sig
    while s is not None and s in trace:
        prev, comps = trace[s]
        if comps:
            steps.append(PathStep(s, comps))
        s = prev
    steps.reverse()
    total = sum(ps for step in steps for _, ps in step.components)
    return total, steps


def report(placement: Placement, mapped: MappedNetlist | None,
           arch: ArchSpec) -> Report:
    from .packer import concurrency_stats
    a = area(placement, arch)
    ps, steps = critical_path(placement, mapped, arch)
    return Report(alm_count=placement.occupied_alms(),
                  lb_count=len(placement.clusters),
                  total_area=a, critical_path_ps=ps, adp=adp(a, ps),
                  path=steps, concurrency=concurrency_stats(placement))
