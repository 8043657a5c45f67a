"""Benchmark generators, stress tests, and seed-averaged sweeps.

The artificial stress circuit is a field of two-bit adder slices whose
operands are drawn from small shared input pools (one pool per LB-sized
group), plus an adjustable number of independent 5-LUTs reading the same
pools.  Heavy operand reuse keeps Z-pin demand per block satisfiable, so
Double-Duty blocks can absorb the LUT load without growing until their
concurrent capacity saturates.

The fill stress packs a fixed base circuit plus as many filler instances
(a generic multiplier with a random LUT blob) as a logic-block budget
admits, found by binary search; legality only, timing ignored.
"""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass, field
from typing import Optional

from .arch import ArchSpec, load_arch
from .lutmap import map_to_luts
from .netlist import Netlist, NetlistBuilder, stats
from .packer import PackOptions, concurrency_stats, legality_check, pack
from .analysis import report
from .reduction import synthesize

CSV_COLUMNS = ["arch", "algorithm", "width", "constant", "seed",
               "full-adders", "luts", "alms", "lbs", "area-mwta",
               "critical-path-ps", "adp", "concurrent-luts"]


@dataclass
class StressCircuitSpec:
    adder_bits: int = 500
    lut_count: int = 0
    shared_input_pool: int = 12     # fresh input signals per LB-sized group
    lut_fanin: int = 5
    seed: int = 0

    def validate(self):
        if self.adder_bits <= 0 or self.adder_bits % 2:
            raise ValueError("adder_bits must be positive and even")
        if self.shared_input_pool < self.lut_fanin:
            raise ValueError("shared input pool smaller than LUT fan-in")


@dataclass
class SweepSpec:
    """Defaults model FIR-style banks: narrow data times dense wide constants."""

    widths: list[int] = field(default_factory=lambda: [2, 3, 4, 5])
    constants: list[int] = field(default_factory=list)  # empty -> random
    random_constants: int = 8
    constant_bits: int = 10         # bit-length of random constants
    sparsity: float = 0.3           # chance of a zero bit in random constants
    algorithms: list[str] = field(
        default_factory=lambda: ["cascade", "wallace", "dadda"])
    archs: list[str] = field(default_factory=lambda: ["baseline", "dd5"])
    seeds: int = 3
    dedup: bool = True

    def validate(self):
        if not self.widths or not self.algorithms or not self.archs:
            raise ValueError("sweep dimensions must be non-empty")
        if not self.constants and self.random_constants <= 0:
            raise ValueError("no constants to sweep")


def gen_stress_circuit(spec: StressCircuitSpec) -> Netlist:
    """Adder slices over shared pools plus independent pool-fed 5-LUTs."""
    spec.validate()
    rng = random.Random(spec.seed)
    bld = NetlistBuilder()
    n_slices = spec.adder_bits // 2
    alms_per_group = 10
    n_groups = (n_slices + alms_per_group - 1) // alms_per_group
    pools = [bld.add_input_bus(f"p{g}", spec.shared_input_pool)
             for g in range(n_groups)]

    p = spec.shared_input_pool
    sums_out = []
    for i in range(n_slices):
        pool = pools[i // alms_per_group]
        w = [(2 * (i % alms_per_group) + j) % p for j in range(4)]
        sums, cout = bld.chain([(pool[w[0]], pool[w[1]]),
                                (pool[w[2]], pool[w[3]])])
        sums_out.extend(sums + [cout])
    bld.set_output_bus("s", sums_out)

    # LUT windows stay inside the pool span the Z crossbar can also reach
    span = min(p, 10)
    limit = max(1, span - spec.lut_fanin + 1)
    lut_out = []
    for j in range(spec.lut_count):
        # consecutive pairs share a pool so two 5-LUTs can share one ALM;
        # spreading singles across groups would strand half-filled ALMs
        pool = pools[(j // 2) % n_groups]
        start = j % limit
        ins = pool[start:start + spec.lut_fanin]
        tt = rng.randrange(1, (1 << (1 << len(ins))) - 1)
        lut_out.append(bld.lut(tt, ins))
    if lut_out:
        bld.set_output_bus("q", lut_out)
    return bld.build()


def run_artificial_stress(spec: StressCircuitSpec,
                          archs: Optional[list[str]] = None,
                          lut_counts: Optional[list[int]] = None) -> dict:
    """Area and concurrency curves over increasing LUT load."""
    archs = archs or ["baseline", "dd5"]
    if lut_counts is None:
        lut_counts = list(range(0, 501, 25))
    specs = {a: load_arch(a) for a in archs}
    curves = {a: [] for a in archs}
    for count in lut_counts:
        cell = StressCircuitSpec(spec.adder_bits, count,
                                 spec.shared_input_pool, spec.lut_fanin,
                                 spec.seed)
        net = gen_stress_circuit(cell)
        for name, arch in specs.items():
            p = pack(net, arch, PackOptions(unrelated_clustering=True))
            if p.unplaced or legality_check(p, arch):
                curves[name].append({"lut_count": count, "failed": True})
                continue
            r = report(p, None, arch)
            curves[name].append({"lut_count": count,
                                 "area_mwta": r.total_area,
                                 "alms": r.alm_count,
                                 "lbs": r.lb_count,
                                 "concurrent_luts":
                                     r.concurrency["concurrent_luts"]})
    return {"lut_counts": lut_counts, "curves": curves}


def merge_netlists(parts: list[tuple[str, Netlist]]) -> Netlist:
    """Disjoint union; bus names get the per-part prefix."""
    bld = NetlistBuilder()
    for prefix, net in parts:
        remap: dict[int, int] = {}

        def m(s, remap=remap):
            return remap[s]

        for name, sigs in net.input_buses.items():
            fresh = bld.add_input_bus(f"{prefix}{name}", len(sigs))
            remap.update(zip(sigs, fresh))
        # chains are atomic: order (node | whole chain) units topologically
        chain_of = {nid: cid for cid, c in enumerate(net.chains)
                    for nid in c.members}
        units, unit_inputs, produced_by = [], [], {}
        for nid, node in enumerate(net.nodes):
            if nid in chain_of:
                continue
            uid = len(units)
            units.append(("n", nid))
            unit_inputs.append(list(node.inputs))
            for s in node.outputs:
                produced_by[s] = uid
        for cid, c in enumerate(net.chains):
            uid = len(units)
            units.append(("c", cid))
            ins = [c.cin0]
            for nid in c.members:
                ins.extend(net.nodes[nid].inputs[:2])
                for s in net.nodes[nid].outputs:
                    produced_by[s] = uid
            unit_inputs.append(ins)
        indeg = [0] * len(units)
        succ = [[] for _ in units]
        for uid, ins in enumerate(unit_inputs):
            for s in set(ins):
                p = produced_by.get(s)
                if p is not None and p != uid:
                    succ[p].append(uid)
                    indeg[uid] += 1
        ready = [uid for uid, d in enumerate(indeg) if d == 0]
        order = []
        while ready:
            uid = ready.pop()
            order.append(uid)
            for nxt in succ[uid]:
                indeg[nxt] -= 1
                if indeg[nxt] == 0:
                    ready.append(nxt)

        for uid in order:
            kind, idx = units[uid]
            if kind == "c":
                chain = net.chains[idx]
                pairs = [(m(net.nodes[nid].inputs[0]),
                          m(net.nodes[nid].inputs[1]))
                         for nid in chain.members]
                sums, cout = bld.chain(pairs, m(chain.cin0))
                for nid, s in zip(chain.members, sums):
                    remap[net.nodes[nid].outputs[0]] = s
                remap[net.nodes[chain.members[-1]].outputs[1]] = cout
                continue
            node = net.nodes[idx]
            if node.kind == "input":
                continue
            if node.kind == "const":
                remap[node.outputs[0]] = bld.const(node.value)
            elif node.kind == "lut":
                remap[node.outputs[0]] = bld.lut(node.ttable,
                                                 [m(s) for s in node.inputs])
            elif node.kind == "gate":
                remap[node.outputs[0]] = bld.gate(node.op,
                                                  *[m(s) for s in node.inputs])
            elif node.kind == "ha":
                s, co = bld.half_adder(m(node.inputs[0]), m(node.inputs[1]))
                remap[node.outputs[0]], remap[node.outputs[1]] = s, co
            elif node.kind == "fa":
                s, co = bld.full_adder(*[m(x) for x in node.inputs])
                remap[node.outputs[0]], remap[node.outputs[1]] = s, co
        for name, sigs in net.output_buses.items():
            bld.set_output_bus(f"{prefix}{name}", [m(s) for s in sigs])
    return bld.build()


def make_filler(seed: int, mult_width: int = 8, blob_luts: int = 20) -> Netlist:
    """Generic multiplier plus an independent random 5-LUT blob."""
    rng = random.Random(seed)
    res = synthesize("wallace", mult_width, width_b=mult_width)
    mapped = map_to_luts(res.netlist)
    bld = NetlistBuilder()
    pool = bld.add_input_bus("r", 12)
    outs = []
    for j in range(blob_luts):
        start = j % 6
        ins = pool[start:start + 5]
        outs.append(bld.lut(rng.randrange(1, (1 << 32) - 1), ins))
    bld.set_output_bus("t", outs)
    blob = bld.build()
    return merge_netlists([("m_", mapped.netlist), ("b_", blob)])


def run_fill_stress(base: Netlist, filler: Netlist, arch: ArchSpec,
                    lb_budget: int) -> dict:
    """Binary-search the max filler instance count fitting the budget."""
    def attempt(k: int):
        parts = [("base_", base)] + [(f"f{i}_", filler) for i in range(k)]
        net = merge_netlists(parts)
        p = pack(net, arch, PackOptions(unrelated_clustering=True,
                                        lb_budget=lb_budget))
        ok = not p.unplaced and not legality_check(p, arch)
        return ok, p

    ok, placement = attempt(0)
    if not ok:
        raise ValueError("base circuit does not fit the logic-block budget")
    lo, hi = 0, 1
    while attempt(hi)[0]:
        lo, hi = hi, hi * 2
        if hi > 4096:
            break
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if attempt(mid)[0]:
            lo = mid
        else:
            hi = mid
    ok, placement = attempt(lo)
    r = report(placement, None, arch)
    return {"max_instances": lo, "lb_budget": lb_budget,
            "report": r.to_jsonable(),
            "concurrency": concurrency_stats(placement)}


def _random_constants(spec: SweepSpec, width: int) -> list[int]:
    if spec.constants:
        return list(spec.constants)
    rng = random.Random(0xC0FFEE ^ width)
    out = []
    while len(out) < spec.random_constants:
        c = 1 << (spec.constant_bits - 1)
        for b in range(spec.constant_bits - 1):
            if rng.random() > spec.sparsity:
                c |= 1 << b
        if c not in out:
            out.append(c)
    return out


def run_sweep(spec: SweepSpec) -> dict:
    """Full pipeline per cell, seed-averaged; geomeans per algorithm x arch."""
    spec.validate()
    arch_specs = {a: load_arch(a) for a in spec.archs}
    rows = []
    errors = []
    for alg in spec.algorithms:
        for width in spec.widths:
            for const in _random_constants(spec, width):
                try:
                    res = synthesize(alg, width, constant=const,
                                     dedup=spec.dedup)
                    mapped = map_to_luts(res.netlist)
                except Exception as exc:   # record, keep sweeping
                    errors.append({"cell": (alg, width, const),
                                   "error": str(exc)})
                    continue
                st = stats(mapped.netlist)
                for arch_name, arch in arch_specs.items():
                    for seed in range(spec.seeds):
                        p = pack(mapped, arch, PackOptions(seed=seed))
                        if p.unplaced or legality_check(p, arch):
                            errors.append({"cell": (alg, width, const,
                                                    arch_name, seed),
                                           "error": "illegal placement"})
                            continue
                        r = report(p, mapped, arch)
                        rows.append({
                            "arch": arch_name, "algorithm": alg,
                            "width": width, "constant": const, "seed": seed,
                            "full-adders": st.full_adders, "luts": st.luts,
                            "alms": r.alm_count, "lbs": r.lb_count,
                            "area-mwta": round(r.total_area, 4),
                            "critical-path-ps": round(r.critical_path_ps, 4),
                            "adp": round(r.adp, 4),
                            "concurrent-luts":
                                r.concurrency["concurrent_luts"],
                        })
    return {"rows": rows, "summary": summarize_sweep(rows), "errors": errors}


def summarize_sweep(rows: list[dict]) -> list[dict]:
    """Seed-average per cell, then geomean per (algorithm, arch)."""
    cells: dict[tuple, list[dict]] = {}
    for row in rows:
        key = (row["algorithm"], row["arch"], row["width"], row["constant"])
        cells.setdefault(key, []).append(row)
    per_cell = []
    for (alg, arch, width, const), group in sorted(cells.items()):
        per_cell.append((alg, arch, {
            m: sum(r[m] for r in group) / len(group)
            for m in ("alms", "area-mwta", "critical-path-ps", "adp",
                      "full-adders", "concurrent-luts")}))
    agg: dict[tuple, list[dict]] = {}
    for alg, arch, metrics in per_cell:
        agg.setdefault((alg, arch), []).append(metrics)
    out = []
    for (alg, arch), ms in sorted(agg.items()):
        entry = {"algorithm": alg, "arch": arch, "cells": len(ms)}
        for m in ("alms", "area-mwta", "critical-path-ps", "adp"):
            entry[f"geomean-{m}"] = round(math.exp(
                sum(math.log(max(x[m], 1e-9)) for x in ms) / len(ms)), 4)
        out.append(entry)
    return out


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: row.get(k, "") for k in CSV_COLUMNS})
    return buf.getvalue()
