"""Partial-product reduction: cascade adder trees and compressor trees.

Three reducers are provided:

* ``cascade_reduce`` — binary adder tree.  Each stage pairs rows using a
  strength-maximizing dynamic program (``best_placement``) and duplicate
  chains (identical operand signals by position) are instantiated once and
  fanned out.  A ``baseline`` mode emulates an unoptimized flow: adjacent
  pairing with every chain spanning the full product width and no sharing.
* ``wallace_reduce`` — column-wise full/half-adder compression, carries
  deposited into the next column before it is grouped within the same stage.
* ``dadda_reduce`` — classic height-schedule compression (2, 3, 4, 6, 9, ...)
  using the minimum number of compressors per stage.

Compressors are emitted as AND/XOR/OR gate logic so the LUT mapper can
absorb them; only the final two rows are summed with a real adder chain.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional

from .netlist import AdderChain, Netlist, NetlistBuilder, Node
from .ppgen import PartialProductMatrix, Row, generate_generic, generate_unrolled

DEFAULT_DP_ROW_CAP = 24
DEFAULT_EXACT_ROWS = 12

ALGORITHMS = ("cascade", "wallace", "dadda")


@dataclass
class ChainInsertion:
    rows: tuple[int, int]          # indices into the stage's row list
    length: int                    # full adders instantiated (0 when deduped)
    deduped: bool = False


@dataclass
class CompressorInsertion:
    column: int
    kind: str                      # "FA" | "HA"


@dataclass
class Stage:
    insertions: list = field(default_factory=list)
    strength: Optional[float] = None


@dataclass
class ReductionPlan:
    algorithm: str
    stages: list[Stage] = field(default_factory=list)
    final_chain_length: int = 0

    def to_jsonable(self) -> dict:
        stages = []
        for st in self.stages:
            ins = []
            for item in st.insertions:
                if isinstance(item, ChainInsertion):
                    ins.append({"chain": list(item.rows), "length": item.length,
                                "deduped": item.deduped})
                else:
                    ins.append({"compressor": item.kind, "column": item.column})
            stages.append({"insertions": ins, "strength": st.strength})
        return {"algorithm": self.algorithm, "stages": stages,
                "final_chain_length": self.final_chain_length}


@dataclass
class PlacementSolution:
    pairs: list[tuple[int, int]]   # row-index pairs, each sorted
    included_inputs: int           # operand signals, counted by position
    outputs: int                   # chain positions, unique by chain
    signatures: frozenset

    @property
    def strength(self) -> Fraction:
        return Fraction(self.included_inputs, self.outputs)


def _bit_at(row: Row, pos: int) -> Optional[int]:
    """Signal at absolute weight `pos`, or None outside the row."""
    i = pos - row.shift
    if 0 <= i < len(row.bits):
        return row.bits[i]
    return None


def chain_signature(row_a: Row, row_b: Row) -> tuple:
    """Canonical operand list of the chain summing two rows.

    Two chains with equal signatures compute identical sums and can share
    one instantiation.
    """
    align = max(row_a.shift, row_b.shift)
    top = max(row_a.end(), row_b.end())
    pairs = []
    for p in range(align, top):
        a, b = _bit_at(row_a, p), _bit_at(row_b, p)
        pairs.append((a, b) if (b is None or (a is not None and a <= b)) else (b, a))
    return tuple(pairs)


def _chain_io_counts(row_a: Row, row_b: Row) -> tuple[int, int]:
    """(included input signals by position, output positions) of the chain."""
    align = max(row_a.shift, row_b.shift)
    top = max(row_a.end(), row_b.end())
    inputs = sum(1 for p in range(align, top)
                 for bit in (_bit_at(row_a, p), _bit_at(row_b, p)) if bit is not None)
    return inputs, top - align


def best_placement(rows: list[Row], cache: Optional[dict] = None,
                   row_cap: int = DEFAULT_DP_ROW_CAP,
                   exact_rows: int = DEFAULT_EXACT_ROWS) -> PlacementSolution:
    """Strength-maximizing row pairing for one reduction stage.

    Even row counts pair every row; odd counts leave one row unpaired for
    the next stage.  Up to `exact_rows` rows every matching is enumerated
    with full dedup accounting (the sharing credit couples subproblems, so
    a subset DP alone can miss the optimum); between `exact_rows` and
    `row_cap` a memoized subset DP approximates, and above `row_cap` the
    search falls back to adjacent pairing.  Ties are broken by the
    lexicographically smallest row-index pairing.
    """
    n = len(rows)
    if n < 2:
        raise ValueError("need at least two rows to place chains")
    if n > row_cap:
        return _adjacent_solution(rows)
    if n <= exact_rows:
        return _exact_placement(rows)
    return _dp_placement(rows, cache if cache is not None else {})


def _exact_placement(rows: list[Row]) -> PlacementSolution:
    stats_cache: dict[tuple, tuple] = {}

    def chain_stats(i: int, j: int):
        key = (i, j)
        if key not in stats_cache:
            sig = chain_signature(rows[i], rows[j])
            stats_cache[key] = (sig,) + _chain_io_counts(rows[i], rows[j])
        return stats_cache[key]

    best: Optional[PlacementSolution] = None

    def search(remaining: tuple, pairs: list, sigs: set,
               inputs: int, outputs: int):
        nonlocal best
        if len(remaining) < 2:
            if best is None or Fraction(inputs, outputs) > best.strength:
                best = PlacementSolution(list(pairs), inputs, outputs,
                                         frozenset(sigs))
            return
        first, rest = remaining[0], remaining[1:]
        for k, j in enumerate(rest):
            sig, ins, outs = chain_stats(first, j)
            fresh = sig not in sigs
            pairs.append((first, j))
            if fresh:
                sigs.add(sig)
            search(rest[:k] + rest[k + 1:], pairs, sigs,
                   inputs + ins, outputs + (outs if fresh else 0))
            pairs.pop()
            if fresh:
                sigs.discard(sig)

    n = len(rows)
    if n % 2 == 0:
        search(tuple(range(n)), [], set(), 0, 0)
    else:
        for skip in range(n):
            search(tuple(x for x in range(n) if x != skip), [], set(), 0, 0)
    return best


def _dp_placement(rows: list[Row], cache: dict) -> PlacementSolution:
    n = len(rows)

    def chain_stats(i: int, j: int):
        sig = chain_signature(rows[i], rows[j])
        inputs, outputs = _chain_io_counts(rows[i], rows[j])
        return sig, inputs, outputs

    def solve(idx: frozenset) -> PlacementSolution:
        if idx in cache:
            return cache[idx]
        members = sorted(idx)
        n_sub = len(members)
        best: Optional[PlacementSolution] = None
        if n_sub == 2:
            i, j = members
            sig, inputs, outputs = chain_stats(i, j)
            best = PlacementSolution([(i, j)], inputs, outputs, frozenset([sig]))
        elif n_sub % 2 == 0:
            for i, j in combinations(members, 2):
                sub = solve(idx - {i, j})
                sig, inputs, outputs = chain_stats(i, j)
                total_i = sub.included_inputs + inputs
                total_o = sub.outputs + (0 if sig in sub.signatures else outputs)
                if best is None or Fraction(total_i, total_o) > best.strength:
                    best = PlacementSolution(sub.pairs + [(i, j)], total_i, total_o,
                                             sub.signatures | {sig})
        else:
            for r in members:
                sub = solve(idx - {r})
                if best is None or sub.strength > best.strength:
                    best = sub
        cache[idx] = best
        return best

    return solve(frozenset(range(n)))


def _adjacent_solution(rows: list[Row]) -> PlacementSolution:
    pairs = [(i, i + 1) for i in range(0, len(rows) - 1, 2)]
    total_i = total_o = 0
    sigs = set()
    for i, j in pairs:
        sig = chain_signature(rows[i], rows[j])
        inputs, outputs = _chain_io_counts(rows[i], rows[j])
        total_i += inputs
        if sig not in sigs:
            total_o += outputs
        sigs.add(sig)
    return PlacementSolution(pairs, total_i, max(total_o, 1), frozenset(sigs))


def brute_force_placement(rows: list[Row]) -> Fraction:
    """Exhaustive maximum stage strength over all pairings (oracle)."""
    members = tuple(range(len(rows)))

    def all_pairings(idx: tuple):
        if len(idx) <= 1:
            yield []
            return
        first = idx[0]
        for k in range(1, len(idx)):
            rest = idx[1:k] + idx[k + 1:]
            for tail in all_pairings(rest):
                yield [(first, idx[k])] + tail

    def strength_of(pairs) -> Fraction:
        total_i = total_o = 0
        sigs = set()
        for i, j in pairs:
            sig = chain_signature(rows[i], rows[j])
            inputs, outputs = _chain_io_counts(rows[i], rows[j])
            total_i += inputs
            if sig not in sigs:
                total_o += outputs
            sigs.add(sig)
        return Fraction(total_i, total_o)

    best = None
    pools = [members] if len(members) % 2 == 0 else [
        members[:k] + members[k + 1:] for k in range(len(members))]
    for pool in pools:
        for pairs in all_pairings(pool):
            h = strength_of(pairs)
            if best is None or h > best:
                best = h
    return best


# -- chain construction ---------------------------------------------------

def _build_pair_chain(builder: NetlistBuilder, row_a: Row, row_b: Row,
                      cache: Optional[dict], full_width: Optional[int] = None
                      ) -> tuple[Row, int, bool]:
    """Sum two rows with one adder chain; returns (result row, FAs added, deduped).

    With `full_width` set (baseline emulation) the chain spans positions
    0..full_width-1 regardless of row extents and no sharing is attempted.
    """
    zero = builder.const(0)
    if full_width is not None:
        lo, align, top = 0, 0, full_width
    else:
        lo = min(row_a.shift, row_b.shift)
        align = max(row_a.shift, row_b.shift)
        top = max(row_a.end(), row_b.end())

    sig = chain_signature(row_a, row_b) if cache is not None else None
    if sig is not None and sig in cache:
        sums, cout = cache[sig]
        deduped, added = True, 0
    else:
        pairs = []
        for p in range(align, top):
            a = _bit_at(row_a, p)
            b = _bit_at(row_b, p)
            pairs.append((a if a is not None else zero, b if b is not None else zero))
        sums, cout = builder.chain(pairs)
        deduped, added = False, len(pairs)
        if sig is not None:
            cache[sig] = (sums, cout)

    low = []
    for p in range(lo, align):
        a = _bit_at(row_a, p)
        b = _bit_at(row_b, p)
        low.append(a if a is not None else (b if b is not None else zero))
    bits = low + list(sums)
    if full_width is None:
        bits.append(cout)
    return Row(shift=lo, bits=bits), added, deduped


def _assemble_product(builder: NetlistBuilder, row: Optional[Row], width: int,
                      bus: str = "p"):
    zero = builder.const(0)
    bits = []
    for w in range(width):
        bit = _bit_at(row, w) if row is not None else None
        bits.append(bit if bit is not None else zero)
    builder.set_output_bus(bus, bits)


# -- cascade --------------------------------------------------------------

def cascade_reduce(builder: NetlistBuilder, ppm: PartialProductMatrix,
                   dedup: bool = True, baseline: bool = False,
                   row_cap: int = DEFAULT_DP_ROW_CAP,
                   product_bus: str = "p") -> ReductionPlan:
    """Binary adder tree; finishes by driving the product bus."""
    plan = ReductionPlan("cascade")
    rows = list(ppm.rows)
    width = ppm.product_width()
    chain_cache: Optional[dict] = {} if (dedup and not baseline) else None
    dp_cache: dict = {}
    while len(rows) > 1:
        stage = Stage()
        if baseline:
            sol = _adjacent_solution(rows)
        else:
            sol = best_placement(rows, cache=dp_cache, row_cap=row_cap)
        stage.strength = float(sol.strength)
        paired = set()
        next_rows = []
        for i, j in sol.pairs:
            result, added, deduped = _build_pair_chain(
                builder, rows[i], rows[j], chain_cache,
                full_width=width if baseline else None)
            stage.insertions.append(ChainInsertion((i, j), added, deduped))
            next_rows.append(result)
            paired.update((i, j))
        next_rows.extend(rows[k] for k in range(len(rows)) if k not in paired)
        plan.stages.append(stage)
        rows = next_rows
        dp_cache = {}
    _assemble_product(builder, rows[0] if rows else None, width, product_bus)
    return plan


# -- compressor trees -----------------------------------------------------

def _fa_gates(builder, a, b, c):
    # sum and carry cones kept disjoint (majority form) so each maps to
    # one LUT instead of sharing a multi-fanout intermediate
    s = builder.gate("XOR2", builder.gate("XOR2", a, b), c)
    co = builder.gate("OR2",
                      builder.gate("OR2", builder.gate("AND2", a, b),
                                   builder.gate("AND2", a, c)),
                      builder.gate("AND2", b, c))
    return s, co


def _ha_gates(builder, a, b):
    return builder.gate("XOR2", a, b), builder.gate("AND2", a, b)


def _columns_of(ppm: PartialProductMatrix) -> dict[int, list[int]]:
    cols: dict[int, list[int]] = {}
    for row in ppm.rows:
        for i, bit in enumerate(row.bits):
            cols.setdefault(row.shift + i, []).append(bit)
    return cols


def _final_chain(builder: NetlistBuilder, cols: dict[int, list[int]],
                 plan: ReductionPlan, width: int, product_bus: str):
    """Sum the remaining <=2-high columns with a single adder chain."""
    zero = builder.const(0)
    occupied = sorted(w for w, bits in cols.items() if bits)
    doubles = [w for w in occupied if len(cols[w]) >= 2]
    result: dict[int, int] = {}
    for w in occupied:
        result[w] = cols[w][0]
    if doubles:
        lo2 = min(doubles)
        top = max(occupied)
        pairs = []
        for p in range(lo2, top + 1):
            bits = cols.get(p, [])
            a = bits[0] if len(bits) >= 1 else zero
            b = bits[1] if len(bits) >= 2 else zero
            pairs.append((a, b))
        sums, cout = builder.chain(pairs)
        for k, p in enumerate(range(lo2, top + 1)):
            result[p] = sums[k]
        result[top + 1] = cout
        plan.final_chain_length = len(pairs)
    bits = [result.get(w, zero) for w in range(width)]
    builder.set_output_bus(product_bus, bits)


def wallace_reduce(builder: NetlistBuilder, ppm: PartialProductMatrix,
                   product_bus: str = "p") -> ReductionPlan:
    """Column compression, carries forwarded within the stage."""
    plan = ReductionPlan("wallace")
    cols = _columns_of(ppm)
    while cols and max(len(b) for b in cols.values()) > 2:
        stage = Stage()
        pending = {w: list(bits) for w, bits in cols.items()}
        done: dict[int, list[int]] = {}
        w = min(pending) - 1
        while any(x > w for x in pending):
            w += 1
            bits = pending.get(w, [])
            if len(bits) < 3:
                done.setdefault(w, []).extend(bits)
                continue
            n_fa, rem = divmod(len(bits), 3)
            for g in range(n_fa):
                s, co = _fa_gates(builder, *bits[3 * g: 3 * g + 3])
                done.setdefault(w, []).append(s)
                pending.setdefault(w + 1, []).append(co)
                stage.insertions.append(CompressorInsertion(w, "FA"))
            tail = bits[3 * n_fa:]
            # a half adder in the topmost column would only push a carry
            # into a fresh column and stretch the final chain; leave the
            # two bits for the chain instead
            top = not any(x > w for x in pending)
            if rem == 2 and not top:
                s, co = _ha_gates(builder, *tail)
                done.setdefault(w, []).append(s)
                pending.setdefault(w + 1, []).append(co)
                stage.insertions.append(CompressorInsertion(w, "HA"))
            elif rem == 2:
                done.setdefault(w, []).extend(tail)
            elif rem == 1:
                done.setdefault(w, []).append(tail[0])
        plan.stages.append(stage)
        cols = done
    _final_chain(builder, cols, plan, ppm.product_width(), product_bus)
    return plan


def dadda_heights(limit: int) -> list[int]:
    """Height schedule 2, 3, 4, 6, 9, ... up to (and past) `limit`."""
    seq = [2]
    while seq[-1] < limit:
        seq.append(seq[-1] * 3 // 2)
    return seq


def dadda_reduce(builder: NetlistBuilder, ppm: PartialProductMatrix,
                 product_bus: str = "p") -> ReductionPlan:
    """Classic height-schedule compression with minimal compressor count."""
    plan = ReductionPlan("dadda")
    cols = _columns_of(ppm)
    max_h = max((len(b) for b in cols.values()), default=0)
    targets = [d for d in reversed(dadda_heights(max(max_h - 1, 2))) if d < max_h]
    for target in targets:
        stage = Stage()
        w = min(cols, default=0) - 1
        while any(x > w for x in cols):
            w += 1
            bits = cols.setdefault(w, [])
            while len(bits) > target:
                if len(bits) == target + 1:
                    s, co = _ha_gates(builder, bits.pop(0), bits.pop(0))
                    stage.insertions.append(CompressorInsertion(w, "HA"))
                else:
                    s, co = _fa_gates(builder, bits.pop(0), bits.pop(0), bits.pop(0))
                    stage.insertions.append(CompressorInsertion(w, "FA"))
                bits.append(s)
                cols.setdefault(w + 1, []).append(co)
        plan.stages.append(stage)
    _final_chain(builder, cols, plan, ppm.product_width(), product_bus)
    return plan


# -- standalone chain dedup ----------------------------------------------

def dedup_chains(netlist: Netlist) -> Netlist:
    """Merge chains with positionally identical operands and equal cin0."""
    def signature(chain):
        pairs = []
        for mid in chain.members:
            a, b, _ = netlist.nodes[mid].inputs
            pairs.append((a, b) if a <= b else (b, a))
        return (chain.cin0, tuple(pairs))

    remap: dict[int, int] = {}
    keep: dict[tuple, int] = {}
    dead_nodes: set[int] = set()
    chains = []
    for chain in netlist.chains:
        sig = signature(chain)
        if sig in keep:
            rep = netlist.chains[keep[sig]]
            for dup_mid, rep_mid in zip(chain.members, rep.members):
                dup_node, rep_node = netlist.nodes[dup_mid], netlist.nodes[rep_mid]
                remap[dup_node.outputs[0]] = rep_node.outputs[0]
                remap[dup_node.outputs[1]] = rep_node.outputs[1]
                dead_nodes.add(dup_mid)
        else:
            keep[sig] = len(chains)
            chains.append(AdderChain(list(chain.members), chain.cin0))
    if not dead_nodes:
        return netlist

    def resolve(s: int) -> int:
        while s in remap:
            s = remap[s]
        return s

    new_nodes = []
    old_to_new: dict[int, int] = {}
    for nid, node in enumerate(netlist.nodes):
        if nid in dead_nodes:
            continue
        old_to_new[nid] = len(new_nodes)
        new_nodes.append(Node(
            kind=node.kind,
            inputs=[resolve(s) for s in node.inputs],
            outputs=list(node.outputs),
            op=node.op, name=node.name, bit=node.bit,
            value=node.value, ttable=node.ttable))
    for chain in chains:
        chain.members = [old_to_new[m] for m in chain.members]
        chain.cin0 = resolve(chain.cin0)
    outputs = {bus: [resolve(s) for s in sigs]
               for bus, sigs in netlist.output_buses.items()}
    return Netlist(new_nodes, chains, dict(netlist.input_buses), outputs,
                   netlist.n_signals)


# -- one-call synthesis ---------------------------------------------------

@dataclass
class SynthResult:
    netlist: Netlist
    plan: ReductionPlan
    ppm: PartialProductMatrix


def final_chain_fa_count(netlist: Netlist) -> int:
    """Two-operand members of the last chain; zero-padded tail bits excluded."""
    if not netlist.chains:
        return 0
    consts = {s for n in netlist.nodes if n.kind == "const"
              for s in n.outputs}
    chain = netlist.chains[-1]
    return sum(1 for nid in chain.members
               if all(s not in consts
                      for s in netlist.nodes[nid].inputs[:2]))


def synthesize(algorithm: str, width: int, constant: Optional[int] = None,
               width_b: Optional[int] = None, dedup: bool = True,
               baseline: bool = False,
               row_cap: int = DEFAULT_DP_ROW_CAP) -> SynthResult:
    """Build a multiplier netlist end to end.

    Exactly one of `constant` (unrolled) or `width_b` (generic) must be set.
    """
    if (constant is None) == (width_b is None):
        raise ValueError("specify exactly one of constant= or width_b=")
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    builder = NetlistBuilder()
    if constant is not None:
        ppm = generate_unrolled(builder, width, constant)
    else:
        ppm = generate_generic(builder, width, width_b)
    if algorithm == "cascade":
        plan = cascade_reduce(builder, ppm, dedup=dedup, baseline=baseline,
                              row_cap=row_cap)
    elif algorithm == "wallace":
        plan = wallace_reduce(builder, ppm)
    else:
        plan = dadda_reduce(builder, ppm)
    return SynthResult(builder.build(), plan, ppm)
