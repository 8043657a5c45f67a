import copy

import pytest

from softarith.arch import load_arch
from softarith.lutmap import map_to_luts
from softarith.netlist import NetlistBuilder
from softarith.packer import (AlmSlot, PackOptions, Placement, concurrency_stats,
                              legality_check, pack)
from softarith.reduction import ALGORITHMS, synthesize

BASE = load_arch("baseline")
DD5 = load_arch("dd5")
DD6 = load_arch("dd6")


def _mapped(algorithm="wallace", width=5, constant=0b10111, **kw):
    return map_to_luts(synthesize(algorithm, width, constant=constant,
                                  **kw).netlist)


def _adder_only(n_bits):
    b = NetlistBuilder()
    a = b.add_input_bus("a", n_bits)
    c = b.add_input_bus("b", n_bits)
    sums, cout = b.chain(list(zip(a, c)))
    b.set_output_bus("s", sums + [cout])
    return b.build()


def test_pure_adder_density():
    # 500 chained bits at 2 bits/ALM fill 25 ten-ALM blocks exactly
    p = pack(_adder_only(500), BASE)
    assert p.occupied_alms() == 250
    assert len(p.clusters) == 25
    assert p.unplaced == []
    assert legality_check(p, BASE) == []


def test_rejects_unmapped_gates():
    res = synthesize("wallace", 4, width_b=4)
    with pytest.raises(ValueError):
        pack(res.netlist, BASE)


@pytest.mark.parametrize("arch", [BASE, DD5, DD6], ids=lambda a: a.variant)
@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_legal_everywhere(arch, algorithm):
    for circuit in (_mapped(algorithm),
                    map_to_luts(synthesize(algorithm, 6, width_b=6).netlist)):
        for unrelated in (False, True):
            p = pack(circuit, arch,
                     PackOptions(unrelated_clustering=unrelated))
            assert p.unplaced == []
            assert legality_check(p, arch) == []


def test_dd5_dominates_baseline():
    for algorithm in ALGORITHMS:
        m = _mapped(algorithm, 6, 0b110111)
        assert (pack(m, DD5).occupied_alms()
                <= pack(m, BASE).occupied_alms())


def test_deterministic():
    m = _mapped("dadda", 6, 0b101101)
    a = pack(m, DD5).to_jsonable()
    b = pack(m, DD5).to_jsonable()
    assert a == b


def test_seed_shuffles_but_stays_legal():
    m = _mapped("wallace", 6, 0b111011)
    for seed in (1, 2, 3):
        p = pack(m, DD5, PackOptions(seed=seed))
        assert p.unplaced == []
        assert legality_check(p, DD5) == []


def test_budget_marks_overflow_unplaced():
    net = _adder_only(100)          # needs 5 LBs unconstrained
    p = pack(net, BASE, PackOptions(lb_budget=3))
    assert len(p.clusters) <= 3
    assert p.unplaced          # the chain cannot be split across the budget
    assert legality_check(p, BASE) == []


def test_chain_contiguity():
    p = pack(_adder_only(64), BASE)
    seen = []
    for cluster in p.clusters:
        for slot in cluster.slots:
            if slot.chain is not None:
                seen.extend(slot.positions)
    assert seen == sorted(seen)


def test_stats_partition():
    m = _mapped("wallace", 6, 0b101011)
    for arch in (BASE, DD5):
        p = pack(m, arch)
        s = concurrency_stats(p)
        assert (s["arith_alms"] + s["lut_only_alms"] + s["six_lut_alms"]
                + s["concurrent_alms"] == s["total_alms"] == p.occupied_alms())
        if arch.variant == "baseline":
            assert s["concurrent_alms"] == 0 and s["concurrent_luts"] == 0


def test_baseline_never_uses_z():
    p = pack(_mapped("dadda", 6, 0b110101), BASE)
    for cluster in p.clusters:
        for slot in cluster.slots:
            assert not slot.adder_via_z
            assert not slot.mode.startswith("arith_concurrent")


# -- hand-built violations -------------------------------------------------

def _clone(p):
    return Placement(copy.deepcopy(p.clusters), p.netlist, p.arch_variant,
                     list(p.unplaced))


def test_detects_oversized_cluster():
    p = _clone(pack(_adder_only(64), BASE))
    extra = copy.deepcopy(p.clusters[1].slots[0])
    p.clusters[1].slots = p.clusters[1].slots + [copy.deepcopy(s) for s in
                                                 p.clusters[1].slots]
    diags = legality_check(p, BASE)
    assert any("slot" in d.code or "duplicate" in d.code for d in diags)


def test_detects_missing_element():
    p = _clone(pack(_adder_only(16), BASE))
    p.clusters[0].slots.pop()
    assert any(d.code == "missing" for d in legality_check(p, BASE))


def test_detects_illegal_mode_on_baseline():
    p = _clone(pack(_adder_only(16), BASE))
    slot = p.clusters[0].slots[0]
    slot.mode = "arith_concurrent5"
    slot.adder_via_z = True
    diags = legality_check(p, BASE)
    assert diags


def test_detects_overfull_alm():
    p = _clone(pack(_adder_only(16), BASE))
    slot = p.clusters[0].slots[0]
    donor = p.clusters[0].slots[1]
    slot.adder_nodes = slot.adder_nodes + donor.adder_nodes[:1]
    slot.positions = slot.positions + donor.positions[:1]
    donor.adder_nodes = donor.adder_nodes[1:]
    donor.positions = donor.positions[1:]
    assert legality_check(p, BASE)


def test_detects_broken_contiguity():
    p = _clone(pack(_adder_only(64), BASE))
    c = p.clusters[0]
    c.slots[0], c.slots[2] = c.slots[2], c.slots[0]
    assert any("chain" in d.code for d in legality_check(p, BASE))
