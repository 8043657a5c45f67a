import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from softarith.lutmap import lut_usage_split, map_to_luts
from softarith.netlist import NetlistBuilder, stats, validate
from softarith.reduction import ALGORITHMS, synthesize
from softarith.sim import exhaustive_outputs

from conftest import product_ok


def _same_function(a, b):
    oa, ob = exhaustive_outputs(a), exhaustive_outputs(b)
    assert set(oa) == set(ob)
    return all(np.array_equal(oa[k], ob[k]) for k in oa)


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_mapping_preserves_function(algorithm):
    res = synthesize(algorithm, 4, constant=0b10110)
    mapped = map_to_luts(res.netlist)
    assert validate(mapped.netlist) == []
    assert _same_function(res.netlist, mapped.netlist)
    assert stats(mapped.netlist).gates == 0


@pytest.mark.parametrize("k", [4, 5, 6])
def test_fanin_bound_respected(k):
    res = synthesize("wallace", 5, width_b=5)
    mapped = map_to_luts(res.netlist, k=k)
    for lut in mapped.luts:
        assert len(set(lut.inputs)) <= k
    assert product_ok(mapped.netlist, 5, width_b=5)


def test_bad_k_rejected():
    res = synthesize("cascade", 3, constant=3)
    with pytest.raises(ValueError):
        map_to_luts(res.netlist, k=3)
    with pytest.raises(ValueError):
        map_to_luts(res.netlist, k=7)


def test_mapping_idempotent():
    res = synthesize("dadda", 4, width_b=4)
    once = map_to_luts(res.netlist)
    twice = map_to_luts(once.netlist)
    assert stats(twice.netlist).luts == stats(once.netlist).luts
    assert _same_function(once.netlist, twice.netlist)


def test_adders_survive_mapping():
    res = synthesize("wallace", 4, width_b=4)
    before = stats(res.netlist)
    after = stats(map_to_luts(res.netlist).netlist)
    assert after.full_adders == before.full_adders
    assert after.half_adders == before.half_adders
    assert after.chains == before.chains


def test_constant_propagation_folds_gates():
    b = NetlistBuilder()
    a = b.add_input_bus("a", 2)
    zero = b.const(0)
    one = b.const(1)
    dead = b.gate("AND2", a[0], zero)       # always 0
    alive = b.gate("AND2", a[0], one)       # wire to a[0]
    x = b.gate("OR2", dead, b.gate("XOR2", alive, a[1]))
    b.set_output_bus("o", [x])
    net = b.build()
    mapped = map_to_luts(net)
    assert _same_function(net, mapped.netlist)
    # the whole cone reduces to a single 2-input LUT
    split = lut_usage_split(mapped)
    assert sum(split["histogram"].values()) == 1
    assert split["histogram"] == {2: 1}


def test_levels_are_consistent():
    res = synthesize("wallace", 6, width_b=6)
    mapped = map_to_luts(res.netlist)
    net = mapped.netlist
    producer = {}
    for nid, node in enumerate(net.nodes):
        for s in node.outputs:
            producer[s] = nid
    for nid, lvl in mapped.lut_levels.items():
        node = net.nodes[nid]
        assert node.kind == "lut"
        pred = [mapped.lut_levels.get(producer.get(s, -1), 0)
                for s in node.inputs]
        assert lvl == max(pred, default=0) + 1


def test_lut_usage_split_empty():
    b = NetlistBuilder()
    b.add_input_bus("a", 1)
    mapped = map_to_luts(b.build())
    assert lut_usage_split(mapped) == {"histogram": {},
                                       "six_lut_fraction": 0.0}


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(ALGORITHMS), st.integers(2, 5),
       st.integers(1, 255), st.sampled_from([4, 5, 6]))
def test_mapping_equivalence_property(algorithm, width, constant, k):
    res = synthesize(algorithm, width, constant=constant)
    mapped = map_to_luts(res.netlist, k=k)
    assert product_ok(mapped.netlist, width, constant=constant)
