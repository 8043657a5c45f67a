import pytest

from softarith.analysis import adp, area, critical_path, report
from softarith.arch import load_arch
from softarith.lutmap import map_to_luts
from softarith.netlist import NetlistBuilder
from softarith.packer import PackOptions, Placement, pack
from softarith.reduction import ALGORITHMS, synthesize

BASE = load_arch("baseline")
DD5 = load_arch("dd5")


def _adder(n_bits):
    b = NetlistBuilder()
    a = b.add_input_bus("a", n_bits)
    c = b.add_input_bus("b", n_bits)
    sums, cout = b.chain(list(zip(a, c)))
    b.set_output_bus("s", sums + [cout])
    return b.build()


def _packed(algorithm="wallace", width=5, constant=0b10111, arch=BASE):
    mapped = map_to_luts(synthesize(algorithm, width, constant=constant).netlist)
    return pack(mapped, arch), mapped


def test_area_is_linear_in_alms():
    p, _ = _packed(arch=BASE)
    assert area(p, BASE) == pytest.approx(p.occupied_alms() * 2167.3)
    p5, _ = _packed(arch=DD5)
    per_alm = area(p5, DD5) / p5.occupied_alms()
    assert per_alm == pytest.approx(2167.3 * 1.037515, rel=1e-6)


def test_adp_is_product():
    assert adp(100.0, 3.0) == 300.0


def test_empty_placement():
    empty = Placement([], _adder(2), "baseline")
    ps, steps = critical_path(empty, None, BASE)
    assert (ps, steps) == (0.0, [])
    assert area(empty, BASE) == 0.0


def test_single_alm_adder_entry_baseline():
    # one chain ALM fed directly from the crossbar:
    # lb_in_to_alm_in + alm_in_to_adder_baseline = 72.61 + 133.4
    p = pack(_adder(2), BASE)
    ps, steps = critical_path(p, None, BASE)
    assert ps == pytest.approx(206.01)
    assert sum(c for s in steps for _, c in s.components) == pytest.approx(ps)


def test_z_fed_adder_entry():
    # DD concurrent slot with Z-routed operands:
    # lb_in_to_z + z_to_adder = 77.05 + 68.77
    p = pack(_adder(2), DD5)
    slot = p.clusters[0].slots[0]
    assert slot.adder_via_z
    ps, _ = critical_path(p, None, DD5)
    assert ps == pytest.approx(145.82)


def test_carry_hop_between_alms():
    p = pack(_adder(4), DD5)
    assert p.occupied_alms() == 2
    ps, _ = critical_path(p, None, DD5)
    assert ps == pytest.approx(145.82 + 20.0)


def test_general_entry_slower_on_dd():
    # force the general (non-Z) adder path on DD5 by disabling conversion
    mapped = map_to_luts(synthesize("wallace", 5, constant=0b11011).netlist)
    p_base = pack(mapped, BASE)
    p_dd = pack(mapped, DD5, PackOptions(max_concurrent_luts=1))
    ps_b, _ = critical_path(p_base, mapped, BASE)
    assert ps_b > 0


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_breakdown_sums_to_total(algorithm):
    for arch in (BASE, DD5):
        p, mapped = _packed(algorithm, 6, 0b110101, arch)
        r = report(p, mapped, arch)
        assert sum(c for _, c in r.breakdown()) == pytest.approx(
            r.critical_path_ps)
        assert r.adp == pytest.approx(r.total_area * r.critical_path_ps)
        assert r.alm_count == p.occupied_alms()
        assert r.lb_count == len(p.clusters)


def test_more_lut_levels_cannot_shorten_path():
    shallow = map_to_luts(synthesize("wallace", 4, constant=0b101).netlist)
    deep = map_to_luts(synthesize("wallace", 7, width_b=7).netlist)
    ps_shallow, _ = critical_path(pack(shallow, BASE), shallow, BASE)
    ps_deep, _ = critical_path(pack(deep, BASE), deep, BASE)
    assert ps_deep >= ps_shallow


def test_report_jsonable():
    import json
    p, mapped = _packed()
    doc = report(p, mapped, BASE).to_jsonable()
    json.dumps(doc)
    assert doc["alm_count"] == p.occupied_alms()
