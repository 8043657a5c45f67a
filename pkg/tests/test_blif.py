import numpy as np
import pytest

from softarith.blif import export_blif, parse_blif
from softarith.lutmap import map_to_luts
from softarith.netlist import NetlistBuilder, validate
from softarith.reduction import synthesize
from softarith.sim import exhaustive_outputs


def test_export_deterministic():
    res = synthesize("wallace", 4, constant=0b1011)
    assert export_blif(res.netlist) == export_blif(res.netlist)


def test_export_contains_model_and_io():
    res = synthesize("cascade", 3, constant=5)
    text = export_blif(res.netlist, model="mul3x5")
    assert ".model mul3x5" in text
    assert ".inputs" in text and ".outputs" in text and ".end" in text


def test_roundtrip_equivalence():
    for alg in ("cascade", "wallace", "dadda"):
        res = synthesize(alg, 4, constant=0b1101)
        mapped = map_to_luts(res.netlist).netlist
        back = parse_blif(export_blif(mapped))
        assert validate(back) == []
        a = exhaustive_outputs(mapped)
        b = exhaustive_outputs(back)
        assert set(a) == set(b)
        for bus in a:
            assert np.array_equal(a[bus], b[bus])


def test_roundtrip_gate_netlist():
    b = NetlistBuilder()
    a = b.add_input_bus("a", 3)
    x = b.gate("MUX2", a[0], a[1], b.gate("NOT", a[2]))
    b.set_output_bus("o", [x])
    net = b.build()
    back = parse_blif(export_blif(net))
    assert np.array_equal(exhaustive_outputs(net)["o"],
                          exhaustive_outputs(back)["o"])


def test_unnamed_output_rejected():
    b = NetlistBuilder()
    b.add_input_bus("a", 1)
    net = b.build()
    net.output_buses[""] = [0]
    with pytest.raises(ValueError):
        export_blif(net)


def test_parse_dont_care_rows():
    text = """.model t
.inputs a[0] a[1] a[2]
.outputs y[0]
.names a[0] a[1] a[2] y[0]
1-- 1
-11 1
.end
"""
    net = parse_blif(text)
    out = exhaustive_outputs(net)["y"]
    for lane, v in enumerate(out):
        a0, a1, a2 = lane & 1, (lane >> 1) & 1, (lane >> 2) & 1
        assert v == (a0 | (a1 & a2))
