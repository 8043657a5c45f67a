import math

import numpy as np
import pytest

from softarith.arch import load_arch
from softarith.harness import (CSV_COLUMNS, StressCircuitSpec, SweepSpec,
                               gen_stress_circuit, make_filler, merge_netlists,
                               rows_to_csv, run_artificial_stress,
                               run_fill_stress, run_sweep, summarize_sweep)
from softarith.lutmap import map_to_luts
from softarith.netlist import stats, validate
from softarith.packer import pack
from softarith.reduction import synthesize
from softarith.sim import exhaustive_outputs


def test_stress_circuit_shape():
    net = gen_stress_circuit(StressCircuitSpec(adder_bits=40, lut_count=7))
    s = stats(net)
    assert validate(net) == []
    assert s.full_adders == 40
    assert s.luts == 7
    assert s.chains == 20


def test_stress_spec_validation():
    with pytest.raises(ValueError):
        gen_stress_circuit(StressCircuitSpec(adder_bits=0))
    with pytest.raises(ValueError):
        gen_stress_circuit(StressCircuitSpec(adder_bits=3))
    with pytest.raises(ValueError):
        gen_stress_circuit(StressCircuitSpec(shared_input_pool=3, lut_fanin=5))


def test_stress_default_is_trivial_density():
    net = gen_stress_circuit(StressCircuitSpec(adder_bits=500))
    p = pack(net, load_arch("baseline"))
    assert p.occupied_alms() == 250
    assert len(p.clusters) == 25


def test_artificial_stress_small():
    res = run_artificial_stress(StressCircuitSpec(adder_bits=40),
                                lut_counts=[0, 10, 40])
    for arch in ("baseline", "dd5"):
        curve = res["curves"][arch]
        assert [pt["lut_count"] for pt in curve] == [0, 10, 40]
        assert all(not pt.get("failed") for pt in curve)
    base0 = res["curves"]["baseline"][0]["area_mwta"]
    dd0 = res["curves"]["dd5"][0]["area_mwta"]
    assert dd0 / base0 == pytest.approx(1.037515, rel=1e-4)
    # DD5 absorbs the early LUT load into concurrent slots: flat area
    dd = res["curves"]["dd5"]
    assert dd[1]["area_mwta"] == pytest.approx(dd[0]["area_mwta"])
    assert dd[1]["concurrent_luts"] == 10
    # baseline has nowhere to hide LUTs
    base = res["curves"]["baseline"]
    assert base[1]["area_mwta"] > base[0]["area_mwta"]


def test_merge_preserves_function():
    a = synthesize("wallace", 3, constant=5).netlist
    b = synthesize("dadda", 3, width_b=2).netlist
    merged = merge_netlists([("x_", a), ("y_", b)])
    assert validate(merged) == []
    oa = exhaustive_outputs(a)
    om = {k: v for k, v in exhaustive_outputs(merged).items()}
    # x part occupies the low input bits of the merged lane index
    (bus_a, vals_a), = oa.items()
    n_a = sum(len(s) for s in a.input_buses.values())
    n_m = sum(len(s) for s in merged.input_buses.values())
    got = om["x_" + bus_a]
    for lane in range(1 << n_m):
        assert got[lane] == vals_a[lane & ((1 << n_a) - 1)]


def test_merge_mapped_parts():
    a = map_to_luts(synthesize("wallace", 4, constant=11).netlist).netlist
    merged = merge_netlists([("u_", a), ("v_", a)])
    assert validate(merged) == []
    s = stats(merged)
    assert s.full_adders == 2 * stats(a).full_adders
    assert s.luts == 2 * stats(a).luts


def test_make_filler_deterministic():
    f1 = make_filler(3, mult_width=4, blob_luts=5)
    f2 = make_filler(3, mult_width=4, blob_luts=5)
    assert f1.to_json() == f2.to_json()
    assert validate(f1) == []


def test_fill_stress_dd5_fits_more():
    base = gen_stress_circuit(StressCircuitSpec(adder_bits=60))
    filler = make_filler(0, mult_width=4, blob_luts=8)
    base_lbs = len(pack(base, load_arch("baseline")).clusters)
    budget = base_lbs * 3
    r_base = run_fill_stress(base, filler, load_arch("baseline"), budget)
    r_dd = run_fill_stress(base, filler, load_arch("dd5"), budget)
    assert r_dd["max_instances"] >= r_base["max_instances"]


def test_fill_stress_rejects_impossible_budget():
    base = gen_stress_circuit(StressCircuitSpec(adder_bits=100))
    filler = make_filler(0, mult_width=4, blob_luts=4)
    with pytest.raises(ValueError):
        run_fill_stress(base, filler, load_arch("baseline"), 1)


def _tiny_sweep():
    return SweepSpec(widths=[3], constants=[5, 11], algorithms=["wallace"],
                     archs=["baseline", "dd5"], seeds=2)


def test_sweep_rows_and_csv_determinism():
    r1 = run_sweep(_tiny_sweep())
    r2 = run_sweep(_tiny_sweep())
    assert r1["errors"] == []
    assert rows_to_csv(r1["rows"]) == rows_to_csv(r2["rows"])
    csv_text = rows_to_csv(r1["rows"])
    assert csv_text.splitlines()[0] == ",".join(CSV_COLUMNS)
    # 1 alg x 1 width x 2 constants x 2 archs x 2 seeds
    assert len(r1["rows"]) == 8


def test_sweep_summary_geomean():
    res = run_sweep(_tiny_sweep())
    summary = {(e["algorithm"], e["arch"]): e for e in res["summary"]}
    cells = {}
    for row in res["rows"]:
        key = (row["algorithm"], row["arch"], row["width"], row["constant"])
        cells.setdefault(key, []).append(row["alms"])
    means = {}
    for (alg, arch, _, _), vals in cells.items():
        means.setdefault((alg, arch), []).append(sum(vals) / len(vals))
    for key, ms in means.items():
        want = math.exp(sum(math.log(m) for m in ms) / len(ms))
        assert summary[key]["geomean-alms"] == pytest.approx(want, abs=1e-3)
        assert summary[key]["cells"] == len(ms)


def test_sweep_spec_validation():
    with pytest.raises(ValueError):
        run_sweep(SweepSpec(widths=[]))
    with pytest.raises(ValueError):
        run_sweep(SweepSpec(random_constants=0))


def test_random_constants_are_stable():
    from softarith.harness import _random_constants
    spec = SweepSpec()
    a = _random_constants(spec, 4)
    b = _random_constants(spec, 4)
    assert a == b
    assert all(c >> (spec.constant_bits - 1) == 1 for c in a)
    assert len(set(a)) == len(a) == spec.random_constants
