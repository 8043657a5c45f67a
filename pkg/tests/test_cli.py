import json

import pytest

from softarith.cli import main
from softarith.netlist import Netlist, stats


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_synth_emits_netlist_json(tmp_path, capsys):
    out = tmp_path / "net.json"
    code = main(["--out", str(out), "--algorithm", "wallace",
                 "synth", "--width", "4", "--constant", "0b1011"])
    assert code == 0
    net = Netlist.from_json(json.loads(out.read_text()))
    assert stats(net).full_adders > 0


def test_map_then_pack_then_analyze(tmp_path, capsys):
    raw = tmp_path / "raw.json"
    mapped = tmp_path / "mapped.json"
    assert main(["--out", str(raw), "--algorithm", "dadda",
                 "synth", "--width", "5", "--constant", "23"]) == 0
    assert main(["--out", str(mapped), "map", str(raw)]) == 0

    code, out = 0, None
    code = main(["--arch", "dd5", "pack", str(mapped)])
    packed = json.loads(capsys.readouterr().out)
    assert code == 0
    assert packed["diagnostics"] == []
    assert packed["stats"]["total_alms"] > 0

    code = main(["--arch", "dd5", "analyze", str(raw)])
    rep = json.loads(capsys.readouterr().out)
    assert code == 0
    assert rep["critical_path_ps"] > 0
    assert rep["adp"] == pytest.approx(
        rep["total_area_mwta"] * rep["critical_path_ps"])


def test_verify_ok(capsys):
    code, out = run(capsys, "--algorithm", "cascade", "verify",
                    "--width", "4", "--constant", "11")
    assert code == 0
    assert json.loads(out)["ok"] is True


def test_verify_generic(capsys):
    code, out = run(capsys, "--algorithm", "wallace", "verify",
                    "--width", "3", "--width-b", "3")
    assert code == 0


def test_pack_budget_failure_is_nonzero(tmp_path, capsys):
    raw = tmp_path / "raw.json"
    mapped = tmp_path / "mapped.json"
    main(["--out", str(raw), "synth", "--width", "6", "--constant", "0x3ff"])
    main(["--out", str(mapped), "map", str(raw)])
    code = main(["pack", str(mapped), "--lb-budget", "1"])
    capsys.readouterr()
    assert code == 1


def test_bad_arguments_exit_2(capsys):
    code = main(["synth", "--width", "4", "--constant", "-1"])
    capsys.readouterr()
    assert code == 2
    code = main(["map", "/nonexistent/netlist.json"])
    capsys.readouterr()
    assert code == 2


def test_sweep_csv(tmp_path):
    out = tmp_path / "sweep.csv"
    code = main(["--csv", "--out", str(out), "sweep", "--widths", "3",
                 "--constants", "5,9", "--algorithms", "wallace",
                 "--archs", "baseline", "--seeds", "1"])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("arch,algorithm,width,constant,seed")
    assert len(lines) == 3


def test_stress_artificial_small(capsys):
    code, out = run(capsys, "stress-artificial", "--adder-bits", "40",
                    "--max-luts", "20", "--step", "20")
    assert code == 0
    doc = json.loads(out)
    assert set(doc["curves"]) == {"baseline", "dd5"}


def test_stress_fill_small(capsys):
    code, out = run(capsys, "--arch", "dd5", "stress-fill",
                    "--base-bits", "40", "--lb-budget", "6")
    assert code == 0
    doc = json.loads(out)
    assert doc["max_instances"] >= 0


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "arch.json"
    cfg.write_text(json.dumps({"variant": "dd5",
                               "delay": {"carry_per_alm": 30.0}}))
    code, out = run(capsys, "--config", str(cfg), "--algorithm", "wallace",
                    "verify", "--width", "3", "--constant", "5")
    assert code == 0
