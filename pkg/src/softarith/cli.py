"""Command-line front end: synthesis, mapping, packing, analysis, stress."""

from __future__ import annotations

import argparse
import json
import sys

from .arch import ArchError, load_arch, load_arch_file
from .harness import (StressCircuitSpec, SweepSpec, gen_stress_circuit,
                      make_filler, rows_to_csv, run_artificial_stress,
                      run_fill_stress, run_sweep)
from .lutmap import map_to_luts
from .netlist import Netlist, stats, validate
from .packer import PackOptions, concurrency_stats, legality_check, pack
from .analysis import report
from .reduction import synthesize
from .sim import exhaustive_outputs


def _load_netlist(path: str) -> Netlist:
    with open(path) as fh:
        return Netlist.from_json(json.load(fh))


def _emit(doc, args) -> None:
    if getattr(args, "csv", False) and "rows" in doc:
        text = rows_to_csv(doc["rows"])
    else:
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _arch_for(args):
    if args.config:
        return load_arch_file(args.config, args.arch)
    return load_arch(args.arch)


def _synth_result(args):
    return synthesize(args.algorithm, args.width, constant=args.constant,
                      width_b=args.width_b, dedup=not args.no_dedup,
                      baseline=args.baseline_chains)


def cmd_synth(args) -> int:
    res = _synth_result(args)
    _emit(res.netlist.to_json(), args)
    return 0


def cmd_map(args) -> int:
    net = _load_netlist(args.netlist)
    mapped = map_to_luts(net, k=args.k)
    _emit(mapped.netlist.to_json(), args)
    return 0


def cmd_pack(args) -> int:
    net = _load_netlist(args.netlist)
    arch = _arch_for(args)
    placement = pack(net, arch, PackOptions(
        unrelated_clustering=args.unrelated, lb_budget=args.lb_budget,
        seed=args.seed))
    diags = legality_check(placement, arch)
    doc = placement.to_jsonable()
    doc["stats"] = concurrency_stats(placement)
    doc["diagnostics"] = [str(d) for d in diags]
    _emit(doc, args)
    return 1 if diags or placement.unplaced else 0


def cmd_analyze(args) -> int:
    net = _load_netlist(args.netlist)
    arch = _arch_for(args)
    mapped = map_to_luts(net)
    placement = pack(mapped, arch, PackOptions(
        unrelated_clustering=args.unrelated, seed=args.seed))
    diags = legality_check(placement, arch)
    doc = report(placement, mapped, arch).to_jsonable()
    doc["diagnostics"] = [str(d) for d in diags]
    _emit(doc, args)
    return 1 if diags or placement.unplaced else 0


def cmd_verify(args) -> int:
    res = _synth_result(args)
    problems = [str(d) for d in validate(res.netlist)]
    mapped = map_to_luts(res.netlist)
    problems += [str(d) for d in validate(mapped.netlist)]
    outs = exhaustive_outputs(mapped.netlist)
    (_, values), = outs.items()
    wa = args.width
    for lane, got in enumerate(values):
        if args.constant is not None:
            want = lane * args.constant
        else:
            want = (lane & ((1 << wa) - 1)) * (lane >> wa)
        if got != want:
            problems.append(f"mismatch at input {lane}: {got} != {want}")
            break
    arch = _arch_for(args)
    placement = pack(mapped, arch, PackOptions(seed=args.seed))
    problems += [str(d) for d in legality_check(placement, arch)]
    st = stats(mapped.netlist)
    _emit({"ok": not problems, "problems": problems,
           "full_adders": st.full_adders, "luts": st.luts,
           "alms": placement.occupied_alms()}, args)
    return 1 if problems else 0


def cmd_stress_artificial(args) -> int:
    spec = StressCircuitSpec(adder_bits=args.adder_bits,
                             shared_input_pool=args.pool, seed=args.seed)
    counts = list(range(0, args.max_luts + 1, args.step))
    out = run_artificial_stress(spec, archs=args.archs.split(","),
                                lut_counts=counts)
    _emit(out, args)
    return 0


def cmd_stress_fill(args) -> int:
    base = gen_stress_circuit(StressCircuitSpec(
        adder_bits=args.base_bits, seed=args.seed))
    filler = make_filler(args.seed)
    arch = _arch_for(args)
    baseline = load_arch("baseline")
    base_lbs = len(pack(base, baseline,
                        PackOptions(unrelated_clustering=True)).clusters)
    budget = args.lb_budget or base_lbs * args.budget_factor
    out = run_fill_stress(base, filler, arch, budget)
    _emit(out, args)
    return 0


def cmd_sweep(args) -> int:
    spec = SweepSpec(seeds=args.seeds, dedup=not args.no_dedup)
    if args.widths:
        spec.widths = [int(w) for w in args.widths.split(",")]
    if args.constants:
        spec.constants = [int(c, 0) for c in args.constants.split(",")]
    if args.algorithms:
        spec.algorithms = args.algorithms.split(",")
    if args.archs:
        spec.archs = args.archs.split(",")
    out = run_sweep(spec)
    _emit(out, args)
    return 1 if out["errors"] else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="softarith",
                                 description=__doc__)
    ap.add_argument("--arch", default="baseline",
                    choices=["baseline", "dd5", "dd6"])
    ap.add_argument("--algorithm", default="cascade",
                    choices=["cascade", "wallace", "dadda"])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--config", help="architecture JSON file")
    ap.add_argument("--out", help="write output here instead of stdout")
    ap.add_argument("--csv", action="store_true",
                    help="emit CSV rows where applicable")
    sub = ap.add_subparsers(dest="command", required=True)

    def synth_opts(p):
        p.add_argument("--width", type=int, required=True)
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--constant", type=lambda s: int(s, 0))
        g.add_argument("--width-b", type=int)
        p.add_argument("--no-dedup", action="store_true")
        p.add_argument("--baseline-chains", action="store_true",
                       help="full-width chains, no sharing")

    p = sub.add_parser("synth", help="emit a multiplier netlist as JSON")
    synth_opts(p)
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("map", help="LUT-map a netlist JSON")
    p.add_argument("netlist")
    p.add_argument("-k", type=int, default=6, choices=[4, 5, 6])
    p.set_defaults(fn=cmd_map)

    p = sub.add_parser("pack", help="cluster a mapped netlist into LBs")
    p.add_argument("netlist")
    p.add_argument("--unrelated", action="store_true")
    p.add_argument("--lb-budget", type=int)
    p.set_defaults(fn=cmd_pack)

    p = sub.add_parser("analyze", help="map, pack, and report area/delay")
    p.add_argument("netlist")
    p.add_argument("--unrelated", action="store_true")
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("verify",
                       help="synthesize and check equivalence + legality")
    synth_opts(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("stress-artificial", help="packing stress curves")
    p.add_argument("--adder-bits", type=int, default=500)
    p.add_argument("--max-luts", type=int, default=500)
    p.add_argument("--step", type=int, default=25)
    p.add_argument("--pool", type=int, default=12)
    p.add_argument("--archs", default="baseline,dd5")
    p.set_defaults(fn=cmd_stress_artificial)

    p = sub.add_parser("stress-fill", help="max filler instances in a budget")
    p.add_argument("--base-bits", type=int, default=200)
    p.add_argument("--lb-budget", type=int)
    p.add_argument("--budget-factor", type=int, default=3)
    p.set_defaults(fn=cmd_stress_fill)

    p = sub.add_parser("sweep", help="seed-averaged algorithm/arch sweep")
    p.add_argument("--widths")
    p.add_argument("--constants")
    p.add_argument("--algorithms")
    p.add_argument("--archs")
    p.add_argument("--seeds", type=int, default=3)
    p.add_argument("--no-dedup", action="store_true")
    p.set_defaults(fn=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ArchError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
