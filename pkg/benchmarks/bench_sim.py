"""Compare the compiled and pure simulation backends on exhaustive sweeps.

Run:  python3 benchmarks/bench_sim.py
The pure backend is forced by temporarily detaching the compiled core;
both backends must agree bit-for-bit before times are reported.
"""

import time

from softarith.lutmap import map_to_luts
from softarith.reduction import synthesize
from softarith.sim import BACKEND, compile_program, evaluate
from softarith import sim as _sim


def _run(netlist, pure: bool):
    program = compile_program(netlist)
    n_bits = sum(len(s) for s in netlist.input_buses.values())
    n_lanes = 1 << n_bits
    masks = {}
    pos = 0
    for sigs in netlist.input_buses.values():
        for s in sigs:
            mask = 0
            for lane in range(n_lanes):
                if (lane >> pos) & 1:
                    mask |= 1 << lane
            masks[s] = mask
            pos += 1
    want = sorted({s for sigs in netlist.output_buses.values() for s in sigs})
    saved = _sim._simcore
    if pure:
        _sim._simcore = None
    try:
        evaluate(program, masks, n_lanes, want)     # warm-up
        reps, t0 = 0, time.perf_counter()
        while True:
            out = evaluate(program, masks, n_lanes, want)
            reps += 1
            dt = time.perf_counter() - t0
            if dt > 0.2:
                break
    finally:
        _sim._simcore = saved
    return dt / reps, out


def main():
    cases = [
        ("cascade 8x0b01010101", synthesize("cascade", 8, constant=0b01010101)),
        ("wallace 8x0b11011011", synthesize("wallace", 8, constant=0b11011011)),
        ("dadda 6x6 generic", synthesize("dadda", 6, width_b=6)),
        ("wallace 8x8 generic", synthesize("wallace", 8, width_b=8)),
        ("cascade 12x0xfff", synthesize("cascade", 12, constant=0xFFF)),
    ]
    print(f"default backend: {BACKEND}")
    print(f"{'circuit':<26}{'pure (ms)':>12}{'compiled (ms)':>15}{'speedup':>9}")
    for name, res in cases:
        mapped = map_to_luts(res.netlist).netlist
        t_pure, out_pure = _run(mapped, pure=True)
        t_fast, out_fast = _run(mapped, pure=False)
        assert out_pure == out_fast, f"backend mismatch on {name}"
        speedup = t_pure / t_fast if t_fast else float("inf")
        print(f"{name:<26}{t_pure*1e3:>12.2f}{t_fast*1e3:>15.2f}"
              f"{speedup:>8.1f}x")


if __name__ == "__main__":
    main()
