import numpy as np

from softarith.sim import exhaustive_outputs


def product_ok(netlist, width, constant=None, width_b=None) -> bool:
    """Exhaustively compare the netlist's product bus to integer multiply."""
    (_, values), = exhaustive_outputs(netlist).items()
    lanes = np.arange(len(values), dtype=np.uint64)
    if constant is not None:
        want = lanes * np.uint64(constant)
    else:
        a = lanes & np.uint64((1 << width) - 1)
        b = lanes >> np.uint64(width)
        want = a * b
    mask = np.uint64((1 << 64) - 1)
    return bool(np.array_equal(values & mask, want & mask))
