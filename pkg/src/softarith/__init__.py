"""Soft-arithmetic synthesis and logic-block packing toolkit."""

__version__ = "0.1.0"

from .netlist import Netlist, NetlistBuilder, AdderChain, validate, stats  # noqa: F401
from .sim import simulate, exhaustive_outputs, BACKEND  # noqa: F401
