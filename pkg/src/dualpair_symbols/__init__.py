"""Character-type symbols for compact dual pairs and their numerical oracles."""

from .pair_catalog import (DualPair, HCParameter, IntegralityError, PairError, kernel_exponents,
                           make_pair, parse_pair)
from .symbol_assembly import SymbolDensity, assemble

__version__ = "0.1.0"

__all__ = ["DualPair", "HCParameter", "IntegralityError", "PairError", "kernel_exponents",
           "make_pair", "parse_pair", "SymbolDensity", "assemble", "__version__"]
