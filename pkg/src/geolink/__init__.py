"""Linking numbers of closed geodesics with CM cycles on the modular curve
of Gamma_1(5), and the analytic pieces of the non-holomorphic completion."""

from .bqf import BQF, FormClass, classes, parse_form, reduce_posdef
from .cycles import ZeroCycle, m_coeff, zero_cycle
from .exact import Mat2, SymT, parse_mat2, parse_symt
from .gamma15 import GeodesicCycle, traverse, winding
from .linking import CycleSet, iota_full, iota_prime, series_table

__version__ = "0.1.0"

__all__ = [
    "BQF", "FormClass", "classes", "parse_form", "reduce_posdef",
    "ZeroCycle", "m_coeff", "zero_cycle",
    "Mat2", "SymT", "parse_mat2", "parse_symt",
    "GeodesicCycle", "traverse", "winding",
    "CycleSet", "iota_full", "iota_prime", "series_table",
]
