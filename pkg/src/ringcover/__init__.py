"""Covering numbers of finite rings: closed forms, a brute-force oracle, explicit covers, and E(N)."""

from .arith import INF, PrimePower, is_prime_power
from .families import ARing, DirectSum, FieldSum, Idealization, MatrixRing, ZeroMult
from .formulas import SigmaReport, classify, sigma_A, sigma_field_sum, sigma_idealization, sigma_matrix, witnesses
from .specparser import format_spec, parse

__all__ = [
    "INF", "PrimePower", "is_prime_power",
    "ARing", "DirectSum", "FieldSum", "Idealization", "MatrixRing", "ZeroMult",
    "SigmaReport", "classify", "sigma_A", "sigma_field_sum", "sigma_idealization", "sigma_matrix", "witnesses",
    "format_spec", "parse",
]
__version__ = "0.1.0"
