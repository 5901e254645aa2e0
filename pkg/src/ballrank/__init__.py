"""Exact rank computations for countable closed sets in presented Polish spaces."""

from ballrank.ordinal import (
    OMEGA,
    ONE,
    ZERO,
    Ordinal,
    format_ordinal,
    from_int,
    fundamental_seq,
    omega_power,
    ord_add,
    ord_cmp,
    ord_mul,
    ord_succ,
    parse_ordinal,
)

__all__ = [
    "OMEGA",
    "ONE",
    "ZERO",
    "Ordinal",
    "format_ordinal",
    "from_int",
    "fundamental_seq",
    "omega_power",
    "ord_add",
    "ord_cmp",
    "ord_mul",
    "ord_succ",
    "parse_ordinal",
]
