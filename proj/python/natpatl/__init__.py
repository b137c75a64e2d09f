from natpatl._core import (
    Cgs,
    NatPatlError,
    NatStrategy,
    check,
    encode,
    enumerate_strategies,
    estimate_until,
    load_cgs,
    load_strategy,
    parse_cgs,
    parse_formula,
    parse_strategy,
    print_strategy,
)

__all__ = [
    "Cgs",
    "NatPatlError",
    "NatStrategy",
    "check",
    "encode",
    "enumerate_strategies",
    "estimate_until",
    "load_cgs",
    "load_strategy",
    "parse_cgs",
    "parse_formula",
    "parse_strategy",
    "print_strategy",
]
