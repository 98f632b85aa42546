"""Clearing solvers for kidney-exchange compatibility digraphs."""

from .core import (
    Chain,
    CompatibilityGraph,
    Cycle,
    Exchange,
    Instance,
    exchange_value,
    underlying_undirected,
    validate_exchange,
)
from .errors import (
    CapacityError,
    InternalError,
    KexError,
    ModelError,
    ParseError,
    PreconditionError,
)
from .generator import gen_random, make_rng, stream_rng
from .result import SolveResult
from .serialize import parse_instance, parse_result, write_instance, write_result

__all__ = [
    "CapacityError",
    "Chain",
    "CompatibilityGraph",
    "Cycle",
    "Exchange",
    "Instance",
    "InternalError",
    "KexError",
    "ModelError",
    "ParseError",
    "PreconditionError",
    "SolveResult",
    "exchange_value",
    "gen_random",
    "make_rng",
    "parse_instance",
    "parse_result",
    "stream_rng",
    "underlying_undirected",
    "validate_exchange",
    "write_instance",
    "write_result",
]
