"""JSON (de)serialization of instances and solutions.

Instance document:
    {"n": int, "altruistic": [ids], "edges": [[tail, head], ...],
     "l_p": int, "l_c": int, "t": int}

Solution document:
    {"feasible": bool, "value": int, "algorithm": str,
     "chains": [[root, v1, ...], ...], "cycles": [[v0, v1, ...], ...],
     "stats": {...}}
``chains``/``cycles`` are omitted entirely when no certificate is attached.
"""

from __future__ import annotations

import json
from typing import Any

from .core import Chain, CompatibilityGraph, Cycle, Exchange, Instance
from .errors import ModelError, ParseError
from .result import SolveResult


def _require(doc: dict, key: str, kind: type) -> Any:
    if key not in doc:
        raise ParseError(f"missing key {key!r}")
    val = doc[key]
    if kind is int and (not isinstance(val, int) or isinstance(val, bool)):
        raise ParseError(f"key {key!r} must be an integer, got {val!r}")
    if kind is list and not isinstance(val, list):
        raise ParseError(f"key {key!r} must be an array, got {val!r}")
    return val


def parse_instance(document: bytes | str) -> Instance:
    """Parse and validate an instance document.

    Raises ParseError for malformed documents and ModelError for documents
    that violate model invariants (self-loops, arcs into altruistic ids,
    out-of-range ids).
    """
    try:
        doc = json.loads(document)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top-level value must be an object")
    n = _require(doc, "n", int)
    alt = _require(doc, "altruistic", list)
    edges = _require(doc, "edges", list)
    l_p = _require(doc, "l_p", int)
    l_c = _require(doc, "l_c", int)
    t = _require(doc, "t", int)
    arcs: list[tuple[int, int]] = []
    for i, e in enumerate(edges):
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) for x in e)):
            raise ParseError(f"edges[{i}] must be a [tail, head] pair, got {e!r}")
        arcs.append((e[0], e[1]))
    for i, a in enumerate(alt):
        if not isinstance(a, int):
            raise ParseError(f"altruistic[{i}] must be an integer, got {a!r}")
    graph = CompatibilityGraph(n, alt, arcs)
    return Instance(graph, l_p, l_c, t)


def write_instance(instance: Instance) -> bytes:
    g = instance.graph
    doc = {
        "n": g.n,
        "altruistic": sorted(g.altruistic),
        "edges": [list(a) for a in sorted(g.arcs)],
        "l_p": instance.l_p,
        "l_c": instance.l_c,
        "t": instance.t,
    }
    return (json.dumps(doc, separators=(",", ":")) + "\n").encode()


def write_result(result: SolveResult) -> bytes:
    doc: dict[str, Any] = {
        "feasible": result.feasible,
        "value": result.value,
        "algorithm": result.algorithm,
    }
    if result.exchange is not None:
        doc["chains"] = [list(c.vertices) for c in result.exchange.chains]
        doc["cycles"] = [list(c.vertices) for c in result.exchange.cycles]
    doc["stats"] = result.stats
    return (json.dumps(doc, separators=(",", ":")) + "\n").encode()


def parse_result(document: bytes | str) -> SolveResult:
    """Parse a solution document back into a SolveResult (no validation)."""
    try:
        doc = json.loads(document)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top-level value must be an object")
    feasible = doc.get("feasible")
    if not isinstance(feasible, bool):
        raise ParseError("key 'feasible' must be a boolean")
    value = _require(doc, "value", int)
    algorithm = doc.get("algorithm", "")
    exchange = None
    if "chains" in doc or "cycles" in doc:
        try:
            chains = tuple(Chain(tuple(c)) for c in doc.get("chains", []))
            cycles = tuple(Cycle(tuple(c)) for c in doc.get("cycles", []))
        except (TypeError, ModelError) as exc:
            raise ParseError(f"malformed certificate: {exc}") from exc
        exchange = Exchange(chains, cycles)
    return SolveResult(
        feasible=feasible,
        value=value,
        algorithm=algorithm,
        exchange=exchange,
        stats=doc.get("stats", {}),
    )
