"""Exhaustive exact solver: the correctness reference for every other algorithm.

Enumerates every feasible chain and cycle, then finds a maximum disjoint
packing by branch and bound. Trades speed for trust; practical to n ~ 12.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .core import Chain, Cycle, Exchange, Instance, exchange_value, validate_exchange
from .errors import CapacityError, InternalError
from .result import SolveResult

DEFAULT_UNIT_CAP = 10**6


@dataclass(frozen=True)
class UnitCatalog:
    """Every feasible unit of an instance, each exactly once.

    Chains carry 1..l_p edges and are rooted in the altruistic set; cycles
    carry 2..l_c edges and are stored in canonical rotation. ``masks[i]``
    is the covered-vertex bitmask of ``units[i]``.
    """

    units: tuple[Chain | Cycle, ...]
    masks: tuple[int, ...]


def enumerate_units(instance: Instance, cap: int = DEFAULT_UNIT_CAP) -> UnitCatalog:
    """Exhaustive, duplicate-free unit enumeration.

    Raises CapacityError when more than ``cap`` units exist.
    """
    g = instance.graph
    units: list[Chain | Cycle] = []

    def emit(u: Chain | Cycle) -> None:
        if len(units) >= cap:
            raise CapacityError(f"unit count exceeds cap {cap}")
        units.append(u)

    # Chains: DFS from each altruistic root; every prefix with >= 1 edge is a unit.
    def extend_chain(path: list[int], on_path: set[int]) -> None:
        if len(path) >= 2:
            emit(Chain(tuple(path)))
        if len(path) - 1 >= instance.l_p:
            return
        for w in g.out_adj[path[-1]]:
            if w not in on_path:
                path.append(w)
                on_path.add(w)
                extend_chain(path, on_path)
                on_path.remove(w)
                path.pop()

    if instance.l_p >= 1:
        for b in sorted(g.altruistic):
            extend_chain([b], {b})

    # Cycles: anchor each cycle at its minimum vertex so it is found once.
    def extend_cycle(anchor: int, path: list[int], on_path: set[int]) -> None:
        u = path[-1]
        if len(path) >= 2 and g.has_arc(u, anchor):
            emit(Cycle(tuple(path)))
        if len(path) >= instance.l_c:
            return
        for w in g.out_adj[u]:
            if w > anchor and w not in on_path:
                path.append(w)
                on_path.add(w)
                extend_cycle(anchor, path, on_path)
                on_path.remove(w)
                path.pop()

    if instance.l_c >= 2:
        for s in range(g.n):
            if s not in g.altruistic:
                extend_cycle(s, [s], {s})

    masks = []
    for u in units:
        m = 0
        for v in u.vertices:
            m |= 1 << v
        masks.append(m)
    return UnitCatalog(tuple(units), tuple(masks))


def max_disjoint_cover(catalog: UnitCatalog, instance: Instance) -> tuple[int, Exchange]:
    """Maximum patients covered by any disjoint subset of the catalog.

    Depth-first branch and bound over units ordered by decreasing covered
    count, bounding by the remaining-unit coverage sum. Ties are broken by
    the lexicographically smallest selected unit-index set, so results are
    deterministic.
    """
    order = sorted(range(len(catalog.units)), key=lambda i: (-catalog.units[i].covered, i))
    covered = [catalog.units[i].covered for i in order]
    masks = [catalog.masks[i] for i in order]
    suffix = [0] * (len(order) + 1)
    for i in range(len(order) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + covered[i]

    best_value = 0
    best_sel: tuple[int, ...] = ()

    def consider(value: int, chosen: list[int]) -> None:
        nonlocal best_value, best_sel
        sel = tuple(sorted(chosen))
        if value > best_value or (value == best_value and sel < best_sel):
            best_value = value
            best_sel = sel

    def search(i: int, used: int, value: int, chosen: list[int]) -> None:
        if value + suffix[i] < best_value:
            return
        if i == len(order):
            consider(value, chosen)
            return
        if not masks[i] & used:
            chosen.append(order[i])
            search(i + 1, used | masks[i], value + covered[i], chosen)
            chosen.pop()
        search(i + 1, used, value, chosen)

    consider(0, [])
    search(0, 0, 0, [])

    chains = tuple(u for i in best_sel if isinstance(u := catalog.units[i], Chain))
    cycles = tuple(u for i in best_sel if isinstance(u := catalog.units[i], Cycle))
    return best_value, Exchange(chains, cycles)


def solve_exact(instance: Instance, cap: int = DEFAULT_UNIT_CAP) -> SolveResult:
    """Exact optimum with an optimal certificate; feasible iff optimum >= t."""
    start = time.perf_counter()
    catalog = enumerate_units(instance, cap=cap)
    value, exchange = max_disjoint_cover(catalog, instance)
    if validate_exchange(instance, exchange):
        raise InternalError("oracle produced an invalid exchange")
    if exchange_value(exchange) != value:
        raise InternalError("oracle certificate value mismatch")
    return SolveResult(
        feasible=value >= instance.t,
        value=value,
        algorithm="brute",
        exchange=exchange,
        stats={
            "runtime_ms": (time.perf_counter() - start) * 1e3,
            "units": len(catalog.units),
        },
    )
