"""Approximation for the cycles-only regime with l_c <= 3 (no chains).

Two set-packing instances are built from the graph: one over triangles
only, one over triangles plus 2-cycles. Both are packed for maximum set
count and the answer covering more vertices wins. With an exact packing
subroutine the returned coverage is at least 3/4 of the optimum; the swap
local search trades that guarantee for scale.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

from .core import CompatibilityGraph, Cycle, Exchange, Instance, exchange_value, validate_exchange
from .errors import CapacityError, InternalError, PreconditionError
from .result import SolveResult

DEFAULT_FAMILY_CAP = 10**6


@dataclass(frozen=True)
class PackingInstance:
    """Family of vertex sets (size 2 or 3), each backed by a source cycle."""

    universe: int
    sets: tuple[frozenset[int], ...]
    cycles: tuple[Cycle, ...]  # cycles[i] realizes sets[i]


def enumerate_small_cycles(graph: CompatibilityGraph) -> tuple[list[Cycle], list[Cycle]]:
    """All directed 2-cycles and triangles, canonical and duplicate-free."""
    two_cycles = []
    for u in range(graph.n):
        for v in graph.out_adj[u]:
            if v > u and graph.has_arc(v, u):
                two_cycles.append(Cycle((u, v)))
    triangles = []
    for a in range(graph.n):
        for b in graph.out_adj[a]:
            if b <= a:
                continue
            for c in graph.out_adj[b]:
                if c > a and c != b and graph.has_arc(c, a):
                    triangles.append(Cycle((a, b, c)))
    return two_cycles, triangles


def _build_packing(graph: CompatibilityGraph, cycles: list[Cycle], cap: int) -> PackingInstance:
    by_set: dict[frozenset[int], Cycle] = {}
    for cyc in cycles:
        key = frozenset(cyc.vertices)
        # A vertex set with two opposite triangles keeps one representative;
        # the covered count is identical.
        if key not in by_set or cyc.vertices < by_set[key].vertices:
            by_set[key] = cyc
    if len(by_set) > cap:
        raise CapacityError(f"packing family size {len(by_set)} exceeds cap {cap}")
    items = sorted(by_set.items(), key=lambda kv: kv[1].vertices)
    return PackingInstance(
        universe=graph.n,
        sets=tuple(k for k, _ in items),
        cycles=tuple(c for _, c in items),
    )


def set_packing(
    pi: PackingInstance, mode: str = "exact", swap_width: int = 2, cap: int = DEFAULT_FAMILY_CAP
) -> list[int]:
    """Indices of a disjoint subfamily.

    Exact mode maximizes cardinality by branch and bound with the
    lexicographically smallest optimal index set; local-search mode returns
    a solution with no improving swap of <= swap_width sets out for
    swap_width + 1 sets in.
    """
    if mode == "exact":
        if len(pi.sets) > cap:
            raise CapacityError(f"family size {len(pi.sets)} exceeds exact-mode cap {cap}")
        return _pack_exact(pi)
    if mode == "local":
        return _pack_local(pi, swap_width)
    raise PreconditionError(f"unknown packing mode {mode!r}")


def _pack_exact(pi: PackingInstance) -> list[int]:
    k = len(pi.sets)
    masks = []
    for s in pi.sets:
        m = 0
        for v in s:
            m |= 1 << v
        masks.append(m)
    best_count = -1
    best_sel: tuple[int, ...] = ()

    def search(i: int, used: int, chosen: list[int]) -> None:
        nonlocal best_count, best_sel
        if len(chosen) + (k - i) < best_count:
            return
        if i == k:
            if len(chosen) > best_count:
                best_count = len(chosen)
                best_sel = tuple(chosen)
            return
        if not masks[i] & used:
            chosen.append(i)
            search(i + 1, used | masks[i], chosen)
            chosen.pop()
        search(i + 1, used, chosen)

    search(0, 0, [])
    return list(best_sel)


def _pack_local(pi: PackingInstance, swap_width: int) -> list[int]:
    masks = []
    for s in pi.sets:
        m = 0
        for v in s:
            m |= 1 << v
        masks.append(m)
    solution: list[int] = []
    used = 0
    for i in range(len(pi.sets)):
        if not masks[i] & used:
            solution.append(i)
            used |= masks[i]

    def try_fill(avoid: int, banned: set[int], need: int) -> list[int] | None:
        # DFS for `need` pairwise-disjoint sets avoiding `avoid` vertices.
        picked: list[int] = []

        def rec(start: int, used_local: int) -> bool:
            if len(picked) == need:
                return True
            for j in range(start, len(pi.sets)):
                if j in banned or masks[j] & used_local:
                    continue
                picked.append(j)
                if rec(j + 1, used_local | masks[j]):
                    return True
                picked.pop()
            return False

        return picked if rec(0, avoid) else None

    improved = True
    while improved:
        improved = False
        current = set(solution)
        for width in range(0, swap_width + 1):
            for out in itertools.combinations(sorted(current), width):
                keep_mask = 0
                for i in current.difference(out):
                    keep_mask |= masks[i]
                fill = try_fill(keep_mask, current.difference(out), width + 1)
                if fill is not None:
                    current.difference_update(out)
                    current.update(fill)
                    solution = sorted(current)
                    improved = True
                    break
            if improved:
                break
    return sorted(solution)


def solve_approx3(
    instance: Instance,
    mode: str = "exact",
    swap_width: int = 2,
    cap: int = DEFAULT_FAMILY_CAP,
) -> SolveResult:
    """Pack both families and return the better of the two cycle covers."""
    if instance.l_p != 0 or instance.l_c > 3:
        raise PreconditionError(
            f"requires l_p = 0 and l_c <= 3, got l_p={instance.l_p}, l_c={instance.l_c}"
        )
    start = time.perf_counter()
    g = instance.graph
    two_cycles, triangles = enumerate_small_cycles(g)
    if instance.l_c < 2:
        two_cycles = []
    if instance.l_c < 3:
        triangles = []
    family1 = _build_packing(g, triangles, cap)
    family2 = _build_packing(g, triangles + two_cycles, cap)
    picked1 = set_packing(family1, mode=mode, swap_width=swap_width, cap=cap)
    picked2 = set_packing(family2, mode=mode, swap_width=swap_width, cap=cap)
    cover1 = Exchange(cycles=tuple(family1.cycles[i] for i in picked1))
    cover2 = Exchange(cycles=tuple(family2.cycles[i] for i in picked2))
    a1 = exchange_value(cover1)
    a2 = exchange_value(cover2)
    exchange = cover1 if a1 > a2 else cover2
    value = max(a1, a2)
    if validate_exchange(instance, exchange):
        raise InternalError("approximation produced an invalid exchange")
    return SolveResult(
        feasible=value >= instance.t,
        value=value,
        algorithm="approx3",
        exchange=exchange,
        stats={
            "runtime_ms": (time.perf_counter() - start) * 1e3,
            "A1": a1,
            "A2": a2,
            "family1": len(family1.sets),
            "family2": len(family2.sets),
            "packing_mode": mode,
        },
    )
