"""Preprocessing: reduction rule, greedy maximal cover, and the size bound.

The single reduction rule deletes every vertex that lies on no cycle of
length <= l_c and on no altruistic-rooted path of length <= l_p; such a
vertex can never participate in any solution. One pass suffices: every
vertex of a surviving short unit is itself non-removable.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass

from .core import Chain, CompatibilityGraph, Cycle, Exchange, Instance, exchange_value, validate_exchange
from .errors import InternalError
from .result import SolveResult


@dataclass(frozen=True)
class KernelReport:
    """What the reduction did and what the greedy pass found.

    ``kept`` maps surviving old ids to dense new ids; ``shortcut`` is a
    valid exchange covering >= t patients when the greedy maximal cover
    already certifies feasibility; ``bound`` is the computed vertex bound
    |W| + |W| * sum_{d=1..L} max_degree^d for the reduced instance.
    """

    kept: dict[int, int]
    removed: frozenset[int]
    shortcut: Exchange | None
    bound: int


def _bfs_dist_from(g: CompatibilityGraph, sources: list[int], alive: set[int] | None = None) -> dict[int, int]:
    dist: dict[int, int] = {}
    q: deque[int] = deque()
    for s in sources:
        if alive is not None and s not in alive:
            continue
        if s not in dist:
            dist[s] = 0
            q.append(s)
    while q:
        u = q.popleft()
        for w in g.out_adj[u]:
            if alive is not None and w not in alive:
                continue
            if w not in dist:
                dist[w] = dist[u] + 1
                q.append(w)
    return dist


def _shortest_cycle_through(g: CompatibilityGraph, v: int, alive: set[int] | None = None) -> int | None:
    """Length of the shortest directed cycle containing v, or None."""
    dist = _bfs_dist_from(g, [v], alive)
    best = None
    for u in g.in_adj[v]:
        if alive is not None and u not in alive:
            continue
        if u in dist:
            cand = dist[u] + 1
            if best is None or cand < best:
                best = cand
    return best


def removable_vertices(instance: Instance) -> set[int]:
    """Vertices on no short cycle and no short altruistic-rooted path.

    An altruistic vertex participates in a path iff l_p >= 1 and it has an
    out-neighbor; a non-altruistic vertex participates iff its BFS distance
    from the altruistic set is <= l_p.
    """
    g = instance.graph
    dist_b = _bfs_dist_from(g, sorted(g.altruistic))
    removable: set[int] = set()
    for v in range(g.n):
        if v in g.altruistic:
            on_path = instance.l_p >= 1 and len(g.out_adj[v]) > 0
            on_cycle = False  # altruistic vertices have no in-arcs
        else:
            on_path = v in dist_b and dist_b[v] <= instance.l_p
            sc = _shortest_cycle_through(g, v) if instance.l_c >= 2 else None
            on_cycle = sc is not None and sc <= instance.l_c
        if not on_path and not on_cycle:
            removable.add(v)
    return removable


def _lex_min_cycle(g: CompatibilityGraph, alive: set[int], length: int) -> tuple[int, ...] | None:
    """Lexicographically smallest directed cycle with exactly ``length`` edges."""

    def dfs(anchor: int, path: list[int], on_path: set[int]) -> tuple[int, ...] | None:
        if len(path) == length:
            return tuple(path) if g.has_arc(path[-1], anchor) else None
        for w in g.out_adj[path[-1]]:
            if w > anchor and w in alive and w not in on_path:
                on_path.add(w)
                path.append(w)
                found = dfs(anchor, path, on_path)
                path.pop()
                on_path.remove(w)
                if found:
                    return found
        return None

    for s in sorted(alive - g.altruistic):
        found = dfs(s, [s], {s})
        if found:
            return found
    return None


def _lex_min_chain(g: CompatibilityGraph, alive: set[int], length: int) -> tuple[int, ...] | None:
    """Lexicographically smallest altruistic-rooted path with exactly ``length`` edges."""

    def dfs(path: list[int], on_path: set[int]) -> tuple[int, ...] | None:
        if len(path) == length + 1:
            return tuple(path)
        for w in g.out_adj[path[-1]]:
            if w in alive and w not in on_path:
                on_path.add(w)
                path.append(w)
                found = dfs(path, on_path)
                path.pop()
                on_path.remove(w)
                if found:
                    return found
        return None

    for b in sorted(g.altruistic & alive):
        found = dfs([b], {b})
        if found:
            return found
    return None


def greedy_maximal_cover(instance: Instance) -> Exchange:
    """Iteratively take a shortest feasible unit and delete its vertices.

    Unit-length shortest first (BFS distances; unit arc weights), ties by
    the lowest canonical vertex sequence. The result is maximal: no feasible
    unit fits in the residual graph.
    """
    g = instance.graph
    alive = set(range(g.n))
    chains: list[Chain] = []
    cycles: list[Cycle] = []
    while True:
        best_cycle_len = None
        if instance.l_c >= 2:
            for v in sorted(alive - g.altruistic):
                sc = _shortest_cycle_through(g, v, alive)
                if sc is not None and sc <= instance.l_c:
                    if best_cycle_len is None or sc < best_cycle_len:
                        best_cycle_len = sc
        best_chain_len = None
        if instance.l_p >= 1:
            dist_b = _bfs_dist_from(g, sorted(g.altruistic), alive)
            reach = [d for v, d in dist_b.items() if 1 <= d <= instance.l_p]
            if reach:
                best_chain_len = min(reach)

        if best_cycle_len is None and best_chain_len is None:
            break
        candidates: list[tuple[int, tuple[int, ...], str]] = []
        if best_chain_len is not None and (best_cycle_len is None or best_chain_len <= best_cycle_len):
            seq = _lex_min_chain(g, alive, best_chain_len)
            if seq is None:
                raise InternalError("BFS promised a chain the DFS could not realize")
            candidates.append((best_chain_len, seq, "chain"))
        if best_cycle_len is not None and (best_chain_len is None or best_cycle_len <= best_chain_len):
            seq = _lex_min_cycle(g, alive, best_cycle_len)
            if seq is None:
                raise InternalError("BFS promised a cycle the DFS could not realize")
            candidates.append((best_cycle_len, seq, "cycle"))
        _, seq, kind = min(candidates)
        if kind == "chain":
            chains.append(Chain(seq))
        else:
            cycles.append(Cycle(seq))
        alive.difference_update(seq)
    return Exchange(tuple(chains), tuple(cycles))


def kernelize(instance: Instance) -> tuple[Instance, KernelReport]:
    """Delete removable vertices and remap ids densely.

    The reduced instance is equi-feasible with the input, and a single pass
    leaves no removable vertex behind.
    """
    removed = removable_vertices(instance)
    keep = [v for v in range(instance.graph.n) if v not in removed]
    kept = {old: new for new, old in enumerate(keep)}
    g = instance.graph
    arcs = [(kept[u], kept[v]) for u, v in sorted(g.arcs) if u in kept and v in kept]
    new_graph = CompatibilityGraph(len(keep), [kept[b] for b in g.altruistic if b in kept], arcs)
    reduced = Instance(new_graph, instance.l_p, instance.l_c, instance.t)

    greedy = greedy_maximal_cover(reduced)
    shortcut = greedy if exchange_value(greedy) >= instance.t else None
    w = sum(len(u.vertices) for u in greedy.units())
    delta = new_graph.max_undirected_degree()
    span = max(instance.l_p, instance.l_c)
    bound = w + w * sum(delta**d for d in range(1, span + 1))
    return reduced, KernelReport(kept=kept, removed=frozenset(removed), shortcut=shortcut, bound=bound)


def trivial_yes_check(instance: Instance) -> SolveResult | None:
    """Feasibility certificate from the greedy maximal cover, when it suffices."""
    start = time.perf_counter()
    if instance.t == 0:
        return SolveResult(True, 0, "greedy", Exchange(), {"runtime_ms": 0.0})
    greedy = greedy_maximal_cover(instance)
    value = exchange_value(greedy)
    if value < instance.t:
        return None
    if validate_exchange(instance, greedy):
        raise InternalError("greedy cover produced an invalid exchange")
    return SolveResult(
        True,
        value,
        "greedy",
        greedy,
        {"runtime_ms": (time.perf_counter() - start) * 1e3},
    )
