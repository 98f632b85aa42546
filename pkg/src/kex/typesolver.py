"""Solver parameterized by the number of vertex types, for l_p <= l_c.

Vertices with identical in- and out-neighbor sets are interchangeable, so
units are described by their type sequences (signatures). Short signatures
suffice: any longer unit in an optimal solution can be split at a repeated
type into shorter units covering the same patients. An integer program over
signature multiplicities then yields the optimum, and any feasible
assignment can be realized greedily with concrete vertices.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass

from .core import Chain, CompatibilityGraph, Cycle, Exchange, Instance, exchange_value, validate_exchange
from .errors import CapacityError, InternalError, PreconditionError
from .result import SolveResult

DEFAULT_SIGNATURE_CAP = 10**6


@dataclass(frozen=True)
class TypePartition:
    """Equivalence classes of vertices under (in-neighbors, out-neighbors).

    Each class is an independent set; arcs between two classes are
    all-or-nothing, so ``class_adj[a][b]`` fully describes connectivity.
    """

    classes: tuple[tuple[int, ...], ...]
    type_of: tuple[int, ...]
    class_adj: tuple[tuple[bool, ...], ...]
    altruistic_classes: frozenset[int]

    @property
    def num_types(self) -> int:
        return len(self.classes)

    def size(self, cls: int) -> int:
        return len(self.classes[cls])


@dataclass(frozen=True)
class Signature:
    """Type sequence of a unit; cycles are stored in minimal rotation."""

    kind: str  # "path" | "cycle"
    seq: tuple[int, ...]

    @property
    def covered(self) -> int:
        return len(self.seq) - 1 if self.kind == "path" else len(self.seq)


@dataclass(frozen=True)
class IlpModel:
    """maximize sum(objective[p] * x[p]) s.t. per-class usage <= class size."""

    signatures: tuple[Signature, ...]
    objective: tuple[int, ...]
    usage: tuple[dict[int, int], ...]  # per signature: class -> vertices used
    class_sizes: tuple[int, ...]
    var_bound: int


def compute_types(graph: CompatibilityGraph) -> TypePartition:
    """Group vertices by (in-set, out-set); derive the class adjacency matrix."""
    buckets: dict[tuple[tuple[int, ...], tuple[int, ...]], list[int]] = {}
    for v in range(graph.n):
        buckets.setdefault((graph.in_adj[v], graph.out_adj[v]), []).append(v)
    classes = tuple(tuple(sorted(vs)) for _k, vs in sorted(buckets.items(), key=lambda kv: kv[1][0]))
    type_of = [0] * graph.n
    for idx, vs in enumerate(classes):
        for v in vs:
            type_of[v] = idx
    theta = len(classes)
    adj = [[False] * theta for _ in range(theta)]
    for a in range(theta):
        rep = classes[a][0]
        outs = set(graph.out_adj[rep])
        for b in range(theta):
            if a != b and classes[b][0] in outs:
                adj[a][b] = True
    altruistic = frozenset(
        idx for idx, vs in enumerate(classes) if any(v in graph.altruistic for v in vs)
    )
    return TypePartition(
        classes=classes,
        type_of=tuple(type_of),
        class_adj=tuple(tuple(row) for row in adj),
        altruistic_classes=altruistic,
    )


def prune_mixed_types(instance: Instance, partition: TypePartition) -> tuple[Instance, list[int]]:
    """Drop non-altruistic vertices that share a class with altruistic ones.

    Such vertices have no in-arcs (their in-set matches an altruistic
    vertex's, which is empty), so they can never be covered and never feed
    a unit. Returns the reduced instance plus the kept original ids in
    order, for mapping certificates back.
    """
    g = instance.graph
    drop: set[int] = set()
    for idx in partition.altruistic_classes:
        for v in partition.classes[idx]:
            if v not in g.altruistic:
                drop.add(v)
    keep = [v for v in range(g.n) if v not in drop]
    remap = {old: new for new, old in enumerate(keep)}
    arcs = [(remap[u], remap[v]) for u, v in sorted(g.arcs) if u in remap and v in remap]
    new_graph = CompatibilityGraph(len(keep), [remap[b] for b in g.altruistic], arcs)
    return Instance(new_graph, instance.l_p, instance.l_c, instance.t), keep


def _canonical_cycle_seq(seq: tuple[int, ...]) -> tuple[int, ...]:
    rotations = [seq[i:] + seq[:i] for i in range(len(seq))]
    return min(rotations)


def enumerate_signatures(
    instance: Instance, partition: TypePartition, cap: int = DEFAULT_SIGNATURE_CAP
) -> list[Signature]:
    """All feasible signatures within the length caps.

    Path signatures start at an altruistic class and span at most
    min(theta + 4, l_p + 1) vertices; cycle signatures span at most
    min(theta + 3, l_c) vertices. Class multiplicities never exceed the
    class size, and consecutive classes must be adjacent (wrapping for
    cycles).
    """
    theta = partition.num_types
    adj = partition.class_adj
    sizes = [partition.size(c) for c in range(theta)]
    path_max_vertices = min(theta + 4, instance.l_p + 1)
    cycle_max_vertices = min(theta + 3, instance.l_c)
    out: list[Signature] = []

    def emit(sig: Signature) -> None:
        if len(out) >= cap:
            raise CapacityError(f"signature count exceeds cap {cap}")
        out.append(sig)

    def extend_path(seq: list[int], counts: Counter) -> None:
        if len(seq) >= 2:
            emit(Signature("path", tuple(seq)))
        if len(seq) >= path_max_vertices:
            return
        for nxt in range(theta):
            if adj[seq[-1]][nxt] and counts[nxt] < sizes[nxt]:
                counts[nxt] += 1
                seq.append(nxt)
                extend_path(seq, counts)
                seq.pop()
                counts[nxt] -= 1

    if path_max_vertices >= 2:
        for start in sorted(partition.altruistic_classes):
            extend_path([start], Counter([start]))

    seen_cycles: set[tuple[int, ...]] = set()

    def extend_cycle(seq: list[int], counts: Counter) -> None:
        if len(seq) >= 2 and adj[seq[-1]][seq[0]]:
            canon = _canonical_cycle_seq(tuple(seq))
            if canon not in seen_cycles:
                seen_cycles.add(canon)
                emit(Signature("cycle", canon))
        if len(seq) >= cycle_max_vertices:
            return
        for nxt in range(theta):
            if adj[seq[-1]][nxt] and counts[nxt] < sizes[nxt]:
                counts[nxt] += 1
                seq.append(nxt)
                extend_cycle(seq, counts)
                seq.pop()
                counts[nxt] -= 1

    if cycle_max_vertices >= 2:
        for start in range(theta):
            if start not in partition.altruistic_classes:
                extend_cycle([start], Counter([start]))

    out.sort(key=lambda s: (s.kind, s.seq))
    return out


def build_ilp(signatures: list[Signature], partition: TypePartition) -> IlpModel:
    usage = tuple(dict(Counter(s.seq)) for s in signatures)
    return IlpModel(
        signatures=tuple(signatures),
        objective=tuple(s.covered for s in signatures),
        usage=usage,
        class_sizes=tuple(partition.size(c) for c in range(partition.num_types)),
        var_bound=sum(partition.size(c) for c in range(partition.num_types)),
    )


def solve_ilp(model: IlpModel, cap: int = DEFAULT_SIGNATURE_CAP) -> tuple[int, tuple[int, ...]]:
    """Exact optimum by depth-first branch and bound over bounded variables.

    The bound is the fractional greedy (single aggregated capacity) bound:
    signatures sorted by covered-per-vertex ratio, filled fractionally into
    the total remaining class capacity. Assignments are explored in lexical
    order and only strictly better objectives replace the incumbent, so the
    returned assignment is the lexicographically smallest optimum.
    """
    k = len(model.signatures)
    if k > cap:
        raise CapacityError(f"variable count {k} exceeds cap {cap}")
    if k == 0:
        return 0, ()
    sizes = [sum(u.values()) for u in model.usage]
    ratio_order = sorted(range(k), key=lambda i: (-model.objective[i] / sizes[i], i))

    remaining = list(model.class_sizes)
    best_value = -1
    best_assign: tuple[int, ...] = ()
    assign = [0] * k

    def greedy_bound(var: int) -> float:
        budget = sum(remaining)
        bound = 0.0
        for i in ratio_order:
            if i < var or budget <= 0:
                continue
            limit = min(
                model.var_bound,
                min(remaining[c] // u for c, u in model.usage[i].items()),
            )
            take = min(limit, budget / sizes[i])
            bound += take * model.objective[i]
            budget -= take * sizes[i]
        return bound

    def search(var: int, value: int) -> None:
        nonlocal best_value, best_assign
        if var == k:
            if value > best_value:
                best_value = value
                best_assign = tuple(assign)
            return
        if value + greedy_bound(var) <= best_value:
            return
        limit = min(
            model.var_bound,
            min(remaining[c] // u for c, u in model.usage[var].items()),
        )
        for x in range(limit + 1):
            assign[var] = x
            if x:
                for c, u in model.usage[var].items():
                    remaining[c] -= u
            search(var + 1, value + x * model.objective[var])
        for c, u in model.usage[var].items():
            remaining[c] += u * limit
        assign[var] = 0

    search(0, 0)
    return best_value, best_assign


def reconstruct(
    signatures: tuple[Signature, ...],
    assignment: tuple[int, ...],
    partition: TypePartition,
) -> Exchange:
    """Realize each selected signature with concrete unused vertices.

    Arcs between adjacent classes are complete bipartite, so any unused
    representatives work; the ILP constraints guarantee enough remain.
    """
    pools = [list(partition.classes[c]) for c in range(partition.num_types)]
    next_free = [0] * partition.num_types
    chains: list[Chain] = []
    cycles: list[Cycle] = []

    def take(cls: int) -> int:
        if next_free[cls] >= len(pools[cls]):
            raise InternalError(f"class {cls} exhausted during reconstruction")
        v = pools[cls][next_free[cls]]
        next_free[cls] += 1
        return v

    for sig, count in zip(signatures, assignment):
        for _ in range(count):
            vertices = tuple(take(c) for c in sig.seq)
            if sig.kind == "path":
                chains.append(Chain(vertices))
            else:
                cycles.append(Cycle(vertices))
    return Exchange(tuple(chains), tuple(cycles))


def solve_types(instance: Instance, cap: int = DEFAULT_SIGNATURE_CAP) -> SolveResult:
    """Full pipeline: types -> prune -> signatures -> integer program -> realize."""
    if instance.l_p > instance.l_c:
        raise PreconditionError(f"requires l_p <= l_c, got l_p={instance.l_p} > l_c={instance.l_c}")
    start = time.perf_counter()
    partition0 = compute_types(instance.graph)
    pruned, keep = prune_mixed_types(instance, partition0)
    partition = compute_types(pruned.graph)
    signatures = enumerate_signatures(pruned, partition, cap=cap)
    model = build_ilp(signatures, partition)
    value, assignment = solve_ilp(model, cap=cap)
    exchange = reconstruct(model.signatures, assignment, partition)
    if exchange_value(exchange) != value:
        raise InternalError("reconstructed exchange does not match the ILP objective")
    # Map certificate back to original vertex ids.
    mapped = Exchange(
        tuple(Chain(tuple(keep[v] for v in c.vertices)) for c in exchange.chains),
        tuple(Cycle(tuple(keep[v] for v in c.vertices)) for c in exchange.cycles),
    )
    if validate_exchange(instance, mapped):
        raise InternalError("type solver produced an invalid exchange")
    return SolveResult(
        feasible=value >= instance.t,
        value=value,
        algorithm="types",
        exchange=mapped,
        stats={
            "runtime_ms": (time.perf_counter() - start) * 1e3,
            "types": partition.num_types,
            "signatures": len(signatures),
        },
    )
