"""Domain model: compatibility digraphs, problem instances, and solution units.

All types are immutable after construction and safe to share across
concurrent solver runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ModelError


class CompatibilityGraph:
    """Directed compatibility graph with a distinguished altruistic subset.

    Invariants enforced at construction:
      * no self-loops,
      * no arc whose head is altruistic (altruistic donors have no paired
        patient, so nothing can donate *to* them),
      * duplicate arcs rejected.
    """

    __slots__ = ("n", "altruistic", "out_adj", "in_adj", "_arc_set")

    def __init__(self, n: int, altruistic: Iterable[int], arcs: Iterable[tuple[int, int]]):
        if n < 0:
            raise ModelError("vertex count must be non-negative")
        alt = frozenset(altruistic)
        for b in alt:
            if not (0 <= b < n):
                raise ModelError(f"altruistic id {b} out of range [0, {n})")
        out: list[list[int]] = [[] for _ in range(n)]
        inn: list[list[int]] = [[] for _ in range(n)]
        seen: set[tuple[int, int]] = set()
        for u, v in arcs:
            if not (0 <= u < n and 0 <= v < n):
                raise ModelError(f"arc ({u},{v}) has an endpoint out of range [0, {n})")
            if u == v:
                raise ModelError(f"self-loop ({u},{u})")
            if v in alt:
                raise ModelError(f"arc ({u},{v}) points into altruistic vertex {v}")
            if (u, v) in seen:
                raise ModelError(f"duplicate arc ({u},{v})")
            seen.add((u, v))
            out[u].append(v)
            inn[v].append(u)
        self.n = n
        self.altruistic = alt
        self.out_adj: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(a)) for a in out)
        self.in_adj: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(a)) for a in inn)
        self._arc_set = frozenset(seen)

    @property
    def arcs(self) -> frozenset[tuple[int, int]]:
        return self._arc_set

    def has_arc(self, u: int, v: int) -> bool:
        return (u, v) in self._arc_set

    def max_undirected_degree(self) -> int:
        und = underlying_undirected(self)
        return max((len(a) for a in und), default=0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CompatibilityGraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.altruistic == other.altruistic
            and self._arc_set == other._arc_set
        )

    def __hash__(self) -> int:
        return hash((self.n, self.altruistic, self._arc_set))

    def __repr__(self) -> str:
        return f"CompatibilityGraph(n={self.n}, |B|={len(self.altruistic)}, m={len(self._arc_set)})"


def underlying_undirected(g: CompatibilityGraph) -> tuple[frozenset[int], ...]:
    """Symmetrized adjacency: {u,v} adjacent iff (u,v) or (v,u) is an arc."""
    adj: list[set[int]] = [set() for _ in range(g.n)]
    for u, v in g.arcs:
        adj[u].add(v)
        adj[v].add(u)
    return tuple(frozenset(a) for a in adj)


@dataclass(frozen=True)
class Instance:
    """A clearing problem: graph plus length caps and the coverage target.

    ``l_p``/``l_c`` cap chain/cycle lengths in *edges*; ``t`` is the number
    of patients that must be covered. Degenerate caps are legal inputs:
    ``l_p = 0`` disables chains, ``l_c <= 1`` disables cycles.
    """

    graph: CompatibilityGraph
    l_p: int
    l_c: int
    t: int

    def __post_init__(self) -> None:
        for name in ("l_p", "l_c", "t"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise ModelError(f"{name} must be a non-negative integer, got {v!r}")


@dataclass(frozen=True)
class Chain:
    """A directed path rooted at an altruistic vertex.

    ``vertices[0]`` is the root; every edge is one transplant, so the chain
    covers ``len(vertices) - 1`` patients. Zero-edge chains are not
    representable.
    """

    vertices: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.vertices) < 2:
            raise ModelError("a chain needs at least one edge")
        object.__setattr__(self, "vertices", tuple(self.vertices))

    @property
    def covered(self) -> int:
        return len(self.vertices) - 1


@dataclass(frozen=True)
class Cycle:
    """A directed trading cycle, canonicalized to start at its minimum id."""

    vertices: tuple[int, ...]

    def __post_init__(self) -> None:
        vs = tuple(self.vertices)
        if len(vs) < 2:
            raise ModelError("a cycle needs at least two vertices")
        k = vs.index(min(vs))
        object.__setattr__(self, "vertices", vs[k:] + vs[:k])

    @property
    def covered(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class Exchange:
    """A vertex-disjoint collection of chains and cycles."""

    chains: tuple[Chain, ...] = field(default_factory=tuple)
    cycles: tuple[Cycle, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "chains", tuple(self.chains))
        object.__setattr__(self, "cycles", tuple(self.cycles))

    def units(self) -> tuple[Chain | Cycle, ...]:
        return self.chains + self.cycles

    def covered_vertices(self) -> set[int]:
        """Non-altruistic vertices covered (all unit vertices except chain roots)."""
        out: set[int] = set()
        for c in self.chains:
            out.update(c.vertices[1:])
        for c in self.cycles:
            out.update(c.vertices)
        return out


def exchange_value(ex: Exchange) -> int:
    """Number of patients covered: edge count over chains plus cycle lengths."""
    return sum(c.covered for c in ex.chains) + sum(c.covered for c in ex.cycles)


def validate_exchange(instance: Instance, ex: Exchange) -> list[str]:
    """Check every unit invariant against ``instance``.

    Returns a list of human-readable violations; an empty list means the
    exchange is valid. Violations are data, not failures.
    """
    g = instance.graph
    violations: list[str] = []
    used: set[int] = set()

    def claim(vertices: Sequence[int], label: str) -> None:
        overlap = used.intersection(vertices)
        if overlap:
            violations.append(f"{label}: units not disjoint (shared {sorted(overlap)})")
        used.update(vertices)

    for chain in ex.chains:
        vs = chain.vertices
        label = f"chain {vs}"
        if any(not (0 <= v < g.n) for v in vs):
            violations.append(f"{label}: vertex id out of range")
            continue
        if len(set(vs)) != len(vs):
            violations.append(f"{label}: vertices not distinct")
        if vs[0] not in g.altruistic:
            violations.append(f"{label}: chain root not altruistic")
        for v in vs[1:]:
            if v in g.altruistic:
                violations.append(f"{label}: interior vertex {v} is altruistic")
        for u, v in zip(vs, vs[1:]):
            if not g.has_arc(u, v):
                violations.append(f"{label}: missing arc ({u},{v})")
        if chain.covered > instance.l_p:
            violations.append(f"{label}: length {chain.covered} exceeds l_p={instance.l_p}")
        claim(vs, label)

    for cyc in ex.cycles:
        vs = cyc.vertices
        label = f"cycle {vs}"
        if any(not (0 <= v < g.n) for v in vs):
            violations.append(f"{label}: vertex id out of range")
            continue
        if len(set(vs)) != len(vs):
            violations.append(f"{label}: vertices not distinct")
        for v in vs:
            if v in g.altruistic:
                violations.append(f"{label}: vertex {v} is altruistic")
        for i, u in enumerate(vs):
            v = vs[(i + 1) % len(vs)]
            if not g.has_arc(u, v):
                violations.append(f"{label}: missing arc ({u},{v})")
        if cyc.covered > instance.l_c:
            violations.append(f"{label}: length {cyc.covered} exceeds l_c={instance.l_c}")
        claim(vs, label)

    return violations
