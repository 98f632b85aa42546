"""Tree decompositions of the underlying undirected graph, plus the nice form.

The decomposition comes from min-fill elimination (valid, width not
guaranteed minimum). The nice form uses empty leaves and root, unary
introduce-vertex / forget nodes, binary joins with equal bags, and one
introduce-edge node per undirected edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import CompatibilityGraph, underlying_undirected
from .errors import ModelError


@dataclass
class TreeDecomposition:
    """Bags plus tree edges between bag indices."""

    bags: list[frozenset[int]]
    edges: list[tuple[int, int]]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=1) - 1


@dataclass
class NiceNode:
    kind: str  # "leaf" | "intro" | "forget" | "intro_edge" | "join"
    bag: frozenset[int]
    children: list["NiceNode"] = field(default_factory=list)
    vertex: int | None = None
    edge: tuple[int, int] | None = None
    uid: int = -1


@dataclass
class NiceDecomposition:
    root: NiceNode
    width: int

    def nodes(self) -> list[NiceNode]:
        """Post-order listing (children before parents)."""
        out: list[NiceNode] = []
        stack: list[tuple[NiceNode, bool]] = [(self.root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                out.append(node)
            else:
                stack.append((node, True))
                for c in node.children:
                    stack.append((c, False))
        return out


def tree_decomposition(graph: CompatibilityGraph) -> TreeDecomposition:
    """Min-fill elimination ordering over the underlying undirected graph."""
    und = underlying_undirected(graph)
    n = graph.n
    if n == 0:
        return TreeDecomposition([frozenset()], [])
    adj = [set(a) for a in und]
    alive = set(range(n))
    order: list[int] = []
    bags: list[frozenset[int]] = []

    def fill_cost(v: int) -> int:
        nbrs = [u for u in adj[v] if u in alive]
        missing = 0
        for i, u in enumerate(nbrs):
            for w in nbrs[i + 1 :]:
                if w not in adj[u]:
                    missing += 1
        return missing

    while alive:
        v = min(alive, key=lambda u: (fill_cost(u), u))
        nbrs = sorted(u for u in adj[v] if u in alive)
        bags.append(frozenset([v]) | frozenset(nbrs))
        for i, u in enumerate(nbrs):
            for w in nbrs[i + 1 :]:
                adj[u].add(w)
                adj[w].add(u)
        alive.remove(v)
        order.append(v)

    position = {v: i for i, v in enumerate(order)}
    edges = []
    for i, v in enumerate(order):
        rest = [u for u in bags[i] if u != v]
        if rest:
            j = min(position[u] for u in rest)
            edges.append((i, j))
        elif i + 1 < len(order):
            edges.append((i, i + 1))
    return TreeDecomposition(bags, edges)


def validate_decomposition(td: TreeDecomposition, graph: CompatibilityGraph) -> list[str]:
    """Check the three decomposition axioms; empty list when valid."""
    problems = []
    n = graph.n
    covered = set().union(*td.bags) if td.bags else set()
    if covered != set(range(n)):
        problems.append(f"vertices not covered: {sorted(set(range(n)) - covered)}")
    und = underlying_undirected(graph)
    for u in range(n):
        for v in und[u]:
            if u < v and not any(u in b and v in b for b in td.bags):
                problems.append(f"edge ({u},{v}) in no bag")
    # Tree must be connected and acyclic over all bags.
    k = len(td.bags)
    tree_adj: list[list[int]] = [[] for _ in range(k)]
    for i, j in td.edges:
        tree_adj[i].append(j)
        tree_adj[j].append(i)
    if k and len(td.edges) != k - 1:
        problems.append("bag tree is not a tree")
    else:
        seen = {0} if k else set()
        stack = [0] if k else []
        while stack:
            i = stack.pop()
            for j in tree_adj[i]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        if len(seen) != k:
            problems.append("bag tree is disconnected")
    for v in range(n):
        holding = [i for i, b in enumerate(td.bags) if v in b]
        if not holding:
            continue
        seen = {holding[0]}
        stack = [holding[0]]
        hold_set = set(holding)
        while stack:
            i = stack.pop()
            for j in tree_adj[i]:
                if j in hold_set and j not in seen:
                    seen.add(j)
                    stack.append(j)
        if len(seen) != len(holding):
            problems.append(f"bags containing {v} are not connected")
    return problems


def _chain_to_bag(base: NiceNode, target: frozenset[int]) -> NiceNode:
    """Forget down to the intersection, then introduce up to ``target``."""
    node = base
    for v in sorted(base.bag - target):
        node = NiceNode("forget", node.bag - {v}, [node], vertex=v)
    for v in sorted(target - node.bag):
        node = NiceNode("intro", node.bag | {v}, [node], vertex=v)
    return node


def make_nice(td: TreeDecomposition, graph: CompatibilityGraph) -> NiceDecomposition:
    """Convert to nice form with introduce-edge nodes (each edge exactly once)."""
    k = len(td.bags)
    tree_adj: list[list[int]] = [[] for _ in range(k)]
    for i, j in td.edges:
        tree_adj[i].append(j)
        tree_adj[j].append(i)

    def build(i: int, parent: int) -> NiceNode:
        bag = td.bags[i]
        parts: list[NiceNode] = []
        for j in sorted(tree_adj[i]):
            if j != parent:
                parts.append(_chain_to_bag(build(j, i), bag))
        if not parts:
            node = NiceNode("leaf", frozenset())
            return _chain_to_bag(node, bag)
        while len(parts) > 1:
            right = parts.pop()
            left = parts.pop()
            parts.append(NiceNode("join", bag, [left, right]))
        return parts[0]

    root = _chain_to_bag(build(0, -1), frozenset())

    und = underlying_undirected(graph)
    assigned: set[tuple[int, int]] = set()

    def insert_edges(node: NiceNode) -> NiceNode:
        node.children = [insert_edges(c) for c in node.children]
        wrapped = node
        if node.kind == "intro":
            w = node.vertex
            for z in sorted(node.bag - {w}):
                e = (min(w, z), max(w, z))
                if z in und[w] and e not in assigned:
                    assigned.add(e)
                    wrapped = NiceNode("intro_edge", node.bag, [wrapped], edge=e)
        return wrapped

    root = insert_edges(root)
    expected = sum(len(a) for a in und) // 2
    if len(assigned) != expected:
        raise ModelError("internal: some undirected edge was never introduced")

    nice = NiceDecomposition(root, td.width)
    for uid, node in enumerate(nice.nodes()):
        node.uid = uid
    return nice


def nice_invariants(nice: NiceDecomposition, graph: CompatibilityGraph) -> list[str]:
    """Structural checks on the nice form; empty list when valid."""
    problems = []
    edge_count = 0
    seen_edges: set[tuple[int, int]] = set()
    for node in nice.nodes():
        if node.kind == "leaf":
            if node.bag:
                problems.append("leaf bag not empty")
            if node.children:
                problems.append("leaf has children")
        elif node.kind == "intro":
            (c,) = node.children
            if node.bag != c.bag | {node.vertex} or node.vertex in c.bag:
                problems.append(f"bad introduce of {node.vertex}")
        elif node.kind == "forget":
            (c,) = node.children
            if node.bag != c.bag - {node.vertex} or node.vertex not in c.bag:
                problems.append(f"bad forget of {node.vertex}")
        elif node.kind == "intro_edge":
            (c,) = node.children
            x, y = node.edge
            if node.bag != c.bag or x not in node.bag or y not in node.bag:
                problems.append(f"bad introduce-edge {node.edge}")
            if node.edge in seen_edges:
                problems.append(f"edge {node.edge} introduced twice")
            seen_edges.add(node.edge)
            edge_count += 1
        elif node.kind == "join":
            c1, c2 = node.children
            if node.bag != c1.bag or node.bag != c2.bag:
                problems.append("join children bags differ")
    und = underlying_undirected(graph)
    expected = sum(len(a) for a in und) // 2
    if edge_count != expected:
        problems.append(f"{edge_count} edges introduced, expected {expected}")
    if nice.root.bag:
        problems.append("root bag not empty")
    return problems
