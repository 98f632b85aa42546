"""Exact solver by dynamic programming over a nice tree decomposition.

Table indexes describe, for the current bag, how an in-progress subgraph H
(disjoint paths and cycles under the length caps) meets the bag: bag
vertices not in H form an idle set; the rest partition into blocks, one per
piece of H touching the bag. A block records the bag vertices in piece
order, the in-bag arcs of the piece, whether the piece is a finished cycle
or a still-open path, its total edge count so far, its altruistic count,
and whether its true start/end sit inside the bag. Values count arcs of H;
at the empty root bag every piece is complete and arcs equal patients
covered, so the root value is the clearing optimum.

Indexes that can never complete (an open path whose start is forgotten and
non-altruistic, or any length-cap breach) are dropped instead of stored.
"""

from __future__ import annotations

import time
from typing import Iterable

from .core import Chain, Cycle, Exchange, Instance, exchange_value, validate_exchange
from .errors import CapacityError, InternalError
from .result import SolveResult
from .treedecomp import (
    NiceDecomposition,
    TreeDecomposition,
    make_nice,
    nice_invariants,
    tree_decomposition,
    validate_decomposition,
)

PATH = 0
CYC = 1
DONE = -2  # definite endpoint: the piece truly starts/ends at this bag vertex
STUB = -3  # the piece continues into already-forgotten vertices
STUB_NONE = -1  # block start/end marker: endpoint not in the bag

DEFAULT_TABLE_CAP = 10**6

Block = tuple  # (q, arcs, kind, length, altruistic, start, end)
Key = tuple


def _rotate_min(q: tuple[int, ...]) -> tuple[int, ...]:
    k = q.index(min(q))
    return q[k:] + q[:k]


def _put(table: dict, key: Key, value: int, trace: tuple) -> None:
    cur = table.get(key)
    if cur is None or value > cur[0]:
        table[key] = (value, trace)


def _leaf_table() -> dict:
    return {(): (0, ("leaf",))}


def _intro_table(child: dict, w: int, altruistic: frozenset[int]) -> dict:
    out: dict = {}
    fresh = ((w,), (), PATH, 0, 1 if w in altruistic else 0, w, w)
    for key, (val, _tr) in sorted(child.items()):
        _put(out, key, val, ("child", key))
        _put(out, tuple(sorted(key + (fresh,))), val, ("child", key))
    return out


def _forget_table(child: dict, w: int) -> dict:
    out: dict = {}
    for key, (val, _tr) in sorted(child.items()):
        idx = next((i for i, b in enumerate(key) if w in b[0]), None)
        if idx is None:
            _put(out, key, val, ("child", key))
            continue
        q, arcs, kind, length, alt, s, e = key[idx]
        rest = key[:idx] + key[idx + 1 :]
        if len(q) == 1:
            # The piece leaves the bag entirely: it must be complete now.
            if (kind == PATH and alt == 1) or kind == CYC:
                _put(out, rest, val, ("child", key))
            continue
        q2 = tuple(v for v in q if v != w)
        arcs2 = tuple(a for a in arcs if w not in a)
        if kind == PATH:
            s2 = STUB_NONE if s == w else s
            e2 = STUB_NONE if e == w else e
            if alt == 0 and s2 == STUB_NONE:
                continue  # start is forgotten and non-altruistic: unfixable
            blk = (q2, arcs2, PATH, length, alt, s2, e2)
        else:
            blk = (_rotate_min(q2), arcs2, CYC, length, 0, STUB_NONE, STUB_NONE)
        _put(out, tuple(sorted(rest + (blk,))), val, ("child", key))
    return out


def _block_caps_ok(kind: int, length: int, alt: int, instance: Instance) -> bool:
    if length > max(instance.l_p, instance.l_c):
        return False
    if kind == CYC and (length < 2 or length > instance.l_c):
        return False
    if alt == 1 and length > instance.l_p:
        return False
    return True


def _apply_arc(key: Key, arc: tuple[int, int], instance: Instance) -> Key | None:
    u, v = arc
    iu = next((i for i, b in enumerate(key) if u in b[0]), None)
    iv = next((i for i, b in enumerate(key) if v in b[0]), None)
    if iu is None or iv is None:
        return None
    if iu == iv:
        q, arcs, kind, length, alt, s, e = key[iu]
        if kind != PATH or e != u or s != v or alt != 0:
            return None
        if not _block_caps_ok(CYC, length + 1, 0, instance):
            return None
        blk = (_rotate_min(q), tuple(sorted(arcs + (arc,))), CYC, length + 1, 0, STUB_NONE, STUB_NONE)
        rest = key[:iu] + key[iu + 1 :]
        return tuple(sorted(rest + (blk,)))
    qu, arcsu, ku, lu, au, su, eu = key[iu]
    qv, arcsv, kv, lv, av, sv, ev = key[iv]
    if ku != PATH or kv != PATH or eu != u or sv != v or av != 0:
        return None
    if not _block_caps_ok(PATH, lu + lv + 1, au, instance):
        return None
    blk = (qu + qv, tuple(sorted(arcsu + arcsv + (arc,))), PATH, lu + lv + 1, au, su, ev)
    rest = tuple(b for i, b in enumerate(key) if i not in (iu, iv))
    return tuple(sorted(rest + (blk,)))


def _intro_edge_table(child: dict, edge: tuple[int, int], instance: Instance) -> dict:
    x, y = edge
    graph = instance.graph
    arcs = [a for a in ((x, y), (y, x)) if graph.has_arc(*a)]
    frontier: dict[Key, tuple[int, Key, tuple]] = {
        key: (val, key, ()) for key, (val, _tr) in child.items()
    }
    for arc in arcs:
        additions = []
        for key, (val, ckey, used) in sorted(frontier.items()):
            nkey = _apply_arc(key, arc, instance)
            if nkey is not None:
                additions.append((nkey, val + 1, ckey, used + (arc,)))
        for nkey, nval, ckey, used in additions:
            cur = frontier.get(nkey)
            if cur is None or nval > cur[0]:
                frontier[nkey] = (nval, ckey, used)
    out: dict = {}
    for key, (val, ckey, used) in sorted(frontier.items()):
        _put(out, key, val, ("edge", ckey, used))
    return out


def _links(key: Key) -> tuple[dict, dict, dict]:
    """Per bag vertex: successor, predecessor, and owning block index.

    Successor/predecessor values are a bag vertex, DONE (the piece truly
    starts/ends here) or STUB (the piece continues through forgotten
    vertices of this child).
    """
    nxt: dict[int, int] = {}
    prv: dict[int, int] = {}
    owner: dict[int, int] = {}
    for bi, (q, _arcs, kind, _length, _alt, s, e) in enumerate(key):
        for i, v in enumerate(q):
            owner[v] = bi
            if kind == CYC:
                nxt[v] = q[(i + 1) % len(q)]
                prv[v] = q[(i - 1) % len(q)]
            else:
                nxt[v] = q[i + 1] if i + 1 < len(q) else (DONE if e == v else STUB)
                prv[v] = q[i - 1] if i > 0 else (DONE if s == v else STUB)
    return nxt, prv, owner


def _fuse(
    k1: Key,
    links1: tuple[dict, dict, dict],
    k2: Key,
    links2: tuple[dict, dict, dict],
    instance: Instance,
) -> Key | None:
    """Union of two child configurations on the same bag, or None if illegal."""
    nxt1, prv1, own1 = links1
    nxt2, prv2, own2 = links2
    verts = sorted(own1)
    altruistic = instance.graph.altruistic

    nxt: dict[int, int] = {}
    prv: dict[int, int] = {}
    for v in verts:
        outs = [x for x in (nxt1[v], nxt2[v]) if x != DONE]
        if len(outs) == 2:
            return None
        nxt[v] = outs[0] if outs else DONE
        ins = [x for x in (prv1[v], prv2[v]) if x != DONE]
        if len(ins) == 2:
            return None
        prv[v] = ins[0] if ins else DONE

    def piece_block(seq: list[int], closed: bool, s_end: int, e_end: int) -> Block | None:
        parts = {(1, own1[v]) for v in seq} | {(2, own2[v]) for v in seq}
        length = 0
        alt_sum = 0
        arcs: list[tuple[int, int]] = []
        for side, bi in parts:
            q, a_arcs, _kind, blen, balt, _s, _e = (k1 if side == 1 else k2)[bi]
            length += blen
            alt_sum += balt
            arcs.extend(a_arcs)
        alt_total = alt_sum - sum(1 for v in seq if v in altruistic)
        if closed:
            if alt_total != 0 or not _block_caps_ok(CYC, length, 0, instance):
                return None
            return (_rotate_min(tuple(seq)), tuple(sorted(arcs)), CYC, length, 0, STUB_NONE, STUB_NONE)
        if alt_total not in (0, 1):
            return None
        if alt_total == 0 and s_end == STUB_NONE:
            return None  # unfixable open path
        if not _block_caps_ok(PATH, length, alt_total, instance):
            return None
        return (tuple(seq), tuple(sorted(arcs)), PATH, length, alt_total, s_end, e_end)

    blocks: list[Block] = []
    visited: set[int] = set()
    for v0 in verts:
        if v0 in visited or prv[v0] >= 0:
            continue
        seq = [v0]
        visited.add(v0)
        cur = v0
        while nxt[cur] >= 0:
            cur = nxt[cur]
            if cur in visited:
                return None
            seq.append(cur)
            visited.add(cur)
        blk = piece_block(
            seq,
            closed=False,
            s_end=v0 if prv[v0] == DONE else STUB_NONE,
            e_end=cur if nxt[cur] == DONE else STUB_NONE,
        )
        if blk is None:
            return None
        blocks.append(blk)
    for v0 in verts:
        if v0 in visited:
            continue
        seq = [v0]
        visited.add(v0)
        cur = nxt[v0]
        while cur != v0:
            if cur < 0 or cur in visited:
                return None
            seq.append(cur)
            visited.add(cur)
            cur = nxt[cur]
        blk = piece_block(seq, closed=True, s_end=STUB_NONE, e_end=STUB_NONE)
        if blk is None:
            return None
        blocks.append(blk)
    return tuple(sorted(blocks))


def _join_table(t1: dict, t2: dict, instance: Instance) -> dict:
    def bucket(table: dict) -> dict[frozenset[int], list[Key]]:
        buckets: dict[frozenset[int], list[Key]] = {}
        for key in table:
            vs = frozenset(v for b in key for v in b[0])
            buckets.setdefault(vs, []).append(key)
        return buckets

    b1 = bucket(t1)
    b2 = bucket(t2)
    links_cache: dict[tuple[int, Key], tuple] = {}
    out: dict = {}
    for vs in sorted(b1.keys() & b2.keys(), key=sorted):
        keys1 = sorted(b1[vs])
        keys2 = sorted(b2[vs])
        for k1 in keys1:
            l1 = links_cache.get((1, k1))
            if l1 is None:
                l1 = _links(k1)
                links_cache[(1, k1)] = l1
            for k2 in keys2:
                l2 = links_cache.get((2, k2))
                if l2 is None:
                    l2 = _links(k2)
                    links_cache[(2, k2)] = l2
                fused = _fuse(k1, l1, k2, l2, instance)
                if fused is None:
                    continue
                _put(out, fused, t1[k1][0] + t2[k2][0], ("join", k1, k2))
    return out


def _collect_arcs(nice: NiceDecomposition, tables: dict[int, dict]) -> list[tuple[int, int]]:
    arcs: list[tuple[int, int]] = []
    stack: list[tuple] = [(nice.root, ())]
    while stack:
        node, key = stack.pop()
        _val, trace = tables[node.uid][key]
        tag = trace[0]
        if tag == "leaf":
            continue
        if tag == "child":
            stack.append((node.children[0], trace[1]))
        elif tag == "edge":
            arcs.extend(trace[2])
            stack.append((node.children[0], trace[1]))
        elif tag == "join":
            stack.append((node.children[0], trace[1]))
            stack.append((node.children[1], trace[2]))
    return arcs


def _exchange_from_arcs(arcs: Iterable[tuple[int, int]], instance: Instance) -> Exchange:
    succ: dict[int, int] = {}
    pred: dict[int, int] = {}
    for u, v in arcs:
        if u in succ or v in pred:
            raise InternalError("traceback arcs do not form disjoint paths and cycles")
        succ[u] = v
        pred[v] = u
    chains: list[Chain] = []
    cycles: list[Cycle] = []
    visited: set[int] = set()
    for u in sorted(succ):
        if u in pred or u in visited:
            continue
        seq = [u]
        visited.add(u)
        cur = u
        while cur in succ:
            cur = succ[cur]
            seq.append(cur)
            visited.add(cur)
        chains.append(Chain(tuple(seq)))
    for u in sorted(succ):
        if u in visited:
            continue
        seq = [u]
        visited.add(u)
        cur = succ[u]
        while cur != u:
            seq.append(cur)
            visited.add(cur)
            cur = succ[cur]
        cycles.append(Cycle(tuple(seq)))
    return Exchange(tuple(chains), tuple(cycles))


def dp_solve(instance: Instance, nice: NiceDecomposition, cap: int = DEFAULT_TABLE_CAP) -> SolveResult:
    """Bottom-up evaluation; feasible iff the root optimum reaches the target."""
    start = time.perf_counter()
    tables: dict[int, dict] = {}
    max_table = 0
    for node in nice.nodes():
        if node.kind == "leaf":
            table = _leaf_table()
        elif node.kind == "intro":
            table = _intro_table(tables[node.children[0].uid], node.vertex, instance.graph.altruistic)
        elif node.kind == "forget":
            table = _forget_table(tables[node.children[0].uid], node.vertex)
        elif node.kind == "intro_edge":
            table = _intro_edge_table(tables[node.children[0].uid], node.edge, instance)
        elif node.kind == "join":
            table = _join_table(tables[node.children[0].uid], tables[node.children[1].uid], instance)
        else:
            raise InternalError(f"unknown node kind {node.kind}")
        if len(table) > cap:
            raise CapacityError(f"DP table size {len(table)} exceeds cap {cap}")
        max_table = max(max_table, len(table))
        tables[node.uid] = table

    value, _trace = tables[nice.root.uid][()]
    exchange = _exchange_from_arcs(_collect_arcs(nice, tables), instance)
    if validate_exchange(instance, exchange):
        raise InternalError("treewidth solver produced an invalid exchange")
    if exchange_value(exchange) != value:
        raise InternalError("treewidth certificate value mismatch")
    return SolveResult(
        feasible=value >= instance.t,
        value=value,
        algorithm="tw",
        exchange=exchange,
        stats={
            "runtime_ms": (time.perf_counter() - start) * 1e3,
            "width": nice.width,
            "nodes": len(nice.nodes()),
            "max_table": max_table,
        },
    )


def solve_treewidth(
    instance: Instance, td: TreeDecomposition | None = None, cap: int = DEFAULT_TABLE_CAP
) -> SolveResult:
    """Build (or validate) a decomposition, make it nice, and run the DP."""
    if td is None:
        td = tree_decomposition(instance.graph)
    else:
        problems = validate_decomposition(td, instance.graph)
        if problems:
            raise InternalError("supplied tree decomposition invalid: " + "; ".join(problems))
    nice = make_nice(td, instance.graph)
    problems = nice_invariants(nice, instance.graph)
    if problems:
        raise InternalError("nice decomposition invalid: " + "; ".join(problems))
    return dp_solve(instance, nice, cap=cap)
