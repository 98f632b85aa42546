"""Randomized solver parameterized by the coverage target.

A preliminary deterministic search handles single units already covering
the target. Afterwards caps are clamped to t-1 and each trial colors the
vertices uniformly from a palette of 3t colors; a trial succeeds when
disjoint colorful units (no color repeated within or across units) cover
between t and 2t patients. YES answers always carry a re-validated
certificate; NO answers have one-sided error on feasible instances.
"""

from __future__ import annotations

import math
import time
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .core import Chain, Cycle, Exchange, Instance, exchange_value, validate_exchange
from .errors import CapacityError, InternalError
from .generator import stream_rng
from .oracle import enumerate_units
from .result import SolveResult

DEFAULT_PALETTE_CAP = 24
EXHAUSTIVE_N_CAP = 10


@dataclass(frozen=True)
class Coloring:
    """A full vertex coloring from a palette of ``3t`` colors."""

    palette: int
    colors: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(not (0 <= c < self.palette) for c in self.colors):
            raise InternalError("color outside palette")


def random_coloring(n: int, t: int, rng: np.random.Generator) -> Coloring:
    """Color each vertex i.i.d. uniform over 3t colors."""
    palette = 3 * t
    return Coloring(palette, tuple(int(c) for c in rng.integers(0, palette, size=n)))


def check_long_unit(instance: Instance) -> Exchange | None:
    """Deterministic search for one unit covering the whole target.

    Looks for an altruistic-rooted simple path with exactly t edges when
    l_p >= t, and for a simple cycle of length in [t, l_c] when l_c >= t.
    Callers clamp both caps to t-1 afterwards.
    """
    g = instance.graph
    t = instance.t
    if t < 1:
        return None

    if instance.l_p >= t:

        def path_dfs(path: list[int], on_path: set[int]) -> tuple[int, ...] | None:
            if len(path) == t + 1:
                return tuple(path)
            for w in g.out_adj[path[-1]]:
                if w not in on_path:
                    on_path.add(w)
                    path.append(w)
                    found = path_dfs(path, on_path)
                    path.pop()
                    on_path.remove(w)
                    if found:
                        return found
            return None

        for b in sorted(g.altruistic):
            found = path_dfs([b], {b})
            if found:
                return Exchange(chains=(Chain(found),))

    if instance.l_c >= max(t, 2):

        def cycle_dfs(anchor: int, path: list[int], on_path: set[int]) -> tuple[int, ...] | None:
            if len(path) >= max(t, 2) and g.has_arc(path[-1], anchor):
                return tuple(path)
            if len(path) >= instance.l_c:
                return None
            for w in g.out_adj[path[-1]]:
                if w > anchor and w not in on_path:
                    on_path.add(w)
                    path.append(w)
                    found = cycle_dfs(anchor, path, on_path)
                    path.pop()
                    on_path.remove(w)
                    if found:
                        return found
            return None

        for s in range(g.n):
            if s not in g.altruistic:
                found = cycle_dfs(s, [s], {s})
                if found:
                    return Exchange(cycles=(Cycle(found),))

    return None


def colorful_unit(
    instance: Instance, coloring: Coloring, color_subset: Iterable[int], i: int
) -> Chain | Cycle | None:
    """A unit with ``i`` edges, vertices colored distinctly from ``color_subset``.

    Dynamic programming over (vertex, used-color-subset) states within the
    subgraph induced by the allowed colors. The unit need not use every
    color of the subset. Chains are tried before cycles.
    """
    g = instance.graph
    allowed = frozenset(color_subset)
    colors = coloring.colors

    def in_scope(v: int) -> bool:
        return colors[v] in allowed

    if 1 <= i <= instance.l_p:
        layer: dict[tuple[int, frozenset[int]], tuple[int, frozenset[int]] | None] = {}
        for b in sorted(g.altruistic):
            if in_scope(b):
                layer[(b, frozenset([colors[b]]))] = None
        parents: list[dict] = [layer]
        for _ in range(i):
            nxt: dict = {}
            for (v, used), _parent in parents[-1].items():
                for w in g.out_adj[v]:
                    cw = colors[w]
                    if cw in allowed and cw not in used:
                        key = (w, used | {cw})
                        if key not in nxt:
                            nxt[key] = (v, used)
            parents.append(nxt)
        if parents[i]:
            v, used = sorted(parents[i])[0]
            seq = [v]
            for d in range(i, 0, -1):
                v, used = parents[d][(v, used)]
                seq.append(v)
            return Chain(tuple(reversed(seq)))

    if 2 <= i <= instance.l_c:
        for s in range(g.n):
            if s in g.altruistic or not in_scope(s):
                continue
            layer = {(s, frozenset([colors[s]])): None}
            tables = [layer]
            for _ in range(i - 1):
                nxt = {}
                for (v, used), _parent in tables[-1].items():
                    for w in g.out_adj[v]:
                        cw = colors[w]
                        if cw in allowed and cw not in used and w != s:
                            key = (w, used | {cw})
                            if key not in nxt:
                                nxt[key] = (v, used)
                tables.append(nxt)
            closing = sorted(k for k in tables[i - 1] if g.has_arc(k[0], s))
            if closing:
                v, used = closing[0]
                seq = [v]
                for d in range(i - 1, 0, -1):
                    v, used = tables[d][(v, used)]
                    seq.append(v)
                return Cycle(tuple(reversed(seq)))

    return None


class SubsetTable:
    """Reachability table over (color subset, covered count) pairs.

    ``lookup(C, t')`` answers whether disjoint colorful units whose colors
    all lie in ``C`` cover exactly ``t'`` patients. Entries with t' = 0 are
    always true; nothing positive is reachable from the empty color set.
    Parent links allow certificate traceback from the first state whose
    coverage lands in [t, 2t].
    """

    def __init__(
        self,
        palette: int,
        target: int,
        units: list[tuple[int, int, Chain | Cycle]],
        states: dict[tuple[int, int], tuple[int, int, int] | None],
        hit: tuple[int, int] | None,
    ):
        self.palette = palette
        self.target = target
        self.units = units
        self.states = states
        self.hit = hit

    def lookup(self, color_subset: Iterable[int] | int, covered: int) -> bool:
        mask = color_subset if isinstance(color_subset, int) else _mask(color_subset)
        if covered == 0:
            return True
        return any(tau == covered and (m & ~mask) == 0 for m, tau in self.states)

    def best_below_target(self) -> int:
        return max((tau for _m, tau in self.states if tau < self.target), default=0)

    def certificate(self) -> Exchange | None:
        if self.hit is None:
            return None
        chains: list[Chain] = []
        cycles: list[Cycle] = []
        key = self.hit
        while True:
            parent = self.states[key]
            if parent is None:
                break
            pm, ptau, idx = parent
            unit = self.units[idx][2]
            if isinstance(unit, Chain):
                chains.append(unit)
            else:
                cycles.append(unit)
            key = (pm, ptau)
        return Exchange(tuple(chains), tuple(cycles))


def _mask(colors: Iterable[int]) -> int:
    m = 0
    for c in colors:
        m |= 1 << c
    return m


def _colorful_catalog(
    units: list[tuple[tuple[int, ...], int, Chain | Cycle]], colors: tuple[int, ...]
) -> list[tuple[int, int, Chain | Cycle]]:
    out = []
    seen: set[tuple[int, int]] = set()
    for vertices, covered, unit in units:
        palette_used = {colors[v] for v in vertices}
        if len(palette_used) != len(vertices):
            continue
        key = (_mask(palette_used), covered)
        if key in seen:
            continue
        seen.add(key)
        out.append((key[0], covered, unit))
    return out


def _reach(
    colorful: list[tuple[int, int, Chain | Cycle]], t: int, stop_early: bool
) -> tuple[dict, tuple[int, int] | None]:
    states: dict[tuple[int, int], tuple[int, int, int] | None] = {(0, 0): None}
    queue: deque[tuple[int, int]] = deque([(0, 0)])
    hit: tuple[int, int] | None = None
    while queue:
        state_mask, tau = queue.popleft()
        for idx, (m, c, _unit) in enumerate(colorful):
            if m & state_mask:
                continue
            ntau = tau + c
            if ntau > 2 * t:
                continue
            key = (state_mask | m, ntau)
            if key in states:
                continue
            states[key] = (state_mask, tau, idx)
            if ntau >= t:
                if hit is None:
                    hit = key
                if stop_early:
                    return states, hit
            else:
                queue.append(key)
    return states, hit


def build_subset_table(
    instance: Instance, coloring: Coloring, stop_early: bool = False, unit_cap: int = 10**6
) -> SubsetTable:
    """Build the full reachability table for one coloring of ``instance``.

    ``instance`` is expected to carry already-clamped caps; every feasible
    unit is enumerated once and filtered down to the colorful ones.
    """
    catalog = enumerate_units(instance, cap=unit_cap)
    units = [(u.vertices, u.covered, u) for u in catalog.units]
    colorful = _colorful_catalog(units, coloring.colors)
    states, hit = _reach(colorful, instance.t, stop_early)
    return SubsetTable(coloring.palette, instance.t, colorful, states, hit)


def _pattern(colors: tuple[int, ...]) -> tuple[int, ...]:
    # Canonical color pattern: the decision is invariant under palette
    # permutation, so trials memoize on this key.
    remap: dict[int, int] = {}
    out = []
    for c in colors:
        if c not in remap:
            remap[c] = len(remap)
        out.append(remap[c])
    return tuple(out)


def _partition_patterns(n: int, max_blocks: int) -> Iterator[tuple[int, ...]]:
    # Restricted growth strings: each set partition with <= max_blocks blocks
    # appears exactly once, in canonical form.
    if n == 0:
        yield ()
        return
    cur: list[int] = []

    def rec(i: int, mx: int) -> Iterator[tuple[int, ...]]:
        if i == n:
            yield tuple(cur)
            return
        for c in range(min(mx + 1, max_blocks - 1) + 1):
            cur.append(c)
            yield from rec(i + 1, max(mx, c))
            cur.pop()

    yield from rec(0, -1)


def solve_colorcoding(
    instance: Instance,
    trials: int | None = None,
    seed: int = 0,
    exhaustive: bool = False,
    palette_cap: int = DEFAULT_PALETTE_CAP,
    unit_cap: int = 10**6,
) -> SolveResult:
    """Randomized decision with verified YES certificates.

    Default trial count is ceil(e^(3t)), capped by ``trials`` when given.
    In exhaustive mode every distinct coloring pattern is evaluated instead
    (small n only), which makes the decision deterministic and exact.
    """
    start = time.perf_counter()
    t = instance.t

    def finish(result: SolveResult) -> SolveResult:
        result.stats["runtime_ms"] = (time.perf_counter() - start) * 1e3
        return result

    if t == 0:
        return finish(SolveResult(True, 0, "color", Exchange(), {"trials_used": 0}))

    long_unit = check_long_unit(instance)
    if long_unit is not None:
        if validate_exchange(instance, long_unit):
            raise InternalError("long-unit search produced an invalid exchange")
        return finish(
            SolveResult(True, exchange_value(long_unit), "color", long_unit, {"trials_used": 0})
        )

    clamped = Instance(instance.graph, min(instance.l_p, t - 1), min(instance.l_c, t - 1), t)
    catalog = enumerate_units(clamped, cap=unit_cap)
    units = [(u.vertices, u.covered, u) for u in catalog.units]
    n = instance.graph.n
    palette = 3 * t

    def evaluate(colors: tuple[int, ...]) -> tuple[Exchange | None, int]:
        colorful = _colorful_catalog(units, colors)
        states, hit = _reach(colorful, t, stop_early=True)
        if hit is not None:
            table = SubsetTable(palette, t, colorful, states, hit)
            return table.certificate(), 0
        below = max(tau for _m, tau in states)
        return None, below

    if exhaustive:
        if n > EXHAUSTIVE_N_CAP:
            raise CapacityError(f"exhaustive coloring mode supports n <= {EXHAUSTIVE_N_CAP}")
        best_below = 0
        patterns = 0
        for pattern in _partition_patterns(n, min(palette, n) if n else 1):
            patterns += 1
            cert, below = evaluate(pattern)
            if cert is not None:
                if validate_exchange(instance, cert):
                    raise InternalError("colorcoding certificate failed validation")
                return finish(
                    SolveResult(
                        True, exchange_value(cert), "color", cert,
                        {"trials_used": 0, "patterns": patterns, "mode": "exhaustive"},
                    )
                )
            best_below = max(best_below, below)
        return finish(
            SolveResult(
                False, best_below, "color", None,
                {"trials_used": 0, "patterns": patterns, "mode": "exhaustive"},
            )
        )

    if palette > palette_cap:
        raise CapacityError(f"palette {palette} exceeds cap {palette_cap} (target too large)")
    default_trials = math.ceil(math.exp(min(3 * t, 700)))
    effective = default_trials if trials is None else min(trials, default_trials)
    if effective < 1:
        effective = 1

    cache: dict[tuple[int, ...], tuple[Exchange | None, int]] = {}
    best_below = 0
    for k in range(effective):
        coloring = random_coloring(n, t, stream_rng(seed, k))
        pattern = _pattern(coloring.colors)
        if pattern in cache:
            cert, below = cache[pattern]
        else:
            cert, below = evaluate(pattern)
            cache[pattern] = (cert, below)
        if cert is not None:
            if validate_exchange(instance, cert):
                raise InternalError("colorcoding certificate failed validation")
            return finish(
                SolveResult(
                    True, exchange_value(cert), "color", cert,
                    {"trials_used": k + 1, "mode": "randomized"},
                )
            )
        best_below = max(best_below, below)
    return finish(
        SolveResult(
            False, best_below, "color", None,
            {"trials_used": effective, "mode": "randomized"},
        )
    )
