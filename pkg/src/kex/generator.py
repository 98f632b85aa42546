"""Seeded random instance generation.

Randomness contract: every stream is a PCG64 generator seeded from an
explicit 64-bit seed (trial streams derive from ``SeedSequence([seed, k])``),
so runs are bit-stable across platforms and repeated invocations.
"""

from __future__ import annotations

import numpy as np

from .core import CompatibilityGraph
from .errors import CapacityError


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 stream for a 64-bit seed."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def stream_rng(seed: int, index: int) -> np.random.Generator:
    """Independent PCG64 substream for (seed, index); used for per-trial draws."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, index])))


def gen_random(n: int, m: int, b: int, seed: int) -> CompatibilityGraph:
    """Uniform random digraph skeleton with ``b`` altruistic vertices.

    Altruistic vertices are ids ``0..b-1``. Exactly ``m`` arcs are drawn
    without replacement from the legal arc space (no self-loops, no arcs
    into altruistic vertices). Deterministic for a fixed seed; caps and
    target are supplied separately by the caller.
    """
    if not (0 <= b <= n):
        raise CapacityError(f"altruistic count {b} not in [0, {n}]")
    capacity = (n - 1) * (n - b) if n > 0 else 0
    if m > capacity:
        raise CapacityError(f"requested {m} arcs but only {capacity} are legal for n={n}, b={b}")
    legal = [(u, v) for u in range(n) for v in range(b, n) if u != v]
    rng = make_rng(seed)
    picked = rng.choice(len(legal), size=m, replace=False) if m else []
    return CompatibilityGraph(n, range(b), [legal[i] for i in sorted(picked)])
