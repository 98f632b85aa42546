"""Shared helpers for seeded random sweeps."""

from __future__ import annotations

import numpy as np

from kex.core import CompatibilityGraph, Instance
from kex.generator import gen_random, make_rng


def rand_instance(
    rng: np.random.Generator,
    n_max: int = 8,
    m_factor: float = 2.0,
    b_max: int = 3,
    cap_max: int = 4,
    t_max: int = 6,
    n_min: int = 1,
) -> Instance:
    """One seeded random instance; sparse by default so every solver is fast."""
    n = int(rng.integers(n_min, n_max + 1))
    b = int(rng.integers(0, min(n, b_max) + 1))
    capacity = (n - 1) * (n - b)
    m = int(rng.integers(0, min(capacity, int(m_factor * n)) + 1))
    graph = gen_random(n, m, b, seed=int(rng.integers(0, 2**63)))
    l_p = int(rng.integers(0, cap_max + 1))
    l_c = int(rng.integers(0, cap_max + 1))
    t = int(rng.integers(0, t_max + 1))
    return Instance(graph, l_p, l_c, t)


def graph_of(n: int, altruistic: list[int], arcs: list[tuple[int, int]]) -> CompatibilityGraph:
    return CompatibilityGraph(n, altruistic, arcs)
