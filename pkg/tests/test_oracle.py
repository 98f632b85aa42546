import itertools

import pytest

from conftest import graph_of, rand_instance
from kex.core import Chain, Cycle, Instance, exchange_value, validate_exchange
from kex.errors import CapacityError
from kex.generator import make_rng
from kex.oracle import enumerate_units, max_disjoint_cover, solve_exact


def brute_force_best(catalog) -> int:
    """Independent check: try every subset of units directly."""
    best = 0
    for r in range(len(catalog.units) + 1):
        for combo in itertools.combinations(range(len(catalog.units)), r):
            used = 0
            ok = True
            for i in combo:
                if catalog.masks[i] & used:
                    ok = False
                    break
                used |= catalog.masks[i]
            if ok:
                best = max(best, sum(catalog.units[i].covered for i in combo))
    return best


def test_enumerate_two_cycle_only():
    inst = Instance(graph_of(3, [], [(1, 2), (2, 1)]), 0, 2, 0)
    cat = enumerate_units(inst)
    assert [u.vertices for u in cat.units] == [(1, 2)]


def test_enumerate_triangle_excluded_by_cap():
    inst = Instance(graph_of(4, [], [(1, 2), (2, 3), (3, 1)]), 0, 2, 0)
    assert enumerate_units(inst).units == ()


def test_enumerate_chain_prefixes():
    inst = Instance(graph_of(3, [0], [(0, 1), (1, 2)]), 2, 0, 0)
    cat = enumerate_units(inst)
    assert {u.vertices for u in cat.units} == {(0, 1), (0, 1, 2)}


def test_enumeration_cap_errs_loudly():
    g = graph_of(8, [], [(u, v) for u in range(8) for v in range(8) if u != v])
    with pytest.raises(CapacityError):
        enumerate_units(Instance(g, 0, 8, 0), cap=10)


def test_cover_empty_catalog():
    inst = Instance(graph_of(1, [], []), 0, 0, 0)
    value, ex = max_disjoint_cover(enumerate_units(inst), inst)
    assert value == 0 and ex.units() == ()


def test_cover_expected_value_computed_by_subset_brute_force():
    # Units: chain (0,1), cycle (1,2), cycle (3,4); optimum packs the cycles.
    g = graph_of(5, [0], [(0, 1), (1, 2), (2, 1), (3, 4), (4, 3)])
    inst = Instance(g, 1, 2, 0)
    cat = enumerate_units(inst)
    assert len(cat.units) == 3
    assert brute_force_best(cat) == 4
    value, ex = max_disjoint_cover(cat, inst)
    assert value == 4
    assert {c.vertices for c in ex.cycles} == {(1, 2), (3, 4)}


def test_cover_two_disjoint_two_cycles():
    g = graph_of(4, [], [(0, 1), (1, 0), (2, 3), (3, 2)])
    inst = Instance(g, 0, 2, 4)
    value, ex = max_disjoint_cover(enumerate_units(inst), inst)
    assert value == 4 and len(ex.cycles) == 2


def test_deterministic_tie_break_prefers_low_unit_indices():
    g = graph_of(3, [0], [(0, 1), (0, 2)])
    inst = Instance(g, 1, 0, 1)
    res = solve_exact(inst)
    assert res.value == 1
    assert res.exchange.chains[0].vertices == (0, 1)


def test_solve_exact_cycle_example():
    g = graph_of(4, [0], [(0, 1), (1, 2), (2, 3), (3, 1)])
    res = solve_exact(Instance(g, 2, 3, 3))
    assert res.feasible and res.value == 3
    assert res.exchange.cycles[0].vertices == (1, 2, 3)


def test_solve_exact_trivial_cases():
    assert solve_exact(Instance(graph_of(0, [], []), 0, 0, 0)).feasible
    res = solve_exact(Instance(graph_of(2, [], [(0, 1), (1, 0)]), 0, 2, 3))
    assert not res.feasible and res.value == 2


def test_oracle_matches_subset_brute_force_on_random_instances():
    rng = make_rng(99)
    for _ in range(40):
        inst = rand_instance(rng, n_max=6)
        cat = enumerate_units(inst)
        if len(cat.units) > 12:
            continue
        value, ex = max_disjoint_cover(cat, inst)
        assert value == brute_force_best(cat)
        assert validate_exchange(inst, ex) == []
        assert exchange_value(ex) == value


def test_raising_caps_never_decreases_value():
    rng = make_rng(5)
    for _ in range(30):
        inst = rand_instance(rng, n_max=7)
        base = solve_exact(inst).value
        assert solve_exact(Instance(inst.graph, inst.l_p + 1, inst.l_c, inst.t)).value >= base
        assert solve_exact(Instance(inst.graph, inst.l_p, inst.l_c + 1, inst.t)).value >= base


def test_removing_a_vertex_never_increases_value():
    rng = make_rng(6)
    for _ in range(20):
        inst = rand_instance(rng, n_max=7, n_min=2)
        base = solve_exact(inst).value
        g = inst.graph
        drop = int(rng.integers(0, g.n))
        keep = [v for v in range(g.n) if v != drop]
        remap = {old: new for new, old in enumerate(keep)}
        sub = graph_of(
            len(keep),
            [remap[b] for b in g.altruistic if b != drop],
            [(remap[u], remap[v]) for u, v in g.arcs if drop not in (u, v)],
        )
        assert solve_exact(Instance(sub, inst.l_p, inst.l_c, inst.t)).value <= base
