from conftest import graph_of, rand_instance
from kex.core import Instance, exchange_value, validate_exchange
from kex.generator import make_rng
from kex.kernel import greedy_maximal_cover, kernelize, removable_vertices, trivial_yes_check
from kex.oracle import enumerate_units, solve_exact


def test_vertex_beyond_path_cap_is_removable():
    g = graph_of(4, [0], [(0, 1), (1, 2), (2, 3)])
    assert removable_vertices(Instance(g, 2, 0, 1)) == {3}


def test_two_cycle_vertices_not_removable():
    g = graph_of(2, [], [(0, 1), (1, 0)])
    assert removable_vertices(Instance(g, 0, 2, 1)) == set()


def test_isolated_altruistic_vertex_removable():
    g = graph_of(2, [0], [])
    assert 0 in removable_vertices(Instance(g, 3, 3, 1))


def test_kernelize_identity_when_nothing_removable():
    g = graph_of(2, [], [(0, 1), (1, 0)])
    inst = Instance(g, 0, 2, 2)
    reduced, report = kernelize(inst)
    assert reduced.graph == g
    assert report.kept == {0: 0, 1: 1}
    assert not report.removed


def test_kernelize_shrinks_and_preserves_decision():
    g = graph_of(4, [0], [(0, 1), (1, 2), (2, 3)])
    inst = Instance(g, 2, 0, 2)
    reduced, report = kernelize(inst)
    assert reduced.graph.n == 3
    assert report.removed == {3}
    assert solve_exact(inst).feasible == solve_exact(reduced).feasible


def test_kernel_equifeasibility_idempotence_and_no_survivors():
    rng = make_rng(41)
    for _ in range(60):
        inst = rand_instance(rng)
        reduced, report = kernelize(inst)
        assert solve_exact(inst).feasible == solve_exact(reduced).feasible
        assert removable_vertices(reduced) == set()
        again, _rep = kernelize(reduced)
        assert again == reduced
        if report.shortcut is not None:
            assert validate_exchange(reduced, report.shortcut) == []
            assert exchange_value(report.shortcut) >= inst.t
        else:
            assert reduced.graph.n <= report.bound


def test_greedy_takes_both_disjoint_two_cycles():
    g = graph_of(4, [], [(0, 1), (1, 0), (2, 3), (3, 2)])
    ex = greedy_maximal_cover(Instance(g, 0, 2, 0))
    assert exchange_value(ex) == 4


def test_greedy_on_empty_graph():
    ex = greedy_maximal_cover(Instance(graph_of(0, [], []), 3, 3, 0))
    assert ex.units() == ()


def test_greedy_can_be_suboptimal_but_is_maximal():
    # Shortest-first takes chain (0,1), blocking the 2-edge chain through 2,3.
    g = graph_of(4, [0], [(0, 1), (0, 2), (2, 3)])
    inst = Instance(g, 2, 0, 0)
    ex = greedy_maximal_cover(inst)
    assert exchange_value(ex) == 1
    assert solve_exact(inst).value == 2
    # Maximality: the residual graph admits no unit at all.
    used = {v for u in ex.units() for v in u.vertices}
    keep = [v for v in range(4) if v not in used]
    remap = {old: new for new, old in enumerate(keep)}
    residual = graph_of(
        len(keep),
        [remap[b] for b in g.altruistic if b in remap],
        [(remap[u], remap[v]) for u, v in g.arcs if u in remap and v in remap],
    )
    assert enumerate_units(Instance(residual, inst.l_p, inst.l_c, 0)).units == ()


def test_trivial_yes_cases():
    g = graph_of(2, [], [(0, 1), (1, 0)])
    res = trivial_yes_check(Instance(g, 0, 2, 0))
    assert res is not None and res.feasible and res.exchange.units() == ()

    res = trivial_yes_check(Instance(g, 0, 2, 2))
    assert res is not None and res.value == 2

    assert trivial_yes_check(Instance(g, 0, 2, 3)) is None
