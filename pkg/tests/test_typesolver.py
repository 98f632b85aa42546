from collections import Counter

import pytest

from conftest import graph_of, rand_instance
from kex.core import Instance, exchange_value, validate_exchange
from kex.errors import PreconditionError
from kex.generator import make_rng
from kex.oracle import solve_exact
from kex.typesolver import (
    build_ilp,
    compute_types,
    enumerate_signatures,
    prune_mixed_types,
    reconstruct,
    solve_ilp,
    solve_types,
)


def test_same_neighborhoods_same_class():
    g = graph_of(4, [0], [(0, 1), (0, 2), (1, 3), (2, 3)])
    part = compute_types(g)
    assert part.type_of[1] == part.type_of[2]
    assert part.type_of[0] != part.type_of[1]


def test_empty_graph_single_class():
    part = compute_types(graph_of(3, [], []))
    assert part.num_types == 1 and part.classes == ((0, 1, 2),)


def test_directed_path_three_singleton_classes():
    part = compute_types(graph_of(3, [], [(0, 1), (1, 2)]))
    assert part.num_types == 3


def test_class_adjacency_all_or_nothing():
    rng = make_rng(13)
    for _ in range(30):
        inst = rand_instance(rng, n_max=7)
        g = inst.graph
        part = compute_types(g)
        for a in range(part.num_types):
            for b in range(part.num_types):
                hits = sum(
                    1 for u in part.classes[a] for v in part.classes[b] if g.has_arc(u, v)
                )
                if part.class_adj[a][b]:
                    assert hits == len(part.classes[a]) * len(part.classes[b])
                else:
                    assert hits == 0


def test_prune_drops_inbound_isolated_twin_of_altruistic():
    # Vertex 1 shares (empty in-set, {2} out-set) with altruistic 0.
    g = graph_of(3, [0], [(0, 2), (1, 2)])
    inst = Instance(g, 1, 1, 1)
    pruned, keep = prune_mixed_types(inst, compute_types(g))
    assert keep == [0, 2]
    assert pruned.graph.n == 2


def test_prune_identity_without_mixed_classes():
    g = graph_of(2, [0], [(0, 1)])
    inst = Instance(g, 1, 1, 1)
    pruned, keep = prune_mixed_types(inst, compute_types(g))
    assert keep == [0, 1] and pruned.graph == g


def test_prune_preserves_oracle_value():
    rng = make_rng(47)
    for _ in range(50):
        inst = rand_instance(rng, n_max=7)
        pruned, _keep = prune_mixed_types(inst, compute_types(inst.graph))
        assert solve_exact(inst).value == solve_exact(pruned).value


def test_enumerate_single_path_signature():
    # One altruistic class (size 1) feeding one patient class (size 2).
    g = graph_of(3, [0], [(0, 1), (0, 2)])
    inst = Instance(g, 2, 3, 1)
    part = compute_types(g)
    sigs = enumerate_signatures(inst, part)
    assert len(sigs) == 1
    assert sigs[0].kind == "path" and len(sigs[0].seq) == 2


def test_enumerate_includes_two_class_cycle():
    g = graph_of(2, [], [(0, 1), (1, 0)])
    inst = Instance(g, 0, 2, 1)
    sigs = enumerate_signatures(inst, compute_types(g))
    assert any(s.kind == "cycle" and len(s.seq) == 2 for s in sigs)


def test_multiplicity_bound_excludes_overuse():
    # Classes alternate; a 4-cycle signature would need 2 vertices per class,
    # but one class has only 1.
    g = graph_of(3, [], [(0, 1), (1, 0), (1, 2), (2, 1)])
    inst = Instance(g, 0, 4, 1)
    part = compute_types(g)
    sigs = enumerate_signatures(inst, part)
    for s in sigs:
        for cls, used in Counter(s.seq).items():
            assert used <= part.size(cls)


def test_build_ilp_single_signature():
    g = graph_of(3, [0], [(0, 1), (0, 2)])
    inst = Instance(g, 2, 3, 1)
    part = compute_types(g)
    model = build_ilp(enumerate_signatures(inst, part), part)
    assert model.objective == (1,)
    alt_cls = part.type_of[0]
    assert model.usage[0][alt_cls] == 1
    assert model.class_sizes[alt_cls] == 1


def test_build_ilp_empty():
    g = graph_of(1, [], [])
    inst = Instance(g, 0, 0, 0)
    part = compute_types(g)
    model = build_ilp([], part)
    assert solve_ilp(model) == (0, ())


def test_ilp_coefficients_match_hand_count():
    g = graph_of(4, [0], [(0, 1), (0, 2), (1, 3), (2, 3)])
    inst = Instance(g, 2, 2, 1)
    part = compute_types(g)
    sigs = enumerate_signatures(inst, part)
    model = build_ilp(sigs, part)
    for sig, usage in zip(model.signatures, model.usage):
        assert usage == dict(Counter(sig.seq))


def test_ilp_single_variable():
    g = graph_of(2, [0], [(0, 1)])
    inst = Instance(g, 1, 1, 1)
    part = compute_types(g)
    model = build_ilp(enumerate_signatures(inst, part), part)
    value, assign = solve_ilp(model)
    assert value == 1 and assign == (1,)


def test_ilp_prefers_larger_objective_on_conflict():
    # Chain can reach one or two patients; both consume altruistic class 0.
    g = graph_of(3, [0], [(0, 1), (1, 2)])
    inst = Instance(g, 2, 2, 2)
    part = compute_types(g)
    sigs = enumerate_signatures(inst, part)
    model = build_ilp(sigs, part)
    value, assign = solve_ilp(model)
    assert value == 2
    chosen = [s for s, x in zip(model.signatures, assign) if x]
    assert chosen and max(s.covered for s in chosen) == 2


def test_reconstruct_tiny_and_empty():
    g = graph_of(3, [0], [(0, 1), (0, 2)])
    inst = Instance(g, 2, 3, 1)
    part = compute_types(g)
    sigs = tuple(enumerate_signatures(inst, part))
    ex = reconstruct(sigs, (1,), part)
    assert exchange_value(ex) == 1 and validate_exchange(inst, ex) == []
    assert reconstruct(sigs, (0,), part).units() == ()


def test_precondition_rejects_longer_paths_than_cycles():
    g = graph_of(2, [0], [(0, 1)])
    with pytest.raises(PreconditionError, match="l_p <= l_c"):
        solve_types(Instance(g, 3, 2, 1))


def test_t_zero_feasible():
    assert solve_types(Instance(graph_of(1, [], []), 0, 0, 0)).feasible


def test_solve_types_matches_oracle_and_reconstruction_closes():
    rng = make_rng(53)
    checked = 0
    while checked < 60:
        inst = rand_instance(rng, n_max=7)
        if inst.l_p > inst.l_c:
            continue
        checked += 1
        res = solve_types(inst)
        expected = solve_exact(inst).value
        assert res.value == expected
        assert res.exchange is not None
        assert exchange_value(res.exchange) == res.value
        assert validate_exchange(inst, res.exchange) == []


def test_structural_length_cap_preserves_optimum():
    # Capping unit lengths at (number of types + 3) never loses value
    # when l_p <= l_c.
    rng = make_rng(59)
    checked = 0
    while checked < 30:
        inst = rand_instance(rng, n_max=7, cap_max=7)
        if inst.l_p > inst.l_c:
            continue
        checked += 1
        theta = compute_types(inst.graph).num_types
        capped = Instance(
            inst.graph, min(inst.l_p, theta + 3), min(inst.l_c, theta + 3), inst.t
        )
        assert solve_exact(capped).value == solve_exact(inst).value
