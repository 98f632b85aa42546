import pytest

from kex.errors import CapacityError
from kex.generator import gen_random


def test_single_altruistic_vertex_no_arcs():
    g = gen_random(1, 0, 1, seed=7)
    assert g.n == 1 and g.altruistic == {0} and not g.arcs


def test_same_seed_same_arcs():
    a = gen_random(9, 20, 2, seed=123)
    b = gen_random(9, 20, 2, seed=123)
    assert a.arcs == b.arcs
    c = gen_random(9, 20, 2, seed=124)
    assert a.arcs != c.arcs


def test_generator_output_by_direct_inspection():
    g = gen_random(6, 12, 1, seed=3)
    assert len(g.arcs) == 12
    assert all(v != 0 for _u, v in g.arcs)
    assert all(u != v for u, v in g.arcs)
    assert g.altruistic == {0}


def test_capacity_error_when_arc_space_too_small():
    # n=3, b=1: legal arcs = (3-1)*(3-1) = 4
    gen_random(3, 4, 1, seed=0)
    with pytest.raises(CapacityError):
        gen_random(3, 5, 1, seed=0)


def test_full_capacity_is_reachable():
    g = gen_random(4, 12, 0, seed=5)
    assert len(g.arcs) == 12
