import pytest

from conftest import rand_instance
from kex.core import Chain, Cycle, Exchange
from kex.errors import ModelError, ParseError
from kex.generator import make_rng
from kex.result import SolveResult
from kex.serialize import parse_instance, parse_result, write_instance, write_result


def test_parse_minimal_instance():
    doc = b'{"n":2,"altruistic":[],"edges":[[0,1],[1,0]],"l_p":0,"l_c":2,"t":2}'
    inst = parse_instance(doc)
    assert inst.graph.n == 2
    assert inst.graph.has_arc(0, 1) and inst.graph.has_arc(1, 0)
    assert (inst.l_p, inst.l_c, inst.t) == (0, 2, 2)


def test_parse_rejects_self_loop():
    doc = b'{"n":2,"altruistic":[],"edges":[[0,0]],"l_p":0,"l_c":2,"t":0}'
    with pytest.raises(ModelError, match="self-loop"):
        parse_instance(doc)


def test_parse_rejects_arc_into_altruistic():
    doc = b'{"n":2,"altruistic":[0],"edges":[[1,0]],"l_p":1,"l_c":0,"t":0}'
    with pytest.raises(ModelError, match="altruistic"):
        parse_instance(doc)


def test_parse_rejects_garbage():
    with pytest.raises(ParseError):
        parse_instance(b"not json")
    with pytest.raises(ParseError):
        parse_instance(b'{"n": 2}')
    with pytest.raises(ParseError):
        parse_instance(b'{"n":"2","altruistic":[],"edges":[],"l_p":0,"l_c":0,"t":0}')


def test_write_result_without_certificate_omits_units():
    res = SolveResult(False, 1, "brute", None, {})
    doc = write_result(res)
    assert b'"chains"' not in doc and b'"cycles"' not in doc
    assert b'"feasible":false' in doc


def test_write_result_with_empty_exchange_keeps_keys():
    res = SolveResult(True, 0, "brute", Exchange(), {})
    doc = write_result(res)
    assert b'"chains":[]' in doc and b'"cycles":[]' in doc


def test_write_result_serializes_units():
    ex = Exchange(chains=(Chain((0, 1)),), cycles=(Cycle((2, 3)),))
    doc = write_result(SolveResult(True, 3, "brute", ex, {}))
    assert b'"chains":[[0,1]]' in doc
    assert b'"cycles":[[2,3]]' in doc


def test_result_round_trip():
    ex = Exchange(chains=(Chain((0, 1)),), cycles=(Cycle((2, 3)),))
    res = SolveResult(True, 3, "tw", ex, {"runtime_ms": 1.5})
    back = parse_result(write_result(res))
    assert back.feasible == res.feasible
    assert back.value == res.value
    assert back.exchange == res.exchange
    assert back.algorithm == "tw"


def test_instance_round_trip_on_random_instances():
    rng = make_rng(2024)
    for _ in range(50):
        inst = rand_instance(rng)
        assert parse_instance(write_instance(inst)) == inst
