import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qembed.errors import CycleError, NetError, ParseError
from qembed.library import random_net
from qembed.netcore import (
    CB, MARGINALIZER, QB, Net, Node, StateSpace, cb_node, delta_matrix, pack, parse_net,
    serialize_net, topological_order, unpack, validate,
)


@given(st.lists(st.integers(1, 5), min_size=1, max_size=4), st.data())
def test_pack_unpack_roundtrip(sizes, data):
    states = [data.draw(st.integers(0, s - 1)) for s in sizes]
    k = pack(states, sizes)
    assert unpack(k, sizes) == tuple(states)


def test_pack_is_little_endian():
    # first component is least significant
    assert pack([1, 0], [2, 2]) == 1
    assert pack([0, 1], [2, 2]) == 2
    assert pack([2, 1], [3, 2]) == 5


def test_state_space_index():
    s = StateSpace(("lo", "hi"))
    assert s.index("hi") == 1
    assert s.index(0) == 0
    with pytest.raises(NetError):
        s.index("mid")
    with pytest.raises(NetError):
        StateSpace(("a", "a"))


def test_product_space_labels():
    s = StateSpace.product([StateSpace.bits(), StateSpace(("x", "y", "z"))])
    assert s.size == 6
    assert s.labels[1] == "1,x"


@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_serialize_roundtrip_random_nets(seed, n_nodes):
    net = random_net(np.random.default_rng(seed), n_nodes)
    again = parse_net(serialize_net(net))
    assert again.structurally_equal(net)
    assert serialize_net(again) == serialize_net(net)


def test_serialize_is_valid_json(lung):
    doc = json.loads(serialize_net(lung))
    assert doc["flavor"] == "cb"
    assert [n["id"] for n in doc["nodes"]] == list(lung.ids)


def test_qb_roundtrip_keeps_complex():
    s = StateSpace.bits()
    m = np.array([[1, 1j], [1j, 1]]) / np.sqrt(2)
    net = Net((Node("a", s, np.array([[1], [0]], dtype=complex)), Node("b", s, m, ("a",))), QB)
    again = parse_net(serialize_net(net))
    assert np.array_equal(again["b"].matrix, net["b"].matrix)


def test_validate_ok(lung):
    assert validate(lung).ok


def test_validate_reports_bad_column():
    net = Net((cb_node("a", [0.5, 0.6]),), CB)
    rep = validate(net)
    assert not rep.ok
    assert "stochasticity" in rep.kinds()


def test_validate_reports_cycle():
    s = StateSpace.bits()
    eye = np.eye(2)
    net = Net((Node("a", s, eye, ("b",)), Node("b", s, eye, ("a",))), CB)
    assert "cycle" in validate(net).kinds()
    with pytest.raises(CycleError):
        topological_order(net)


def test_validate_reports_dangling_parent():
    net = Net((cb_node("a", np.eye(2), ["ghost"]),), CB)
    assert "dangling-parent" in validate(net).kinds()


def test_validate_marginalizer_payload():
    s = StateSpace.bits()
    net = Net((cb_node("a", [0.5, 0.5]), Node("a_m0", s, np.full((2, 2), 0.5), ("a",), kind=MARGINALIZER)), CB)
    assert "marginalizer" in validate(net).kinds()


def test_validate_qb_unitarity():
    s = StateSpace.bits()
    bad = np.array([[1, 1], [0, 0]], dtype=complex)
    net = Net((Node("a", s, np.array([[1], [0]], dtype=complex)), Node("b", s, bad, ("a",))), QB)
    assert not validate(net).ok


def test_topological_order_tie_break(lung):
    order = topological_order(lung)
    assert order[:2] == ["a", "s"]
    pos = {k: i for i, k in enumerate(order)}
    for n in lung.nodes:
        assert all(pos[p] < pos[n.id] for p in n.parents)


@given(st.integers(0, 2**32 - 1))
def test_topological_order_respects_edges(seed):
    net = random_net(np.random.default_rng(seed), 7, max_parents=3)
    pos = {k: i for i, k in enumerate(topological_order(net))}
    for n in net.nodes:
        assert all(pos[p] < pos[n.id] for p in n.parents)


@pytest.mark.parametrize("text, fragment", [
    ("{", "line 1"),
    ('{"nodes": 3}', "nodes"),
    ('{"nodes": [{"id": "a", "states": ["0", "1"], "cpt": [[1], [0]], "parents": ["z"]}]}', "unknown parent"),
    ('{"nodes": [{"id": "a", "states": ["0", "1"], "cpt": [[1, 0], [0, 1]]}]}', "require 2x1"),
])
def test_parse_errors_have_location(text, fragment):
    with pytest.raises(ParseError) as err:
        parse_net(text)
    assert fragment in str(err.value)


def test_delta_matrix_xor():
    m = delta_matrix(2, [2, 2], lambda s: s[0] ^ s[1])
    assert m.tolist() == [[1, 0, 0, 1], [0, 1, 1, 0]]
