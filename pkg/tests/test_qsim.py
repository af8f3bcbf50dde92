import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from qembed import gates
from qembed.embedding import embed_cbnet
from qembed.errors import CapError, NetError
from qembed.inference import exact_joint, marginal
from qembed.library import chain_net, random_net
from qembed.netcore import QB, Net, Node, StateSpace
from qembed.qsim import (
    StateVector, apply_all, apply_operator, embedded_joint, estimate_conditional, leaf_distribution,
    naive_leaf_distribution, sample_leaves, story_amplitude, verify_net_embedding,
)


@given(st.integers(0, 2**32 - 1), st.sampled_from([0.0, 0.4]))
def test_pruned_matches_naive(seed, zero_prob):
    cb = random_net(np.random.default_rng(seed), 3, max_states=2, zero_prob=zero_prob)
    qb, _ = embed_cbnet(cb)
    assume(qb.packed_bits() <= 13)
    fast = leaf_distribution(qb)
    slow = naive_leaf_distribution(qb)
    assert fast.scope == slow.scope
    assert np.abs(fast.amplitudes - slow.amplitudes).max() < 1e-12


def test_interference_sums_before_squaring():
    # H then H on one bit: the two paths to |1> cancel
    s = StateSpace.bits()
    net = Net((Node("a", s, np.array([[1], [0]], dtype=complex)),
               Node("b", s, gates.H1, ("a",)),
               Node("c", s, gates.H1, ("b",))), QB)
    d = leaf_distribution(net)
    assert d.scope == ("c",)
    assert d.probs[0] == pytest.approx(1.0, abs=1e-15)
    assert d.probs[1] == pytest.approx(0.0, abs=1e-15)


def test_story_amplitude(scattering):
    qb, _ = embed_cbnet(scattering)
    zero = {i: 0 for i in qb.ids}
    amp = story_amplitude(qb, zero)
    a, b, x = (scattering[k].matrix for k in "abx")
    c, d = scattering["c"].matrix, scattering["d"].matrix
    want = math.sqrt(a[0, 0] * b[0, 0] * x[0, 0] * c[0, 0] * d[0, 0])
    assert amp == pytest.approx(want, abs=1e-15)
    with pytest.raises(NetError):
        story_amplitude(qb, {"a": 0})


def test_leaf_total_is_one(lung):
    qb, _ = embed_cbnet(lung)
    assert leaf_distribution(qb).total == pytest.approx(1.0, abs=1e-12)


def test_cap_is_enforced(lung):
    qb, _ = embed_cbnet(lung)
    with pytest.raises(CapError):
        leaf_distribution(qb, cap=64)


def test_long_chain_stays_small():
    cb = chain_net(12, flip=0.1)
    qb, leafmap = embed_cbnet(cb, lean=True)
    # 60-odd bits of nodes, but merging keeps the story count near the leaf count
    assert qb.packed_bits() > 40
    assert verify_net_embedding(qb, cb, leafmap).max_error < 1e-12


def test_verify_reports_location(lung):
    qb, leafmap = embed_cbnet(lung)
    rep = verify_net_embedding(qb, lung, leafmap)
    assert rep.ok and bool(rep)
    assert set(rep.location) == set(lung.ids)


def test_verify_detects_wrong_leafmap(lung):
    qb, leafmap = embed_cbnet(lung)
    pairs = dict(leafmap.pairs)
    pairs["a"], pairs["s"] = pairs["s"], pairs["a"]
    bad = type(leafmap)(pairs, leafmap.summed_leaves)
    assert not verify_net_embedding(qb, lung, bad).ok


def test_sampling_seeded_and_relabelled(lung):
    qb, leafmap = embed_cbnet(lung)
    s1 = sample_leaves(qb, 20000, seed=9)
    s2 = sample_leaves(qb, 20000, seed=9)
    assert np.array_equal(s1.states, s2.states)
    est = estimate_conditional(s1, ["l"], {"s": 1}, leafmap)
    want = 0.10
    assert abs(est.probs[1] - want) < 4 * math.sqrt(want * 0.9 / 10000)


def test_state_vector_checks_norm():
    with pytest.raises(NetError):
        StateVector(1, [1, 1])
    with pytest.raises(NetError):
        StateVector(2, [1, 0])


def test_apply_all_order():
    # first listed acts first: X then H on |0> gives |->
    out = apply_all(StateVector.basis(0, 1), [gates.SIGMA_X, gates.H1])
    assert np.allclose(out.amps, gates.MINUS_X, atol=1e-15)
    with pytest.raises(NetError):
        apply_operator(out, np.eye(4))


def test_bit_marginal_little_endian():
    v = StateVector.basis(0b10, 2)
    assert v.bit_marginal([0]).tolist() == [1, 0]
    assert v.bit_marginal([1]).tolist() == [0, 1]


@given(st.integers(1, 4), st.data())
def test_reflection_algebra(nb, data):
    seed = data.draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    v = rng.normal(size=2**nb) + 1j * rng.normal(size=2**nb)
    v /= np.linalg.norm(v)
    r = gates.reflection(v)
    eye = np.eye(2**nb)
    assert np.abs(r @ r - eye).max() < 1e-12
    assert np.abs(r @ v + v).max() < 1e-12
    assert np.abs(r.conj().T - r).max() < 1e-12


def test_on_bit_convention():
    # sigma_x on bit 0 flips the least significant bit
    op = gates.on_bit(gates.SIGMA_X, 0, 2)
    assert np.array_equal(op @ gates.basis_vector(0, 4), gates.basis_vector(1, 4))
    op = gates.on_bit(gates.SIGMA_X, 1, 2)
    assert np.array_equal(op @ gates.basis_vector(0, 4), gates.basis_vector(2, 4))


def test_embedded_marginal_matches(lung):
    qb, leafmap = embed_cbnet(lung)
    got = marginal(embedded_joint(qb, lung, leafmap), ["d"]).probs
    want = marginal(exact_joint(lung), ["d"]).probs
    assert np.abs(got - want).max() < 1e-14
