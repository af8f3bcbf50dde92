import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qembed.errors import ImpossibleEvidence, NetError
from qembed.inference import ancestral_sample, conditional, empirical, exact_joint, marginal, substreams
from qembed.library import chain_net, random_net


def test_joint_sums_to_one(lung):
    j = exact_joint(lung)
    assert j.probs.shape == (2,) * 8
    assert math.isclose(j.total, 1.0, abs_tol=1e-12)


def test_lung_marginals_by_hand(lung):
    j = exact_joint(lung)
    assert marginal(j, ["t"]).probs[1] == pytest.approx(0.05 * 0.01 + 0.01 * 0.99, abs=1e-15)
    assert marginal(j, ["l"]).probs[1] == pytest.approx(0.5 * 0.01 + 0.5 * 0.10, abs=1e-15)


def test_chain_conditional_by_hand():
    net = chain_net(3, flip=0.2)
    j = exact_joint(net)
    # x0 ~ Bern(0.3); two independent flips
    p_x2 = 0.3 * (0.8 * 0.8 + 0.2 * 0.2) + 0.7 * (2 * 0.8 * 0.2)
    assert marginal(j, ["x2"]).probs[1] == pytest.approx(p_x2, abs=1e-15)
    post = conditional(j, ["x0"], {"x1": 1})
    want = 0.3 * 0.8 / (0.3 * 0.8 + 0.7 * 0.2)
    assert post.probs[1] == pytest.approx(want, abs=1e-15)


def test_marginal_axis_order(lung):
    j = exact_joint(lung)
    ab = marginal(j, ["a", "b"]).probs
    ba = marginal(j, ["b", "a"]).probs
    assert np.array_equal(ab, ba.T)


def test_conditional_errors(lung):
    j = exact_joint(lung)
    with pytest.raises(NetError):
        conditional(j, ["a"], {"a": 1})
    with pytest.raises(NetError):
        conditional(j, ["nope"])


def test_impossible_evidence():
    j = exact_joint(chain_net(3, flip=0.0))
    # no flips, so x0=0 and x1=1 never happen together
    with pytest.raises(ImpossibleEvidence):
        conditional(j, ["x2"], {"x0": 0, "x1": 1})


@given(st.integers(0, 2**32 - 1))
def test_conditional_normalized(seed):
    rng = np.random.default_rng(seed)
    net = random_net(rng, 5)
    j = exact_joint(net)
    q, e = net.ids[-1], net.ids[0]
    post = conditional(j, [q], {e: 0})
    assert post.probs.sum() == pytest.approx(1.0, abs=1e-12)


def test_substreams_layout_only_depends_on_n():
    a = [(sl, r.random(3)) for sl, r in substreams(7, 10000)]
    b = [(sl, r.random(3)) for sl, r in substreams(7, 10000)]
    assert [s for s, _ in a] == [s for s, _ in b]
    assert all(np.array_equal(x, y) for (_, x), (_, y) in zip(a, b))
    assert a[-1][0] == slice(8192, 10000)


def test_ancestral_sampling_matches_joint(lung):
    n = 40000
    s = ancestral_sample(lung, n, seed=3)
    want = marginal(exact_joint(lung), ["x"]).probs[1]
    got = empirical(s, ["x"], [2])[1]
    assert abs(got - want) < 4 * math.sqrt(want * (1 - want) / n)


def test_ancestral_sampling_reproducible(lung):
    a = ancestral_sample(lung, 5000, seed=11).to_csv()
    b = ancestral_sample(lung, 5000, seed=11).to_csv()
    assert a == b
    assert a.splitlines()[0] == ",".join(lung.ids)


def test_empirical_no_accepted_runs(lung):
    s = ancestral_sample(lung, 50, seed=0)
    with pytest.raises(ImpossibleEvidence):
        empirical(s, ["x"], [2], {"a": 5})
