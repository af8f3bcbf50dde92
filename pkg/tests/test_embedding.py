import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qembed import gates
from qembed.embedding import (
    AND_LIKE, MULTI_TARGET, OR_LIKE, LeafMap, UnitaryEmbedding, add_marginalizers,
    compose_quasi_deterministic, d_matrix, embed_cbnet, embed_deterministic_gate, embed_probability_matrix,
    embed_quasi_deterministic, embed_xor, gate_truth_table, gram_schmidt_complete, has_matrix, has_net,
    number_operator_projector, pi_targ,
)
from qembed.errors import CapError, NetError
from qembed.inference import exact_joint, marginal
from qembed.library import chain_net, lung_net, random_net, scattering_net, voting_net
from qembed.netcore import MARGINALIZER, QB, validate
from qembed.qsim import verify_net_embedding


@st.composite
def stochastic(draw):
    rows = draw(st.integers(1, 4))
    cols = draw(st.integers(1, 6))
    seed = draw(st.integers(0, 2**32 - 1))
    zeros = draw(st.booleans())
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(rows), size=cols).T
    if zeros:
        p = np.where(rng.random(p.shape) < 0.4, 0.0, p)
        p[rng.integers(0, rows, cols), np.arange(cols)] += 1e-3
        p /= p.sum(axis=0, keepdims=True)
    return p


@given(stochastic())
def test_embedding_is_unitary_and_recovers_p(p):
    emb = embed_probability_matrix(p)
    assert emb.unitarity_error() < 1e-10
    assert emb.embedding_error(p) < 1e-12


@given(stochastic())
def test_live_columns_follow_definition(p):
    emb = embed_probability_matrix(p)
    n_out, n_in = p.shape
    for y in range(n_out):
        # the sink is a copy of the input for the default basis
        assert np.allclose(emb.block(y, 0), np.diag(np.sqrt(p[y])), atol=1e-15)


def test_embedding_with_custom_basis(rng):
    p = rng.dirichlet(np.ones(3), size=4).T
    basis = gates.hadamard(2)
    emb = embed_probability_matrix(p, basis)
    assert emb.embedding_error(p) < 1e-12
    assert emb.unitarity_error() < 1e-10


def test_rejects_non_stochastic():
    with pytest.raises(NetError):
        embed_probability_matrix([[0.5, 0.5], [0.6, 0.5]])
    with pytest.raises(NetError):
        embed_probability_matrix([[1.2], [-0.2]])


def test_gram_schmidt_keeps_given_columns(rng):
    v = rng.normal(size=5) + 1j * rng.normal(size=5)
    v /= np.linalg.norm(v)
    q = gram_schmidt_complete(v, 5)
    assert np.array_equal(q[:, 0], v)
    assert np.abs(q.conj().T @ q - np.eye(5)).max() < 1e-12


def test_gram_schmidt_rejects_non_orthonormal():
    with pytest.raises(NetError):
        gram_schmidt_complete(np.ones((3, 2)), 3)


def test_has_of_hadamard():
    assert np.allclose(has_matrix(gates.hadamard(2)), np.full((4, 4), 0.25), atol=1e-16)


def test_xor_embedding():
    emb = embed_xor()
    assert emb.unitarity_error() < 1e-15
    want = np.array([[1, 0, 0, 1], [0, 1, 1, 0]], dtype=float)
    assert np.allclose(emb.probability_matrix(), want, atol=1e-15)


@pytest.mark.parametrize("nb", [1, 2, 3])
def test_projector_from_number_operators(nb):
    for j in range(2**nb):
        assert np.array_equal(number_operator_projector(j, nb), pi_targ([j], nb))


@pytest.mark.parametrize("mode, targets, nb", [
    (AND_LIKE, [3], 2), (OR_LIKE, [0], 2), (AND_LIKE, [5], 3), (MULTI_TARGET, [0, 3, 5], 3),
])
def test_deterministic_gate_truth_table(mode, targets, nb):
    emb = embed_deterministic_gate(mode, targets, nb)
    f = gate_truth_table(mode, targets, nb)
    want = np.vstack([1 - f, f]).astype(float)
    assert emb.unitarity_error() == 0
    assert np.array_equal(emb.probability_matrix(), want)


def test_and_gate_is_a_controlled_rotation():
    # [-i sigma_y]^Pi: rotate the output bit only when the inputs hit the target
    nb, t = 2, 3
    emb = embed_deterministic_gate(AND_LIKE, [t], nb)
    pi = pi_targ([t], nb)
    want = np.eye(8) + np.kron(-1j * gates.SIGMA_Y - gates.I2, pi)
    assert np.allclose(emb.matrix, want, atol=0)


def test_gate_mode_checks():
    with pytest.raises(NetError):
        embed_deterministic_gate(AND_LIKE, [0, 1], 2)
    with pytest.raises(NetError):
        embed_deterministic_gate("xor-ish", [0], 2)


@given(st.lists(st.floats(0, 1), min_size=1, max_size=6))
def test_d_matrix_is_orthogonal(p):
    d = d_matrix(p)
    n = len(p)
    assert np.abs(d.T @ d - np.eye(2 * n)).max() < 1e-12
    emb = UnitaryEmbedding(d, (2, n), (n, 2))
    want = np.vstack([p, 1 - np.asarray(p)])
    assert emb.embedding_error(want) < 1e-12


def test_d_matrix_rejects_bad_pair():
    with pytest.raises(NetError):
        d_matrix([0.2], [0.7])


def test_noisy_or_spot_value():
    got = compose_quasi_deterministic(embed_quasi_deterministic([0], 2, (0.1, 0.1), OR_LIKE))
    assert got[1, 3] == pytest.approx(0.99, abs=1e-12)
    assert got[1, 0] == pytest.approx(1 - 0.9 * 0.9, abs=1e-12)


@given(st.floats(0, 0.5), st.floats(0, 0.5))
def test_noisy_and_matches_direct_sum(p01, p10):
    nb = 2
    embs = embed_quasi_deterministic([3], nb, (p01, p10), AND_LIKE)
    got = compose_quasi_deterministic(embs)
    # P(y=1|x) = prod_alpha P(t_alpha = 1 | x_alpha)
    for x in range(4):
        p1 = np.prod([1 - p01 if (x >> a) & 1 else p10 for a in range(nb)])
        assert got[1, x] == pytest.approx(p1, abs=1e-12)


def test_marginalizers_are_transparent(lung):
    mod = add_marginalizers(lung)
    assert validate(mod).ok
    j = exact_joint(mod)
    # the compound node e has one copy per child; marginal over originals is unchanged
    orig = exact_joint(lung)
    for i in lung.ids:
        mids = [m for m in mod.ids if m.startswith(f"{i}_m")]
        got = marginal(j, [mids[0]]).probs
        assert np.allclose(got, marginal(orig, [i]).probs, atol=1e-15)


def test_marginalizer_counts(lung):
    mod = add_marginalizers(lung)
    n_m = sum(n.kind == MARGINALIZER for n in mod.nodes)
    assert n_m == sum(max(1, len(lung.children(i))) for i in lung.ids)
    lean = add_marginalizers(lung, lean=True)
    # a is the only single-child root
    assert "a_m0" not in lean and "s_m0" in lean


@pytest.mark.parametrize("make", [lung_net, lambda: scattering_net(2), lambda: scattering_net(3),
                                  lambda: chain_net(4), lambda: voting_net([0.9, 0.1, 0.5, 0.3])])
@pytest.mark.parametrize("lean", [False, True])
def test_net_embedding_verifies(make, lean):
    cb = make()
    qb, leafmap = embed_cbnet(cb, lean=lean)
    assert qb.flavor == QB
    assert validate(qb).ok
    assert verify_net_embedding(qb, cb, leafmap).max_error < 1e-12


@given(st.integers(0, 2**32 - 1), st.sampled_from([0.0, 0.3]))
def test_random_nets_verify(seed, zero_prob):
    cb = random_net(np.random.default_rng(seed), 5, zero_prob=zero_prob)
    qb, leafmap = embed_cbnet(cb)
    assert verify_net_embedding(qb, cb, leafmap).max_error < 1e-10


def test_has_net_is_classical(scattering):
    qb, _ = embed_cbnet(scattering)
    h = has_net(qb)
    for n in h.nodes:
        assert np.all(n.matrix >= 0)
        assert np.allclose(n.matrix.sum(axis=0), 1)


def test_uniform_root_uses_hadamard():
    qb, _ = embed_cbnet(voting_net([1, 0, 0, 0]))
    assert np.array_equal(qb["x"].matrix, gates.hadamard(2))
    assert qb["x"].parents == ("x_src0",)


def test_leafmap_json_roundtrip(lung):
    _, leafmap = embed_cbnet(lung)
    again = LeafMap.from_json(leafmap.to_json())
    assert again == leafmap
    assert leafmap.leaf("a") == "t_snk0"
    with pytest.raises(NetError):
        leafmap.leaf("a_m0")


def test_cap_on_node_dimension(lung):
    with pytest.raises(CapError):
        embed_cbnet(lung, cap_bits=4)
