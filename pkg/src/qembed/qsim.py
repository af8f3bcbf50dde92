"""Evaluation of quantum Bayesian nets and a small dense state-vector engine.

Leaf distributions are computed by expanding partial stories node by node in
topological order.  A node only branches on the nonzero entries of the
relevant amplitude column, so delta nodes (marginalizers, sinks, sources and
gate permutations) never multiply the number of stories.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .embedding import LeafMap
from .errors import CapError, NetError
from .inference import DEFAULT_CAP, JointTable, Samples, empirical, exact_joint, marginal, substreams
from .netcore import QB, Net, StateSpace, topological_order

NORM_TOL = 1e-9
STATE_TOL = 1e-10
VERIFY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class LeafDistribution(JointTable):
    """Probabilities over leaf assignments; ``amplitudes`` keeps the complex sums."""

    amplitudes: np.ndarray | None = None


def story_amplitude(qbnet: Net, assignment: Mapping[str, int]) -> complex:
    """Product over nodes of A(x_node | x_parents) at a full assignment."""
    amp = 1.0 + 0j
    for node in qbnet.nodes:
        try:
            row = assignment[node.id]
            col, stride = 0, 1
            for p in node.parents:
                col += assignment[p] * stride
                stride *= qbnet[p].size
        except KeyError as e:
            raise NetError(f"assignment misses node {e.args[0]!r}") from None
        amp *= complex(node.matrix[row, col])
        if amp == 0:
            return 0j
    return amp


def _leaf_table(qbnet: Net, leaves: Sequence[str], stories: np.ndarray, amps: np.ndarray,
                pos: Mapping[str, int]) -> LeafDistribution:
    sizes = tuple(qbnet[i].size for i in leaves)
    flat = np.zeros(math.prod(sizes), dtype=complex)
    if stories.shape[0]:
        idx = np.ravel_multi_index(tuple(stories[:, pos[i]] for i in leaves), sizes)
        np.add.at(flat, idx, amps)
    amp = flat.reshape(sizes)
    probs = np.abs(amp) ** 2
    return LeafDistribution(tuple(leaves), probs, tuple(qbnet[i].states for i in leaves), amp)


def leaf_distribution(qbnet: Net, cap: int = DEFAULT_CAP) -> LeafDistribution:
    """P(leaves) = |sum over internal nodes of the story amplitude|**2.

    The result is not renormalized; ``.total`` should be 1 for a valid net.
    """
    order = topological_order(qbnet)
    pos = {nid: k for k, nid in enumerate(qbnet.ids)}
    leaves = qbnet.leaves()
    if math.prod(qbnet[i].size for i in leaves) > cap:
        raise CapError("leaf table", math.prod(qbnet[i].size for i in leaves), cap)

    # an internal node whose children are all expanded no longer affects any
    # factor, so it is summed out by merging stories that agree elsewhere
    pending = {nid: len(qbnet.children(nid)) for nid in qbnet.ids}
    leafset = set(leaves)
    stories = np.zeros((1, len(qbnet)), dtype=np.int64)
    amps = np.ones(1, dtype=complex)
    for nid in order:
        node = qbnet[nid]
        if len(amps) * node.size > cap:
            raise CapError("partial-story expansion", len(amps) * node.size, cap)
        col = np.zeros(len(amps), dtype=np.int64)
        stride = 1
        for p in node.parents:
            col += stories[:, pos[p]] * stride
            stride *= qbnet[p].size
        entries = node.matrix[:, col].T  # (stories, states)
        which, state = np.nonzero(entries)
        stories = stories[which]
        stories[:, pos[nid]] = state
        amps = amps[which] * entries[which, state]
        done = []
        for p in node.parents:
            pending[p] -= 1
            if pending[p] == 0 and p not in leafset:
                done.append(p)
        if done:
            stories[:, [pos[p] for p in done]] = 0
            stories, amps = _merge(stories, amps)
    return _leaf_table(qbnet, leaves, stories, amps, pos)


def _merge(stories: np.ndarray, amps: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sum the amplitudes of identical rows; row order follows first appearance sorted by value."""
    if len(amps) < 2:
        return stories, amps
    uniq, inverse = np.unique(stories, axis=0, return_inverse=True)
    summed = np.zeros(len(uniq), dtype=complex)
    np.add.at(summed, inverse.reshape(-1), amps)
    keep = summed != 0
    return uniq[keep], summed[keep]


def naive_leaf_distribution(qbnet: Net, max_bits: float = 16) -> LeafDistribution:
    """Same result as :func:`leaf_distribution` by enumerating every story."""
    if qbnet.packed_bits() > max_bits:
        raise CapError("naive enumeration (bits)", qbnet.packed_bits(), max_bits)
    ids = qbnet.ids
    pos = {nid: k for k, nid in enumerate(ids)}
    sizes = [n.size for n in qbnet.nodes]
    rows, amps = [], []
    for states in itertools.product(*(range(n) for n in sizes)):
        a = story_amplitude(qbnet, dict(zip(ids, states)))
        if a != 0:
            rows.append(states)
            amps.append(a)
    stories = np.array(rows, dtype=np.int64).reshape(-1, len(ids))
    return _leaf_table(qbnet, qbnet.leaves(), stories, np.array(amps, dtype=complex), pos)


@dataclass(frozen=True)
class EmbeddingReport:
    ok: bool
    max_error: float
    location: dict | None = None

    def __bool__(self):
        return self.ok


def _check_leafmap(qbnet: Net, cbnet: Net, leafmap: LeafMap) -> None:
    missing = [i for i in cbnet.ids if i not in leafmap.pairs]
    if missing:
        raise NetError(f"leaf map has no entry for {missing}")
    leaves = set(qbnet.leaves())
    mapped = list(leafmap.pairs.values()) + list(leafmap.summed_leaves)
    unknown = [i for i in mapped if i not in leaves]
    if unknown:
        raise NetError(f"leaf map names non-leaves {unknown}")
    if len(set(mapped)) != len(mapped) or set(mapped) != leaves:
        raise NetError("leaf map must split the leaves into kept and summed without overlap")
    for orig, leaf in leafmap.pairs.items():
        if qbnet[leaf].size != cbnet[orig].size:
            raise NetError(f"leaf {leaf!r} has {qbnet[leaf].size} states, {orig!r} has {cbnet[orig].size}")


def embedded_joint(qbnet: Net, cbnet: Net, leafmap: LeafMap, cap: int = DEFAULT_CAP) -> JointTable:
    """Leaf distribution summed over the ancilla leaves, relabelled with original ids."""
    _check_leafmap(qbnet, cbnet, leafmap)
    dist = leaf_distribution(qbnet, cap)
    kept = marginal(dist, [leafmap.pairs[i] for i in cbnet.ids])
    return JointTable(cbnet.ids, kept.probs, tuple(n.states for n in cbnet.nodes))


def verify_net_embedding(qbnet: Net, cbnet: Net, leafmap: LeafMap, tol: float = VERIFY_TOL,
                         cap: int = DEFAULT_CAP) -> EmbeddingReport:
    """Compare the embedded joint with the classical joint computed by brute force."""
    got = embedded_joint(qbnet, cbnet, leafmap, cap)
    want = exact_joint(cbnet, cap)
    dev = np.abs(got.probs - want.probs)
    k = np.unravel_index(int(np.argmax(dev)), dev.shape) if dev.size else ()
    err = float(dev[k]) if dev.size else 0.0
    where = {nid: cbnet[nid].states.labels[s] for nid, s in zip(cbnet.ids, k)}
    return EmbeddingReport(err < tol, err, where)


# ----------------------------------------------------------------------------
# measurement


def sample_leaves(qbnet: Net, n: int, seed: int = 0, dist: LeafDistribution | None = None,
                  cap: int = DEFAULT_CAP) -> Samples:
    """Draw ``n`` leaf assignments from the exact leaf distribution by inverse CDF."""
    dist = dist if dist is not None else leaf_distribution(qbnet, cap)
    flat = dist.probs.reshape(-1)
    cdf = np.cumsum(flat)
    cdf /= cdf[-1]
    sizes = dist.probs.shape
    out = np.zeros((n, len(sizes)), dtype=np.int64)
    for sl, rng in substreams(seed, n):
        idx = np.searchsorted(cdf, rng.random(sl.stop - sl.start), side="right")
        idx = np.minimum(idx, flat.size - 1)
        out[sl] = np.stack(np.unravel_index(idx, sizes), axis=1)
    return Samples(dist.scope, out, dist.spaces)


def estimate_conditional(samples: Samples, query: Sequence[str], evidence: Mapping[str, int | str] | None = None,
                         leafmap: LeafMap | None = None) -> JointTable:
    """Empirical P(query | evidence); ids go through ``leafmap`` when given."""
    def leaf(i):
        return leafmap.leaf(i) if leafmap is not None else i

    ev = {}
    for k, v in (evidence or {}).items():
        lid = leaf(k)
        space = samples.spaces[samples.scope.index(lid)] if samples.spaces else StateSpace.range(samples.sizes([lid])[0])
        ev[lid] = space.index(v)
    qids = [leaf(q) for q in query]
    probs = empirical(samples, qids, samples.sizes(qids), ev)
    spaces = tuple(samples.spaces[samples.scope.index(q)] for q in qids) if samples.spaces else None
    return JointTable(tuple(query), probs, spaces)


# ----------------------------------------------------------------------------
# state vectors


@dataclass(frozen=True, eq=False)
class StateVector:
    nb: int
    amps: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amps, dtype=complex).reshape(-1)
        if a.size != 2**self.nb:
            raise NetError(f"{self.nb} bits need {2**self.nb} amplitudes, got {a.size}")
        norm = float(np.linalg.norm(a))
        if abs(norm - 1) > STATE_TOL:
            raise NetError(f"state has norm {norm:.12g}")
        a.setflags(write=False)
        object.__setattr__(self, "amps", a)

    @classmethod
    def basis(cls, j: int, nb: int) -> StateVector:
        a = np.zeros(2**nb, dtype=complex)
        a[j] = 1
        return cls(nb, a)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def bit_marginal(self, bits: Sequence[int]) -> np.ndarray:
        """Distribution of the sub-register ``bits`` (first listed bit least significant)."""
        p = self.probabilities()
        out = np.zeros(2 ** len(bits))
        idx = np.arange(p.size)
        sub = sum(((idx >> b) & 1) << k for k, b in enumerate(bits))
        np.add.at(out, sub, p)
        return out


def apply_operator(state: StateVector, op: np.ndarray) -> StateVector:
    op = np.asarray(op)
    if op.shape != (state.amps.size, state.amps.size):
        raise NetError(f"operator is {op.shape}, state has dimension {state.amps.size}")
    return StateVector(state.nb, op @ state.amps)


def apply_all(state: StateVector, ops: Sequence[np.ndarray]) -> StateVector:
    """Apply ``ops`` left to right, i.e. the first listed acts first."""
    for op in ops:
        state = apply_operator(state, op)
    return state


def require_qb(net: Net) -> None:
    if net.flavor != QB:
        raise NetError("expected a quantum net")
