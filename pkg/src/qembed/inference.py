"""Brute-force exact inference and ancestral sampling for classical nets.

This is the oracle every q-embedding is checked against, so it favours
obviousness over speed: the full joint table is materialized.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

import numpy as np

from .errors import CapError, ImpossibleEvidence, NetError
from .netcore import CB, Net, StateSpace, Story, _fmt, topological_order

DEFAULT_CAP = 2**24
SUBSTREAM_BLOCK = 4096


@dataclass(frozen=True, eq=False)
class JointTable:
    """Dense probability table with one axis per node in ``scope``."""

    scope: tuple[str, ...]
    probs: np.ndarray
    spaces: tuple[StateSpace, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "scope", tuple(self.scope))
        if self.probs.ndim != len(self.scope):
            raise NetError(f"table has {self.probs.ndim} axes for scope {self.scope}")

    def axis(self, node_id: str) -> int:
        try:
            return self.scope.index(node_id)
        except ValueError:
            raise NetError(f"{node_id!r} is not in scope {self.scope}") from None

    def space(self, node_id: str) -> StateSpace:
        if self.spaces is None:
            return StateSpace.range(self.probs.shape[self.axis(node_id)])
        return self.spaces[self.axis(node_id)]

    @property
    def total(self) -> float:
        return float(self.probs.sum())

    def __getitem__(self, assignment: Mapping[str, int]) -> float:
        return float(self.probs[tuple(assignment[i] for i in self.scope)])

    def to_csv(self) -> str:
        """One row per assignment, state labels by name, final column the probability."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([*self.scope, "probability"])
        spaces = [self.space(i) for i in self.scope]
        for idx in np.ndindex(*self.probs.shape):
            w.writerow([*(sp.labels[k] for sp, k in zip(spaces, idx)), _fmt(self.probs[idx])])
        return buf.getvalue()


def node_factor(net: Net, node_id: str, scope: Sequence[str]) -> np.ndarray:
    """Node matrix reshaped so it broadcasts against a table over ``scope``."""
    node = net[node_id]
    sizes = net.parent_sizes(node_id)
    # packed columns are little-endian, so C-order reshape wants reversed parents
    t = node.matrix.reshape((node.size, *reversed(sizes)))
    axes_ids = [node_id, *reversed(node.parents)]
    order = sorted(range(len(axes_ids)), key=lambda k: scope.index(axes_ids[k]))
    t = np.transpose(t, order)
    present = sorted(scope.index(i) for i in axes_ids)
    shape = [1] * len(scope)
    for pos, n in zip(present, t.shape):
        shape[pos] = n
    return t.reshape(shape)


def exact_joint(net: Net, cap: int = DEFAULT_CAP) -> JointTable:
    """Full joint table: the product of every node matrix, over all nodes."""
    scope = net.ids
    shape = tuple(n.size for n in net.nodes)
    entries = math.prod(shape)
    if entries > cap:
        raise CapError("joint table", entries, cap)
    probs = np.ones(shape)
    for nid in scope:
        probs = probs * node_factor(net, nid, scope)
    return JointTable(scope, probs, tuple(n.states for n in net.nodes))


def marginal(joint: JointTable, keep: Sequence[str]) -> JointTable:
    keep = tuple(keep)
    axes = [joint.axis(k) for k in keep]
    if len(set(axes)) != len(axes):
        raise NetError(f"repeated node in {keep}")
    drop = tuple(a for a in range(len(joint.scope)) if a not in axes)
    summed = joint.probs.sum(axis=drop)
    remaining = [a for a in range(len(joint.scope)) if a in axes]
    probs = np.transpose(summed, [remaining.index(a) for a in axes]) if axes else np.asarray(summed)
    spaces = None if joint.spaces is None else tuple(joint.spaces[a] for a in axes)
    return JointTable(keep, probs, spaces)


def _evidence_index(joint: JointTable, evidence: Mapping[str, int | str]) -> dict[int, int]:
    return {joint.axis(k): joint.space(k).index(v) for k, v in evidence.items()}


def conditional(joint: JointTable, query: Sequence[str], evidence: Mapping[str, int | str] | None = None) -> JointTable:
    """P(query | evidence) as a normalized table over ``query``."""
    evidence = dict(evidence or {})
    overlap = set(query) & set(evidence)
    if overlap:
        raise NetError(f"nodes {sorted(overlap)} are both queried and observed")
    fixed = _evidence_index(joint, evidence)
    index = tuple(fixed.get(a, slice(None)) for a in range(len(joint.scope)))
    rest = [i for a, i in enumerate(joint.scope) if a not in fixed]
    sliced = JointTable(
        rest,
        np.asarray(joint.probs[index]),
        None if joint.spaces is None else tuple(s for a, s in enumerate(joint.spaces) if a not in fixed),
    )
    num = marginal(sliced, query)
    mass = num.probs.sum()
    if mass <= 0:
        raise ImpossibleEvidence(f"evidence {evidence} has zero probability")
    return JointTable(num.scope, num.probs / mass, num.spaces)


# ----------------------------------------------------------------------------
# sampling


@dataclass(frozen=True, eq=False)
class Samples:
    """``n`` sampled stories stored as an (n, len(scope)) integer array."""

    scope: tuple[str, ...]
    states: np.ndarray
    spaces: tuple[StateSpace, ...] | None = None

    def __len__(self):
        return self.states.shape[0]

    def column(self, node_id: str) -> np.ndarray:
        return self.states[:, self.scope.index(node_id)]

    def stories(self) -> Iterator[Story]:
        for row in self.states:
            yield Story(dict(zip(self.scope, map(int, row))))

    def sizes(self, ids: Sequence[str]) -> tuple[int, ...]:
        if self.spaces is None:
            return tuple(int(self.column(i).max()) + 1 for i in ids)
        return tuple(self.spaces[self.scope.index(i)].size for i in ids)

    def to_csv(self, spaces: Sequence[StateSpace] | None = None) -> str:
        spaces = spaces if spaces is not None else self.spaces
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.scope)
        for row in self.states:
            if spaces is None:
                w.writerow([int(v) for v in row])
            else:
                w.writerow([sp.labels[v] for sp, v in zip(spaces, row)])
        return buf.getvalue()


def substreams(seed: int, n: int, block: int = SUBSTREAM_BLOCK) -> Iterator[tuple[slice, np.random.Generator]]:
    """Split ``n`` draws into fixed blocks, each with an independent child generator.

    The block layout depends only on ``n`` so results never depend on how
    blocks are scheduled.
    """
    nblocks = -(-n // block)
    children = np.random.SeedSequence(seed).spawn(nblocks)
    for b, ss in enumerate(children):
        yield slice(b * block, min(n, (b + 1) * block)), np.random.default_rng(ss)


def ancestral_sample(net: Net, n: int, seed: int = 0) -> Samples:
    """Draw ``n`` stories by sampling every node after its parents."""
    if net.flavor != CB:
        raise NetError("ancestral sampling needs a classical net")
    order = topological_order(net)
    pos = {nid: k for k, nid in enumerate(net.ids)}
    out = np.zeros((n, len(net)), dtype=np.int64)
    cums = {nid: np.cumsum(net[nid].matrix, axis=0) for nid in order}
    for sl, rng in substreams(seed, n):
        m = sl.stop - sl.start
        for nid in order:
            node = net[nid]
            col = np.zeros(m, dtype=np.int64)
            stride = 1
            for p in node.parents:
                col += out[sl, pos[p]] * stride
                stride *= net[p].size
            u = rng.random(m)
            cdf = cums[nid][:, col]  # (size, m)
            draw = (u[None, :] >= cdf).sum(axis=0)
            out[sl, pos[nid]] = np.minimum(draw, node.size - 1)
    return Samples(net.ids, out, tuple(n.states for n in net.nodes))


def empirical(samples: Samples, query: Sequence[str], sizes: Sequence[int],
              evidence: Mapping[str, int] | None = None) -> np.ndarray:
    """Conditional relative frequencies of ``query`` among runs matching ``evidence``."""
    keep = np.ones(len(samples), dtype=bool)
    for k, v in (evidence or {}).items():
        keep &= samples.column(k) == v
    if not keep.any():
        raise ImpossibleEvidence(f"no accepted runs: evidence {dict(evidence or {})} never sampled")
    counts = np.zeros(tuple(sizes))
    cols = tuple(samples.column(q)[keep] for q in query)
    np.add.at(counts, cols, 1.0)
    return counts / keep.sum()
