"""Q-embeddings of probability matrices and of whole classical nets.

Layout of every :class:`UnitaryEmbedding` matrix ``A(y, xs | x, ys)``:

* rows pack ``(xs, y)`` as ``xs + n_sink * y``: the principal output is the
  block index, the sink index runs inside a block;
* columns pack ``(x, ys)`` as ``x + n_in * ys``: the source index is the
  block index, so the ``ys = 0`` columns are the first ``n_in`` columns.

With this layout the generic construction, the deterministic-gate blocks and
D-matrices all read as plain block matrices.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import gates
from .errors import CapError, NetError
from .netcore import (
    ANCILLA_SINK,
    ANCILLA_SOURCE,
    CB,
    MARGINALIZER,
    ORDINARY,
    QB,
    STOCHASTIC_TOL,
    Net,
    Node,
    StateSpace,
    _fmt,
    delta_matrix,
    unpack,
    validate,
)

ORTHO_TOL = 1e-9
RESIDUAL_TOL = 1e-9
DEFAULT_CAP_BITS = 24


def has_matrix(a: np.ndarray) -> np.ndarray:
    """Hadamard absolute square: entrywise |a_ij|**2."""
    return np.abs(np.asarray(a)) ** 2


def has_net(qbnet: Net) -> Net:
    """Classical net with every amplitude replaced by its squared magnitude."""
    nodes = []
    for n in qbnet.nodes:
        p = has_matrix(n.matrix)
        sums = p.sum(axis=0)
        bad = np.flatnonzero(np.abs(sums - 1) > STOCHASTIC_TOL)
        if bad.size:
            raise NetError(f"HAS of node {n.id!r} is not stochastic: column {bad[0]} sums to {sums[bad[0]]:.12g}")
        nodes.append(Node(n.id, n.states, p, n.parents, n.kind, n.components, n.component_names))
    return Net(tuple(nodes), CB)


def check_stochastic(p: np.ndarray, what: str = "probability matrix") -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim == 1:
        p = p.reshape(-1, 1)
    if p.ndim != 2:
        raise NetError(f"{what} must be 2-D")
    if (p < 0).any():
        raise NetError(f"{what} has negative entries")
    sums = p.sum(axis=0)
    bad = np.flatnonzero(np.abs(sums - 1) > STOCHASTIC_TOL)
    if bad.size:
        raise NetError(f"{what} column {bad[0]} sums to {sums[bad[0]]:.12g}")
    return p


@dataclass(frozen=True, eq=False)
class UnitaryEmbedding:
    matrix: np.ndarray
    row_split: tuple[int, int]  # (principal outputs y, sinks xs)
    col_split: tuple[int, int]  # (principal inputs x, sources ys)
    source_fixed: int = field(default=0)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        rows, cols = math.prod(self.row_split), math.prod(self.col_split)
        if m.shape != (rows, cols) or rows != cols:
            raise NetError(f"matrix {m.shape} does not match splits {self.row_split} x {self.col_split}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def probability_matrix(self) -> np.ndarray:
        """sum over sinks of |A(y, xs | x, ys=0)|**2, a (n_out, n_in) matrix."""
        n_out, n_sink = self.row_split
        n_in = self.col_split[0]
        live = self.matrix[:, :n_in].reshape(n_out, n_sink, n_in)
        return has_matrix(live).sum(axis=1)

    def unitarity_error(self) -> float:
        return float(np.abs(self.matrix.conj().T @ self.matrix - np.eye(self.dim)).max())

    def embedding_error(self, p: np.ndarray) -> float:
        return float(np.abs(self.probability_matrix() - np.asarray(p)).max())

    def block(self, y: int, ys: int) -> np.ndarray:
        """Sub-matrix A(y, . | ., ys) of shape (n_sink, n_in)."""
        n_sink, n_in = self.row_split[1], self.col_split[0]
        return self.matrix[y * n_sink:(y + 1) * n_sink, ys * n_in:(ys + 1) * n_in]

    def to_json(self) -> str:
        rows = ",\n    ".join(
            "[" + ", ".join(f"[{_fmt(v.real)}, {_fmt(v.imag)}]" for v in row) + "]" for row in self.matrix
        )
        return (
            "{\n"
            f'  "row_split": {json.dumps(list(self.row_split))},\n'
            f'  "col_split": {json.dumps(list(self.col_split))},\n'
            f'  "matrix": [\n    {rows}\n  ]\n'
            "}\n"
        )


# ----------------------------------------------------------------------------
# matrix-level constructions


def gram_schmidt_complete(columns, dim: int) -> np.ndarray:
    """Extend orthonormal ``columns`` to a dim x dim unitary.

    Candidates are the standard basis vectors in ascending order; a candidate
    whose residual norm falls below 1e-9 is skipped.  Each residual is
    orthogonalized twice to keep rounding errors down.
    """
    cols = np.asarray(columns, dtype=complex)
    if cols.ndim == 1:
        cols = cols.reshape(-1, 1)
    if cols.size == 0:
        cols = np.zeros((dim, 0), dtype=complex)
    if cols.shape[0] != dim:
        raise NetError(f"columns have length {cols.shape[0]}, expected {dim}")
    k = cols.shape[1]
    if k > dim:
        raise NetError(f"{k} columns cannot be orthonormal in dimension {dim}")
    dev = float(np.abs(cols.conj().T @ cols - np.eye(k)).max()) if k else 0.0
    if dev > ORTHO_TOL:
        raise NetError(f"input columns are not orthonormal: max |G - I| = {dev:.3e}")

    q = np.zeros((dim, dim), dtype=complex)
    q[:, :k] = cols
    filled = k
    for j in range(dim):
        if filled == dim:
            break
        v = np.zeros(dim, dtype=complex)
        v[j] = 1
        basis = q[:, :filled]
        for _ in range(2):
            v = v - basis @ (basis.conj().T @ v)
        norm = np.linalg.norm(v)
        if norm > RESIDUAL_TOL:
            q[:, filled] = v / norm
            filled += 1
    if filled != dim:  # only reachable through catastrophic rounding
        raise NetError("Gram-Schmidt completion failed to span the space")
    return q


def embed_probability_matrix(p, basis: np.ndarray | None = None) -> UnitaryEmbedding:
    """General q-embedding: A(y, xs | x, 0) = sqrt(P(y|x)) xi^(x)_xs, rest by Gram-Schmidt.

    ``basis`` holds the orthonormal vectors xi^(x) as its columns; the default
    is the standard basis, i.e. the sink index is a copy of the input.
    """
    p = check_stochastic(p)
    n_out, n_in = p.shape
    if basis is None:
        xi = np.eye(n_in, dtype=complex)
    else:
        xi = np.asarray(basis, dtype=complex)
        if xi.shape != (n_in, n_in):
            raise NetError(f"basis must be {n_in}x{n_in}")
        dev = float(np.abs(xi.conj().T @ xi - np.eye(n_in)).max())
        if dev > ORTHO_TOL:
            raise NetError(f"basis is not orthonormal: max |G - I| = {dev:.3e}")
    root = np.sqrt(p)
    live = np.concatenate([xi * root[y][None, :] for y in range(n_out)], axis=0)
    u = gram_schmidt_complete(live, n_out * n_in)
    return UnitaryEmbedding(u, (n_out, n_in), (n_in, n_out))


def embed_xor() -> UnitaryEmbedding:
    """4x4 embedding of P(y|x1,x2) = delta(y, x1 xor x2) with one sink bit e.

    A(y, e | x1, x2) = (-1)**(x1 e) / sqrt(2) delta(y, x1 xor x2); no source.
    """
    a = np.zeros((4, 4), dtype=complex)
    for x1 in (0, 1):
        for x2 in (0, 1):
            y = x1 ^ x2
            for e in (0, 1):
                a[e + 2 * y, x1 + 2 * x2] = (-1) ** (x1 * e) * gates.SQRT1_2
    return UnitaryEmbedding(a, (2, 2), (4, 1))


def pi_targ(targets, nb: int) -> np.ndarray:
    """Diagonal projector onto the basis states in ``targets``."""
    n = 2**nb
    d = np.zeros(n)
    for t in targets:
        if not 0 <= t < n:
            raise NetError(f"target {t} outside 0..{n - 1}")
        d[t] = 1
    return np.diag(d).astype(complex)


def number_operator_projector(j: int, nb: int) -> np.ndarray:
    """Projector onto |j> written as a product of n / nbar per bit."""
    return gates.on_bits({a: gates.NUMBER if (j >> a) & 1 else gates.NUMBER_BAR for a in range(nb)}, nb)


AND_LIKE = "and-like"
OR_LIKE = "or-like"
MULTI_TARGET = "multi-target"


def embed_deterministic_gate(mode: str, targets, nb: int) -> UnitaryEmbedding:
    """DRE of a deterministic pd(Bool|Bool^nb) matrix.

    AND-like and multi-target (targets = f^-1(1)) use the block matrix
    [[1-Pi, -Pi], [Pi, 1-Pi]]; OR-like (targets = f^-1(0)) swaps the two
    block rows first, i.e. applies sigma_x to the output bit.
    """
    targets = sorted(set(int(t) for t in targets))
    if mode in (AND_LIKE, OR_LIKE) and len(targets) != 1:
        raise NetError(f"{mode} gates have exactly one target, got {len(targets)}")
    if mode not in (AND_LIKE, OR_LIKE, MULTI_TARGET):
        raise NetError(f"unknown gate mode {mode!r}")
    n = 2**nb
    pi = pi_targ(targets, nb)
    one = np.eye(n, dtype=complex)
    u = np.block([[one - pi, -pi], [pi, one - pi]])
    if mode == OR_LIKE:
        u = np.kron(gates.SIGMA_X, one) @ u
    return UnitaryEmbedding(u, (2, n), (n, 2))


def gate_truth_table(mode: str, targets, nb: int) -> np.ndarray:
    """f as a 0/1 array over the 2**nb inputs, for a given mode and target set."""
    f = np.zeros(2**nb, dtype=np.int64)
    f[list(targets)] = 1
    return 1 - f if mode == OR_LIKE else f


def d_matrix(p, q=None) -> np.ndarray:
    """[[D_p, -D_q], [D_q, D_p]] with D_p = diag(sqrt(p)), D_q = diag(sqrt(q))."""
    p = np.asarray(p, dtype=float).reshape(-1)
    q = 1 - p if q is None else np.asarray(q, dtype=float).reshape(-1)
    if p.shape != q.shape:
        raise NetError("p and q must have the same length")
    if (p < -1e-15).any() or (q < -1e-15).any():
        raise NetError("probabilities must be non-negative")
    dev = np.abs(p + q - 1)
    if (dev > 1e-12).any():
        i = int(np.argmax(dev))
        raise NetError(f"p[{i}] + q[{i}] = {p[i] + q[i]!r}, expected 1")
    dp = np.diag(np.sqrt(np.clip(p, 0, None))).astype(complex)
    dq = np.diag(np.sqrt(np.clip(q, 0, None))).astype(complex)
    return np.block([[dp, -dq], [dq, dp]])


def _noise_pairs(noise, nb: int) -> list[tuple[float, float]]:
    arr = np.asarray(noise, dtype=float)
    if arr.shape == (2,):
        arr = np.tile(arr, (nb, 1))
    if arr.shape != (nb, 2):
        raise NetError(f"noise must be one (p01, p10) pair or {nb} of them")
    if ((arr < 0) | (arr > 1)).any():
        raise NetError("noise rates must lie in [0, 1]")
    return [tuple(map(float, r)) for r in arr]


def embed_quasi_deterministic(targets, nb: int, noise, mode: str = MULTI_TARGET) -> list[UnitaryEmbedding]:
    """Separate embeddings for a noisy gate: one D-matrix per input bit, then the gate.

    ``noise[alpha] = (p01, p10)``: p01 = P(t=0 | x=1) (false negative) and
    p10 = P(t=1 | x=0) (false positive) for input bit alpha.
    """
    out = []
    for p01, p10 in _noise_pairs(noise, nb):
        p = [1 - p10, p01]  # P(t=0 | x=0), P(t=0 | x=1)
        q = [p10, 1 - p01]  # P(t=1 | x=0), P(t=1 | x=1)
        out.append(UnitaryEmbedding(d_matrix(p, q), (2, 2), (2, 2)))
    out.append(embed_deterministic_gate(mode, targets, nb))
    return out


def compose_quasi_deterministic(embeddings: Sequence[UnitaryEmbedding]) -> np.ndarray:
    """P(y|x) = sum_t P_gate(y|t) prod_alpha P_alpha(t_alpha|x_alpha), from the embeddings."""
    *bits, gate = embeddings
    per_bit = [e.probability_matrix() for e in bits]
    noise = gates.kron_all(reversed(per_bit)).real  # bit 0 least significant
    return gate.probability_matrix() @ noise


# ----------------------------------------------------------------------------
# net-level construction


def marginalizer_id(node_id: str, k: int) -> str:
    return f"{node_id}_m{k}"


def source_id(node_id: str, k: int) -> str:
    return f"{node_id}_src{k}"


def sink_id(node_id: str, k: int) -> str:
    return f"{node_id}_snk{k}"


def _fanout_matrix(p: np.ndarray, copies: int) -> np.ndarray:
    """P(x_0 | pa) prod_j delta(x_j, x_0) over the compound state (x_0..x_{k-1})."""
    n = p.shape[0]
    out = np.zeros((n**copies, p.shape[1]))
    for s in range(n):
        out[sum(s * n**j for j in range(copies))] = p[s]
    return out


def _needs_marginalizer(cbnet: Net, node: Node, lean: bool) -> bool:
    kids = cbnet.children(node.id)
    if len(kids) != 1:
        return True
    # a single-child root gains no sink components, so its marginalizer is redundant
    return not (lean and not node.parents)


def add_marginalizers(cbnet: Net, lean: bool = False) -> Net:
    """Insert a delta marginalizer between every node and each of its children.

    A node with k > 1 children becomes a compound node of k identical copies
    and marginalizer ``<id>_m<i>`` extracts copy i.  A childless node gets a
    single marginalizer child.  With ``lean`` the marginalizers of
    single-child roots are left out.
    """
    if cbnet.flavor != CB:
        raise NetError("add_marginalizers needs a classical net")
    report = validate(cbnet)
    if not report.ok:
        raise NetError(f"invalid net:\n{report}")

    def link(parent_id: str, child_id: str) -> str:
        parent = cbnet[parent_id]
        if not _needs_marginalizer(cbnet, parent, lean):
            return parent_id
        return marginalizer_id(parent_id, cbnet.children(parent_id).index(child_id))

    taken = set(cbnet.ids)
    nodes: list[Node] = []
    for node in cbnet.nodes:
        kids = cbnet.children(node.id)
        copies = max(1, len(kids))
        parents = tuple(link(p, node.id) for p in node.parents)
        if copies > 1:
            nodes.append(Node(
                node.id,
                StateSpace.product([node.states] * copies),
                _fanout_matrix(node.matrix, copies),
                parents,
                ORDINARY,
                components=(node.states,) * copies,
                component_names=tuple(f"{node.id}@{k}" for k in kids),
            ))
        else:
            nodes.append(Node(node.id, node.states, node.matrix, parents, ORDINARY))
        if not _needs_marginalizer(cbnet, node, lean):
            continue
        whole = nodes[-1].size
        for i in range(copies):
            mid = marginalizer_id(node.id, i)
            if mid in taken:
                raise NetError(f"generated name {mid!r} collides with an existing node")
            taken.add(mid)
            pick = (lambda st, i=i: st[i]) if copies > 1 else (lambda st: st[0])
            sizes = (node.size,) * copies
            m = delta_matrix(node.size, (whole,), lambda ps, sizes=sizes, pick=pick: pick(unpack(ps[0], sizes)))
            nodes.append(Node(mid, node.states, m, (node.id,), MARGINALIZER))
    return Net(tuple(nodes), CB)


@dataclass(frozen=True)
class LeafMap:
    """Which QB leaf carries each original node, and which leaves are summed away."""

    pairs: dict[str, str]
    summed_leaves: tuple[str, ...]

    def to_json(self) -> str:
        return json.dumps({"pairs": self.pairs, "summed_leaves": list(self.summed_leaves)}, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> LeafMap:
        doc = json.loads(text)
        return cls(dict(doc["pairs"]), tuple(doc["summed_leaves"]))

    def leaf(self, node_id: str) -> str:
        try:
            return self.pairs[node_id]
        except KeyError:
            raise NetError(f"{node_id!r} is not an original node") from None


def _is_uniform_power_of_two(node: Node) -> bool:
    return (
        not node.parents
        and node.components is None
        and gates.is_power_of_two(node.size)
        and node.size > 1
        and bool(np.allclose(node.matrix[:, 0], 1 / node.size, rtol=0, atol=1e-12))
    )


def embed_node(node: Node) -> UnitaryEmbedding:
    """Embedding used for one node of a marginalized net."""
    if _is_uniform_power_of_two(node):
        n = node.size
        return UnitaryEmbedding(gates.hadamard(int(math.log2(n))), (n, 1), (1, n))
    return embed_probability_matrix(node.matrix)


def embed_cbnet(cbnet: Net, lean: bool = False, cap_bits: int = DEFAULT_CAP_BITS) -> tuple[Net, LeafMap]:
    """Q-embed a classical net: marginalizers, then unitary nodes plus ancilla nodes.

    Every ordinary node of the marginalized net becomes a compound node whose
    components are one sink copy per parent followed by its own (fanout)
    components.  Its parents are the original parents followed by one
    ``<id>_src<j>`` source node per own component, pinned to state 0.  Each
    sink component is exposed by an ``<id>_snk<i>`` leaf.
    """
    mod = add_marginalizers(cbnet, lean)
    for node in mod.nodes:
        if node.kind == MARGINALIZER:
            continue
        dim = node.matrix.shape[0] * node.matrix.shape[1]
        if dim * dim > 2**cap_bits:
            raise CapError(f"embedding of node {node.id!r}", dim * dim, 2**cap_bits)

    taken = set(mod.ids)
    n_sinks = {n.id: len(n.parents) for n in mod.nodes if n.kind != MARGINALIZER}
    out: list[Node] = []

    def fresh(name: str) -> str:
        if name in taken:
            raise NetError(f"generated name {name!r} collides with an existing node")
        taken.add(name)
        return name

    for node in mod.nodes:
        if node.kind == MARGINALIZER:
            parent = mod[node.parents[0]]
            offset = n_sinks[parent.id]
            own = parent.component_sizes
            which = int(node.id.rsplit("_m", 1)[1]) if len(own) > 1 else 0
            sizes = tuple(mod[p].size for p in parent.parents) + own
            m = delta_matrix(node.size, (math.prod(sizes),), lambda ps: unpack(ps[0], sizes)[offset + which])
            out.append(Node(node.id, node.states, m.astype(complex), node.parents, MARGINALIZER))
            continue

        emb = embed_node(node)
        own_spaces = node.components or (node.states,)
        own_names = node.component_names or (node.id,)
        sources = []
        for j, space in enumerate(own_spaces):
            sid = fresh(source_id(node.id, j))
            amp = np.zeros((space.size, 1), dtype=complex)
            amp[0, 0] = 1
            out.append(Node(sid, space, amp, (), ANCILLA_SOURCE))
            sources.append(sid)
        sink_spaces = tuple(mod[p].states for p in node.parents)
        comps = sink_spaces + tuple(own_spaces)
        names = tuple(sink_id(node.id, i) for i in range(len(sink_spaces))) + tuple(own_names)
        states = StateSpace.product(comps) if len(comps) > 1 else comps[0]
        out.append(Node(
            node.id,
            states,
            emb.matrix,
            node.parents + tuple(sources),
            ORDINARY,
            components=comps if len(comps) > 1 else None,
            component_names=names if len(comps) > 1 else None,
        ))
        csizes = tuple(c.size for c in comps)
        for i, space in enumerate(sink_spaces):
            kid = fresh(sink_id(node.id, i))
            m = delta_matrix(space.size, (states.size,), lambda ps, i=i: unpack(ps[0], csizes)[i])
            out.append(Node(kid, space, m.astype(complex), (node.id,), ANCILLA_SINK))

    qbnet = Net(tuple(out), QB)

    pairs = {}
    for node in cbnet.nodes:
        kids = cbnet.children(node.id)
        if not kids:
            pairs[node.id] = marginalizer_id(node.id, 0)
            continue
        child = kids[0]
        link = mod[child].parents
        src = marginalizer_id(node.id, 0) if _needs_marginalizer(cbnet, node, lean) else node.id
        pairs[node.id] = sink_id(child, link.index(src))
    kept = set(pairs.values())
    summed = tuple(leaf for leaf in qbnet.leaves() if leaf not in kept)
    return qbnet, LeafMap(pairs, summed)


def original_copy(cbnet: Net, mod: Net, node_id: str) -> str:
    """Node of ``mod`` (from :func:`add_marginalizers`) carrying a plain copy of ``node_id``."""
    m0 = marginalizer_id(node_id, 0)
    return m0 if m0 in mod else node_id
