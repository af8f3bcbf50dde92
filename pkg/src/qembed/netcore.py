"""Data model, validation, ordering and JSON I/O for classical and quantum Bayesian nets.

Conventions used everywhere in the package:

* A state is identified by its integer position in a :class:`StateSpace`.
* Joint indices over several spaces are packed little-endian: the first
  space is the least-significant digit, so ``(x0, x1)`` over sizes
  ``(n0, n1)`` packs to ``x0 + n0 * x1``.  For bits this is ``dec(bin(x))``.
* A node matrix has one row per state of the node and one column per packed
  assignment of its parents, in the order the parents are listed.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import CycleError, NetError, ParseError

ORDINARY = "ordinary"
MARGINALIZER = "marginalizer"
ANCILLA_SOURCE = "ancilla-source"
ANCILLA_SINK = "ancilla-sink"
KINDS = (ORDINARY, MARGINALIZER, ANCILLA_SOURCE, ANCILLA_SINK)

CB = "cb"
QB = "qb"

STOCHASTIC_TOL = 1e-9
UNITARY_TOL = 1e-10


def pack(states: Sequence[int], sizes: Sequence[int]) -> int:
    index, stride = 0, 1
    for s, n in zip(states, sizes):
        index += s * stride
        stride *= n
    return index


def unpack(index: int, sizes: Sequence[int]) -> tuple[int, ...]:
    out = []
    for n in sizes:
        index, s = divmod(index, n)
        out.append(s)
    return tuple(out)


@dataclass(frozen=True)
class StateSpace:
    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(str(s) for s in self.labels)
        object.__setattr__(self, "labels", labels)
        if not labels:
            raise NetError("a state space needs at least one state")
        if len(set(labels)) != len(labels):
            raise NetError(f"duplicate state labels in {labels}")

    @property
    def size(self) -> int:
        return len(self.labels)

    def __len__(self):
        return len(self.labels)

    def index(self, state: str | int) -> int:
        """Position of ``state``; accepts a label or an integer index."""
        if isinstance(state, (int, np.integer)):
            if not 0 <= state < self.size:
                raise NetError(f"state index {state} out of range for {self.labels}")
            return int(state)
        try:
            return self.labels.index(str(state))
        except ValueError:
            pass
        if str(state).isdigit() and int(state) < self.size:
            return int(state)
        raise NetError(f"unknown state {state!r}; expected one of {self.labels}")

    @classmethod
    def range(cls, n: int) -> StateSpace:
        return cls(tuple(str(i) for i in range(n)))

    @classmethod
    def bits(cls, nb: int = 1) -> StateSpace:
        return cls.range(2**nb)

    @classmethod
    def product(cls, spaces: Sequence[StateSpace]) -> StateSpace:
        """Joint space of ``spaces``, first space least significant."""
        sizes = [s.size for s in spaces]
        labels = []
        for i in range(math.prod(sizes)):
            parts = unpack(i, sizes)
            labels.append(",".join(sp.labels[k] for sp, k in zip(spaces, parts)))
        return cls(tuple(labels))


def _frozen(a, dtype) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Node:
    """One node of a CB or QB net.

    ``matrix`` holds P(state | parents) for classical nets and the amplitude
    A(state | parents) for quantum nets.  ``components`` decomposes a compound
    state, e.g. a fanout node ``(x_c, x_d)``; its product must equal ``states``.
    """

    id: str
    states: StateSpace
    matrix: np.ndarray
    parents: tuple[str, ...] = ()
    kind: str = ORDINARY
    components: tuple[StateSpace, ...] | None = None
    component_names: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(self.parents))
        dtype = complex if np.iscomplexobj(self.matrix) else float
        object.__setattr__(self, "matrix", _frozen(self.matrix, dtype))
        if self.kind not in KINDS:
            raise NetError(f"node {self.id!r}: unknown kind {self.kind!r}")
        if self.components is not None:
            comps = tuple(self.components)
            object.__setattr__(self, "components", comps)
            if math.prod(c.size for c in comps) != self.states.size:
                raise NetError(f"node {self.id!r}: components do not multiply to {self.states.size} states")
            if self.component_names is not None and len(self.component_names) != len(comps):
                raise NetError(f"node {self.id!r}: one name per component required")
        if self.component_names is not None:
            object.__setattr__(self, "component_names", tuple(self.component_names))

    @property
    def size(self) -> int:
        return self.states.size

    @property
    def component_sizes(self) -> tuple[int, ...]:
        if self.components is None:
            return (self.size,)
        return tuple(c.size for c in self.components)

    def same_as(self, other: Node, atol: float = 0.0) -> bool:
        return (
            self.id == other.id
            and self.kind == other.kind
            and self.parents == other.parents
            and self.states == other.states
            and self.components == other.components
            and self.component_names == other.component_names
            and self.matrix.shape == other.matrix.shape
            and np.iscomplexobj(self.matrix) == np.iscomplexobj(other.matrix)
            and bool(np.allclose(self.matrix, other.matrix, rtol=0, atol=atol))
        )


@dataclass(frozen=True)
class Story:
    """A full assignment of states to the nodes of a net, with its weight."""

    assignment: Mapping[str, int]
    weight: complex | float = 1.0


@dataclass(frozen=True, eq=False)
class Net:
    nodes: tuple[Node, ...]
    flavor: str = CB

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        if self.flavor not in (CB, QB):
            raise NetError(f"unknown flavor {self.flavor!r}")

    @cached_property
    def _by_id(self) -> dict[str, Node]:
        return {n.id: n for n in self.nodes}

    def __getitem__(self, node_id: str) -> Node:
        try:
            return self._by_id[node_id]
        except KeyError:
            raise NetError(f"no node named {node_id!r}") from None

    def __contains__(self, node_id) -> bool:
        return node_id in self._by_id

    def __iter__(self) -> Iterator[Node]:
        return iter(self.nodes)

    def __len__(self):
        return len(self.nodes)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes)

    @cached_property
    def _children(self) -> dict[str, tuple[str, ...]]:
        kids: dict[str, list[str]] = {n.id: [] for n in self.nodes}
        for n in self.nodes:
            for p in n.parents:
                kids.setdefault(p, []).append(n.id)
        return {k: tuple(v) for k, v in kids.items()}

    def children(self, node_id: str) -> tuple[str, ...]:
        return self._children.get(node_id, ())

    def leaves(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes if not self.children(n.id))

    def parent_sizes(self, node_id: str) -> tuple[int, ...]:
        return tuple(self[p].size for p in self[node_id].parents)

    def packed_bits(self) -> float:
        """Total information content of a story, in bits."""
        return float(sum(math.log2(n.size) for n in self.nodes))

    def structurally_equal(self, other: Net, atol: float = 0.0) -> bool:
        return (
            self.flavor == other.flavor
            and len(self) == len(other)
            and all(a.same_as(b, atol) for a, b in zip(self.nodes, other.nodes))
        )


# ----------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Issue:
    kind: str
    node: str | None
    detail: str

    def __str__(self):
        where = f"node {self.node!r}: " if self.node is not None else ""
        return f"[{self.kind}] {where}{self.detail}"


@dataclass
class ValidationReport:
    issues: list[Issue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def __bool__(self):
        return self.ok

    def kinds(self) -> set[str]:
        return {i.kind for i in self.issues}

    def __str__(self):
        return "ok" if self.ok else "\n".join(map(str, self.issues))


def _find_cycle_member(net: Net) -> str | None:
    try:
        topological_order(net)
    except CycleError as e:
        return e.member
    return None


def validate(net: Net) -> ValidationReport:
    """Collect every violated invariant of ``net``; an empty report means well-formed."""
    report = ValidationReport()
    add = report.issues.append
    seen = set()
    for n in net.nodes:
        if n.id in seen:
            add(Issue("duplicate-id", n.id, "node id used more than once"))
        seen.add(n.id)
    dangling = False
    for n in net.nodes:
        if len(set(n.parents)) != len(n.parents):
            add(Issue("duplicate-parent", n.id, f"parents {n.parents} repeat an id"))
        for p in n.parents:
            if p not in net:
                add(Issue("dangling-parent", n.id, f"parent {p!r} does not exist"))
                dangling = True
    if not dangling:
        member = _find_cycle_member(net)
        if member is not None:
            add(Issue("cycle", member, "graph is not acyclic"))
    if dangling:
        return report

    for n in net.nodes:
        ncols = math.prod(net.parent_sizes(n.id))
        if n.matrix.shape != (n.size, ncols):
            add(Issue("shape", n.id, f"matrix is {n.matrix.shape}, expected {(n.size, ncols)}"))
            continue
        if net.flavor == CB:
            if np.iscomplexobj(n.matrix):
                add(Issue("dtype", n.id, "classical node carries complex entries"))
                continue
            if (n.matrix < 0).any():
                r, c = np.argwhere(n.matrix < 0)[0]
                add(Issue("negative", n.id, f"entry ({r},{c}) is {n.matrix[r, c]}"))
            sums = n.matrix.sum(axis=0)
        else:
            sums = (np.abs(n.matrix) ** 2).sum(axis=0)
            if n.size == ncols:
                dev = np.abs(n.matrix.conj().T @ n.matrix - np.eye(n.size)).max()
                if dev > UNITARY_TOL:
                    add(Issue("unitarity", n.id, f"max |A^H A - I| = {dev:.3e}"))
        bad = np.flatnonzero(np.abs(sums - 1) > STOCHASTIC_TOL)
        for c in bad:
            add(Issue("stochasticity", n.id, f"column {c} sums to {sums[c]:.12g}"))
        if n.kind == MARGINALIZER:
            if len(n.parents) != 1 or len(net.children(n.id)) > 1:
                add(Issue("marginalizer", n.id, "needs exactly one parent and at most one child"))
            elif not _is_delta(n.matrix):
                add(Issue("marginalizer", n.id, "payload is not a delta function"))
    return report


def _is_delta(m: np.ndarray) -> bool:
    a = np.abs(m)
    return bool(np.all((a == 0) | (a == 1)) and np.all(a.sum(axis=0) == 1))


# ----------------------------------------------------------------------------
# ordering


def topological_order(net: Net) -> list[str]:
    """Kahn's algorithm with a lexicographic tie-break, so the output is unique."""
    indeg = {n.id: 0 for n in net.nodes}
    for n in net.nodes:
        for p in n.parents:
            if p not in indeg:
                raise NetError(f"node {n.id!r} has unknown parent {p!r}")
            indeg[n.id] += 1
    ready = [i for i, d in indeg.items() if d == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        i = heapq.heappop(ready)
        order.append(i)
        for c in net.children(i):
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(ready, c)
    if len(order) != len(indeg):
        raise CycleError(min(i for i, d in indeg.items() if d > 0))
    return order


# ----------------------------------------------------------------------------
# JSON file format


def _fmt(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise NetError(f"cannot serialize non-finite number {x}")
    if x == 0:
        return "0"
    if x == int(x) and abs(x) < 2**53:
        return str(int(x))
    return format(x, ".17g")


def _dump_matrix(m: np.ndarray, complex_: bool, indent: str) -> str:
    rows = []
    for row in m:
        if complex_:
            cells = ", ".join(f"[{_fmt(v.real)}, {_fmt(v.imag)}]" for v in row)
        else:
            cells = ", ".join(_fmt(v) for v in row)
        rows.append(f"{indent}  [{cells}]")
    return "[\n" + ",\n".join(rows) + f"\n{indent}]"


def serialize_net(net: Net) -> str:
    """Render ``net`` in the JSON net format; numbers carry 17 significant digits."""
    quantum = net.flavor == QB
    ind = "    "
    blocks = []
    for n in net.nodes:
        lines = [
            f'{ind}  "id": {json.dumps(n.id)}',
            f'{ind}  "kind": {json.dumps(n.kind)}',
            f'{ind}  "parents": {json.dumps(list(n.parents))}',
            f'{ind}  "states": {json.dumps(list(n.states.labels))}',
        ]
        if n.components is not None:
            comps = [list(c.labels) for c in n.components]
            lines.append(f'{ind}  "components": {json.dumps(comps)}')
            if n.component_names is not None:
                lines.append(f'{ind}  "component_names": {json.dumps(list(n.component_names))}')
        key = "amp" if quantum else "cpt"
        lines.append(f'{ind}  "{key}": ' + _dump_matrix(n.matrix, quantum, ind + "  "))
        blocks.append(ind + "{\n" + ",\n".join(lines) + "\n" + ind + "}")
    body = ",\n".join(blocks)
    nodes = "[\n" + body + "\n  ]" if blocks else "[]"
    return "{\n" + f'  "flavor": {json.dumps(net.flavor)},\n' + f'  "nodes": {nodes}\n' + "}\n"


def _line_of(text: str, needle: str) -> int | None:
    pos = text.find(needle)
    return None if pos < 0 else text.count("\n", 0, pos) + 1


def parse_net(text: str) -> Net:
    """Parse the JSON net format, raising :class:`ParseError` with a location."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, f"line {e.lineno} col {e.colno}") from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", "line 1")
    flavor = doc.get("flavor", CB)
    if flavor not in (CB, QB):
        raise ParseError(f"flavor must be 'cb' or 'qb', got {flavor!r}", "flavor")
    raw_nodes = doc.get("nodes")
    if not isinstance(raw_nodes, list):
        raise ParseError("'nodes' must be a list", "nodes")

    parsed = []
    for k, raw in enumerate(raw_nodes):
        where = f"nodes[{k}]"
        if not isinstance(raw, dict) or "id" not in raw:
            raise ParseError("node needs an 'id'", where)
        nid = str(raw["id"])
        line = _line_of(text, json.dumps(nid))
        where = f"nodes[{k}] ({nid!r}, line {line})" if line else f"nodes[{k}] ({nid!r})"
        try:
            states = StateSpace(tuple(raw["states"]))
        except (KeyError, TypeError, NetError) as e:
            raise ParseError(f"bad 'states': {e}", where) from None
        comps = None
        if raw.get("components") is not None:
            comps = tuple(StateSpace(tuple(c)) for c in raw["components"])
        key = "amp" if flavor == QB else "cpt"
        if key not in raw:
            raise ParseError(f"missing '{key}'", where)
        try:
            if flavor == QB:
                arr = np.asarray(raw[key], dtype=float)
                if arr.ndim != 3 or arr.shape[-1] != 2:
                    raise ValueError("amplitudes must be rows of [re, im] pairs")
                matrix = arr[..., 0] + 1j * arr[..., 1]
            else:
                matrix = np.asarray(raw[key], dtype=float)
                if matrix.ndim != 2:
                    raise ValueError("cpt must be a list of rows")
        except (ValueError, TypeError) as e:
            raise ParseError(f"bad '{key}': {e}", where) from None
        try:
            node = Node(
                id=nid,
                states=states,
                matrix=matrix,
                parents=tuple(str(p) for p in raw.get("parents", [])),
                kind=raw.get("kind", ORDINARY),
                components=comps,
                component_names=raw.get("component_names"),
            )
        except NetError as e:
            raise ParseError(str(e), where) from None
        parsed.append((where, node))

    ids = {n.id: n for _, n in parsed}
    if len(ids) != len(parsed):
        raise ParseError("duplicate node ids", "nodes")
    for where, n in parsed:
        for p in n.parents:
            if p not in ids:
                raise ParseError(f"unknown parent {p!r}", f"{where}.parents")
        expected = (n.size, math.prod(ids[p].size for p in n.parents))
        if n.matrix.shape != expected:
            raise ParseError(
                f"{'amp' if flavor == QB else 'cpt'} is {n.matrix.shape[0]}x{n.matrix.shape[1]}, "
                f"parents and states require {expected[0]}x{expected[1]}",
                f"{where}.{'amp' if flavor == QB else 'cpt'}",
            )
    return Net(tuple(n for _, n in parsed), flavor)


def load_net(path) -> Net:
    with open(path, encoding="utf-8") as fh:
        return parse_net(fh.read())


def save_net(net: Net, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_net(net))


# ----------------------------------------------------------------------------
# small constructors


def delta_matrix(child_size: int, parent_sizes: Sequence[int], pick) -> np.ndarray:
    """0/1 matrix with a single one per column at row ``pick(parent_states)``."""
    ncols = math.prod(parent_sizes)
    m = np.zeros((child_size, ncols))
    for col in range(ncols):
        m[pick(unpack(col, parent_sizes)), col] = 1.0
    return m


def cb_node(node_id: str, probs, parents: Iterable[str] = (), states: StateSpace | None = None, **kw) -> Node:
    """Convenience constructor; ``probs`` may be a 1-D prior or a CPT."""
    m = np.asarray(probs, dtype=float)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if states is None:
        states = StateSpace.range(m.shape[0])
    return Node(node_id, states, m, tuple(parents), **kw)
