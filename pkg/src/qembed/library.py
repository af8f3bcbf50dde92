"""Small reference nets used by tests, scripts and the CLI."""

from __future__ import annotations

import numpy as np

from .netcore import CB, Net, StateSpace, cb_node

BOOL = StateSpace(("0", "1"))


def _bern(p1: float) -> list[float]:
    return [1 - p1, p1]


def _cpt(p1_by_col) -> np.ndarray:
    """Binary CPT from P(node=1 | column) listed in packed parent order."""
    p1 = np.asarray(p1_by_col, dtype=float)
    return np.vstack([1 - p1, p1])


def lung_net() -> Net:
    """Asia / lung-disease diagnosis net, eight binary nodes."""
    e_cpt = np.zeros((2, 4))
    for col in range(4):
        l, t = col & 1, col >> 1
        e_cpt[l | t, col] = 1
    nodes = [
        cb_node("a", _bern(0.01), states=BOOL),
        cb_node("b", _cpt([0.30, 0.60]), ["s"], BOOL),
        # columns packed as e + 2 b
        cb_node("d", _cpt([0.10, 0.70, 0.80, 0.90]), ["e", "b"], BOOL),
        cb_node("e", e_cpt, ["l", "t"], BOOL),
        cb_node("l", _cpt([0.01, 0.10]), ["s"], BOOL),
        cb_node("s", _bern(0.5), states=BOOL),
        cb_node("t", _cpt([0.01, 0.05]), ["a"], BOOL),
        cb_node("x", _cpt([0.05, 0.98]), ["e"], BOOL),
    ]
    return Net(tuple(nodes), CB)


def _random_cpt(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.dirichlet(np.ones(rows), size=cols).T


def scattering_net(n_states: int = 2, seed: int = 7) -> Net:
    """Two-body scattering: a, b -> x -> c, d with random CPTs."""
    rng = np.random.default_rng(seed)
    s = StateSpace.range(n_states)
    n = n_states
    nodes = [
        cb_node("a", _random_cpt(rng, n, 1), states=s),
        cb_node("b", _random_cpt(rng, n, 1), states=s),
        cb_node("c", _random_cpt(rng, n, n), ["x"], s),
        cb_node("d", _random_cpt(rng, n, n), ["x"], s),
        cb_node("x", _random_cpt(rng, n, n * n), ["a", "b"], s),
    ]
    return Net(tuple(nodes), CB)


def voting_net(p) -> Net:
    """Uniform x over 2**nb states and y with P(y=0|x=i) = p[i]."""
    p = np.asarray(p, dtype=float)
    n = p.size
    xs = StateSpace.range(n)
    nodes = [
        cb_node("x", np.full(n, 1 / n), states=xs),
        cb_node("y", np.vstack([p, 1 - p]), ["x"], BOOL),
    ]
    return Net(tuple(nodes), CB)


def chain_net(length: int = 3, flip: float = 0.2, seed: int | None = None) -> Net:
    """x0 -> x1 -> ... binary chain; each link flips its input with probability ``flip``."""
    rng = np.random.default_rng(seed) if seed is not None else None
    nodes = [cb_node("x0", _bern(0.3) if rng is None else _random_cpt(rng, 2, 1), states=BOOL)]
    for k in range(1, length):
        m = np.array([[1 - flip, flip], [flip, 1 - flip]]) if rng is None else _random_cpt(rng, 2, 2)
        nodes.append(cb_node(f"x{k}", m, [f"x{k - 1}"], BOOL))
    return Net(tuple(nodes), CB)


def random_net(rng: np.random.Generator, n_nodes: int, max_parents: int = 2, max_states: int = 3,
               zero_prob: float = 0.0) -> Net:
    """Random DAG; node k only takes parents among nodes 0..k-1."""
    nodes = []
    sizes = []
    for k in range(n_nodes):
        size = int(rng.integers(2, max_states + 1))
        pool = list(range(k))
        npar = int(rng.integers(0, min(max_parents, k) + 1))
        parents = sorted(rng.choice(pool, size=npar, replace=False).tolist()) if npar else []
        cols = int(np.prod([sizes[p] for p in parents])) if parents else 1
        m = _random_cpt(rng, size, cols)
        if zero_prob:
            mask = rng.random(m.shape) < zero_prob
            mask[np.argmax(m, axis=0), np.arange(cols)] = False
            m = np.where(mask, 0.0, m)
            m = m / m.sum(axis=0, keepdims=True)
        nodes.append(cb_node(f"n{k}", m, [f"n{p}" for p in parents], StateSpace.range(size)))
        sizes.append(size)
    return Net(tuple(nodes), CB)


NETS = {
    "lung": lung_net,
    "scattering": scattering_net,
    "chain": chain_net,
}
