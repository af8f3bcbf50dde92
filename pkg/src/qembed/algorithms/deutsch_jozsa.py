"""Deutsch-Jozsa: decide whether f is constant or balanced with one query.

Register layout: control bits kappa are bits 0..nb-1, the target tau is
bit nb, so a basis index is ``x + 2**nb * y``.
"""

from __future__ import annotations

import numpy as np

from .. import gates
from ..errors import PromiseViolation
from ..netcore import QB, Net, Node, StateSpace
from ..qsim import StateVector, apply_all, leaf_distribution
from .boolfn import BoolFn, parse_function

CLASS_TOL = 1e-9


def closed_form(f: BoolFn) -> np.ndarray:
    """P(X') = |sum_x (-1)**(x.X' + f(x))|**2 / 4**nb."""
    n = f.size
    x = np.arange(n)
    signs = (-1.0) ** f.table
    out = np.empty(n)
    for xp in range(n):
        dots = np.array([gates.dot_bits(int(v), xp) for v in x])
        out[xp] = abs(np.sum((-1.0) ** dots * signs)) ** 2 / n**2
    return out


def circuit_ops(f: BoolFn) -> list[np.ndarray]:
    """Factors of Omega in the order they act on the input state."""
    nb = f.nb
    tot = nb + 1
    sx_t = gates.on_bit(gates.SIGMA_X, nb, tot)
    h_t = gates.on_bit(gates.H1, nb, tot)
    h_k = gates.hadamard_on(range(nb), tot)
    oracle = gates.controlled_flip(f.table, range(nb), nb, tot)
    return [sx_t, h_t, h_k, oracle, h_k, h_t, sx_t]


def circuit_distribution(f: BoolFn) -> np.ndarray:
    final = apply_all(StateVector.basis(0, f.nb + 1), circuit_ops(f))
    return final.bit_marginal(range(f.nb))


def qbnet(f: BoolFn) -> Net:
    """QB net whose leaves (X', Y') carry the output of the algorithm."""
    nb, n = f.nb, f.size
    xs, bs = StateSpace.range(n), StateSpace.range(2)
    h = gates.hadamard(nb)
    c_mat = np.zeros((2 * n, 2 * n), dtype=complex)
    for x in range(n):
        for y in range(2):
            c_mat[x + n * (y ^ f(x)), x + n * y] = 1
    pick_x = np.zeros((n, 2 * n), dtype=complex)
    pick_y = np.zeros((2, 2 * n), dtype=complex)
    for c in range(2 * n):
        pick_x[c % n, c] = 1
        pick_y[c // n, c] = 1
    # y | Y has amplitude (-1)**(y * not Y) / sqrt 2
    y_mat = np.array([[1, 1], [-1, 1]], dtype=complex) * gates.SQRT1_2
    # Y' | y' has amplitude (-1)**(not Y' * y') / sqrt 2
    yp_mat = np.array([[1, -1], [1, 1]], dtype=complex) * gates.SQRT1_2
    nodes = [
        Node("X", xs, gates.basis_vector(0, n).reshape(-1, 1)),
        Node("Y", bs, gates.basis_vector(0, 2).reshape(-1, 1)),
        Node("x", xs, h, ("X",)),
        Node("y", bs, y_mat, ("Y",)),
        Node("c", StateSpace.product([xs, bs]), c_mat, ("x", "y"), components=(xs, bs), component_names=("c_x", "c_y")),
        Node("x'", xs, pick_x, ("c",)),
        Node("y'", bs, pick_y, ("c",)),
        Node("X'", xs, h, ("x'",)),
        Node("Y'", bs, yp_mat, ("y'",)),
    ]
    return Net(tuple(nodes), QB)


def qbnet_distribution(f: BoolFn) -> np.ndarray:
    dist = leaf_distribution(qbnet(f))
    return dist.probs.sum(axis=dist.axis("Y'"))


def dj_distribution(f: BoolFn) -> dict[str, np.ndarray]:
    """Output distribution of X' by closed form, circuit simulation and QB net."""
    return {"closed_form": closed_form(f), "circuit": circuit_distribution(f), "qbnet": qbnet_distribution(f)}


def dj_classify(f: BoolFn) -> str:
    if not (f.is_constant() or f.is_balanced()):
        raise PromiseViolation(f"f has {int(f.table.sum())} ones out of {f.size}: neither constant nor balanced")
    p0 = float(circuit_distribution(f)[0])
    if abs(p0 - 1) < CLASS_TOL:
        return "constant"
    if abs(p0) < CLASS_TOL:
        return "balanced"
    raise PromiseViolation(f"P(X'=0) = {p0!r} is neither 0 nor 1")


def demo(nb: int = 3, f: str = "balanced", seed: int = 0) -> dict:
    fn = parse_function(f, nb, np.random.default_rng(seed))
    d = dj_distribution(fn)
    dev = max(float(np.abs(d["circuit"] - d["closed_form"]).max()), float(np.abs(d["qbnet"] - d["closed_form"]).max()))
    return {
        "algorithm": "deutsch-jozsa",
        "inputs": {"nb": nb, "f": f, "seed": seed, "table": fn.to_list()},
        "classification": dj_classify(fn),
        "p_x0": float(d["circuit"][0]),
        "distribution": {k: v.tolist() for k, v in d.items()},
        "max_deviation": dev,
    }
