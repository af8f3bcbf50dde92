"""Bernstein-Vazirani: recover b from f(x) = b.x mod 2.

Three equivalent routes to |b>: flipping the bits of b directly, the
Hadamard-sandwiched phase oracle, and the version with an extra target bit
(bit nb) prepared in |-_x>.
"""

from __future__ import annotations

import numpy as np

from .. import gates
from ..errors import NetError
from ..netcore import QB, Net, Node, StateSpace
from ..qsim import StateVector, apply_all, apply_operator, leaf_distribution
from .boolfn import linear


def flip_operator(b: int, nb: int) -> np.ndarray:
    """omega_b: sigma_x on every bit where b has a one."""
    return gates.on_bits({i: gates.SIGMA_X for i in range(nb) if (b >> i) & 1}, nb)


def phase_operator(b: int, nb: int) -> np.ndarray:
    """H (-1)**(b.n) H, equal to omega_b."""
    phase = np.diag([(-1.0) ** gates.dot_bits(x, b) for x in range(2**nb)]).astype(complex)
    h = gates.hadamard(nb)
    return h @ phase @ h


def _check(b: int, nb: int) -> None:
    if not 0 <= b < 2**nb:
        raise NetError(f"b={b} does not fit in {nb} bits")


def run_plain(b: int, nb: int) -> StateVector:
    _check(b, nb)
    return apply_operator(StateVector.basis(0, nb), flip_operator(b, nb))


def run_phase(b: int, nb: int) -> StateVector:
    _check(b, nb)
    return apply_operator(StateVector.basis(0, nb), phase_operator(b, nb))


def run_with_target(b: int, nb: int) -> StateVector:
    """H(kappa), controlled flip of tau by b.x, H(kappa) on |0>_kappa |-_x>_tau."""
    _check(b, nb)
    tot = nb + 1
    start = StateVector(tot, np.kron(gates.MINUS_X, gates.basis_vector(0, 2**nb)))
    h_k = gates.hadamard_on(range(nb), tot)
    flip = gates.controlled_flip(linear(b, nb).table, range(nb), nb, tot)
    return apply_all(start, [h_k, flip, h_k])


def expected_with_target(b: int, nb: int) -> np.ndarray:
    return np.kron(gates.MINUS_X, gates.basis_vector(b, 2**nb))


def qbnet(b: int, nb: int) -> Net:
    """X -> X' with A(X'|X) = prod_i delta(X'_i, X_i xor b_i)."""
    n = 2**nb
    s = StateSpace.range(n)
    m = np.zeros((n, n), dtype=complex)
    for x in range(n):
        m[x ^ b, x] = 1
    return Net((Node("X", s, gates.basis_vector(0, n).reshape(-1, 1)), Node("X'", s, m, ("X",))), QB)


def bv_run(b: int, nb: int) -> dict:
    plain = run_plain(b, nb)
    phase = run_phase(b, nb)
    target = run_with_target(b, nb)
    net = leaf_distribution(qbnet(b, nb)).probs
    want = gates.basis_vector(b, 2**nb)
    return {
        "measured": int(np.argmax(plain.probabilities())),
        "plain_error": float(np.abs(plain.amps - want).max()),
        "phase_error": float(np.abs(phase.amps - want).max()),
        "target_error": float(np.abs(target.amps - expected_with_target(b, nb)).max()),
        "qbnet_error": float(np.abs(net - np.abs(want) ** 2).max()),
    }


def demo(nb: int = 3, b: int = 5) -> dict:
    out = bv_run(b, nb)
    return {"algorithm": "bernstein-vazirani", "inputs": {"nb": nb, "b": b}, **out}
