"""Grover search and the Younes-Miller variant with one extra bit.

Both are simulated on the full register and compared with the rotation they
perform in the plane spanned by the start vector and the target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import gates
from ..errors import NetError
from ..netcore import QB, Net, Node, StateSpace
from ..qsim import StateVector, apply_operator, leaf_distribution
from .rotation import rot_cw, round_half_up, trajectory

QBNET_MAX_BITS = 6


def grover_theta(n: int) -> float:
    """Rotation angle per iteration: sin(theta) = 2 sqrt(N-1) / N."""
    return math.asin(min(1.0, 2 * math.sqrt(n - 1) / n))


def grover_optimal_r(n: int) -> int:
    """r = round(pi / (2 theta) - 1/2), the k = 0 choice."""
    if n <= 1:
        return 0
    return max(0, round_half_up(math.pi / (2 * grover_theta(n)) - 0.5))


def _check(nb: int, j_targ: int) -> None:
    if not 0 <= j_targ < 2**nb:
        raise NetError(f"target {j_targ} outside 0..{2**nb - 1}")


def uniform(nb: int) -> np.ndarray:
    return np.full(2**nb, 1 / math.sqrt(2**nb), dtype=complex)


def grover_operator(nb: int, j_targ: int) -> np.ndarray:
    """-R_mu R_phi."""
    return -gates.reflection(uniform(nb)) @ gates.reflection(gates.basis_vector(j_targ, 2**nb))


def plane_basis(nb: int, j_targ: int) -> tuple[np.ndarray, np.ndarray]:
    """e0 = phi, e1 = phi_not / sqrt(N-1)."""
    n = 2**nb
    e0 = gates.basis_vector(j_targ, n)
    e1 = (np.ones(n) - e0) / math.sqrt(n - 1)
    return e0, e1


@dataclass(frozen=True, eq=False)
class GroverResult:
    final: StateVector
    success: float
    r: int
    theta: float
    path: np.ndarray  # (r+1, 2) plane coordinates of the simulated state
    model: np.ndarray  # (r+1, 2) coordinates from the 2D rotation model

    @property
    def model_deviation(self) -> float:
        return float(np.abs(self.path - self.model).max())


def grover_2d(n: int, r: int) -> np.ndarray:
    """Rotation-model trajectory of mu in the (phi, phi_not) plane."""
    theta = grover_theta(n)
    start = np.array([1 / math.sqrt(n), math.sqrt((n - 1) / n)])
    return trajectory(rot_cw(theta), start, r)


def grover_success_2d(n: int, r: int) -> float:
    return math.sin((2 * r + 1) * grover_theta(n) / 2) ** 2


def grover_run(nb: int, j_targ: int, r: int | None = None) -> GroverResult:
    _check(nb, j_targ)
    n = 2**nb
    r = grover_optimal_r(n) if r is None else r
    op = grover_operator(nb, j_targ)
    state = StateVector(nb, uniform(nb))
    e0, e1 = plane_basis(nb, j_targ) if n > 1 else (np.ones(1), np.zeros(1))
    path = [(e0 @ state.amps, e1 @ state.amps)]
    for _ in range(r):
        state = apply_operator(state, op)
        path.append((e0 @ state.amps, e1 @ state.amps))
    success = float(abs(state.amps[j_targ]) ** 2)
    model = grover_2d(n, r) if n > 1 else np.array([[1.0, 0.0]] * (r + 1))
    return GroverResult(state, success, r, grover_theta(n), np.real(np.array(path)), model)


def swap_permutation(j_targ: int, n: int) -> np.ndarray:
    """Permutation Q exchanging |j_targ> and |0>."""
    perm = np.arange(n)
    perm[[0, j_targ]] = perm[[j_targ, 0]]
    q = np.zeros((n, n))
    q[perm, np.arange(n)] = 1
    return q


def single_query_state(nb: int, j_targ: int, r: int) -> np.ndarray:
    """Q^T (-R_mu R_|0>)^r mu: the whole search with one target-dependent step."""
    n = 2**nb
    op = grover_operator(nb, 0)
    v = uniform(nb)
    for _ in range(r):
        v = op @ v
    return swap_permutation(j_targ, n).T @ v


def qbnet(nb: int, j_targ: int, r: int) -> Net:
    """Chain X0 -> Xh -> X1 -> ... -> Xr; Xh prepares mu from |0>."""
    n = 2**nb
    s = StateSpace.range(n)
    op = grover_operator(nb, j_targ)
    nodes = [Node("X0", s, gates.basis_vector(0, n).reshape(-1, 1)), Node("Xh", s, gates.hadamard(nb), ("X0",))]
    prev = "Xh"
    for i in range(1, r + 1):
        nodes.append(Node(f"X{i}", s, op, (prev,)))
        prev = f"X{i}"
    return Net(tuple(nodes), QB)


# ----------------------------------------------------------------------------
# Younes-Miller: tau is bit nb


def younes_theta(n: int) -> float:
    """sin(theta) = sqrt(2N - 1) / N, i.e. the Grover angle for 2N states."""
    return math.asin(min(1.0, math.sqrt(2 * n - 1) / n))


def younes_vectors(nb: int, j_targ: int) -> tuple[np.ndarray, np.ndarray]:
    """mu~ = |0>_tau mu and phi~ = |-_x>_tau phi."""
    n = 2**nb
    mu_t = np.kron(gates.KET0, uniform(nb))
    phi_t = np.kron(gates.MINUS_X, gates.basis_vector(j_targ, n))
    return mu_t, phi_t


def younes_operator(nb: int, j_targ: int) -> np.ndarray:
    mu_t, phi_t = younes_vectors(nb, j_targ)
    return -gates.reflection(mu_t) @ gates.reflection(phi_t)


def younes_identity_errors(nb: int, j_targ: int) -> dict[str, float]:
    """Check the gate-level forms of R_mu~ and R_phi~ against the plain reflections."""
    n = 2**nb
    tot = nb + 1
    mu_t, phi_t = younes_vectors(nb, j_targ)
    h_k = gates.hadamard_on(range(nb), tot)
    r_mu = h_k @ gates.reflection(gates.basis_vector(0, 2 * n)) @ h_k
    # sigma_x(tau) raised to the projector onto phi
    pi_phi = gates.projector(gates.basis_vector(j_targ, n))
    r_phi = np.eye(2 * n) + np.kron(gates.SIGMA_X - gates.I2, pi_phi)
    return {
        "r_mu": float(np.abs(r_mu - gates.reflection(mu_t)).max()),
        "r_phi": float(np.abs(r_phi - gates.reflection(phi_t)).max()),
        "overlap": float(abs(np.vdot(phi_t, mu_t)) - 1 / math.sqrt(2 * n)),
    }


def younes_2d(n: int, r: int) -> np.ndarray:
    theta = younes_theta(n)
    start = np.array([1 / math.sqrt(2 * n), math.sqrt((2 * n - 1) / (2 * n))])
    return trajectory(rot_cw(theta), start, r)


def younes_success_2d(n: int, r: int) -> float:
    """P(kappa = j_targ): a**2 from the phi~ part plus b**2 / (2N - 1) from e1."""
    a, b = younes_2d(n, r)[-1]
    return float(a**2 + b**2 / (2 * n - 1))


@dataclass(frozen=True, eq=False)
class YounesResult:
    final: StateVector
    success: float
    r: int
    theta: float
    model_success: float


def younes_run(nb: int, j_targ: int, r: int | None = None) -> YounesResult:
    _check(nb, j_targ)
    n = 2**nb
    r = grover_optimal_r(2 * n) if r is None else r
    mu_t, _ = younes_vectors(nb, j_targ)
    op = younes_operator(nb, j_targ)
    state = StateVector(nb + 1, mu_t)
    for _ in range(r):
        state = apply_operator(state, op)
    success = float(state.bit_marginal(range(nb))[j_targ])
    return YounesResult(state, success, r, younes_theta(n), younes_success_2d(n, r))


# ----------------------------------------------------------------------------


def demo(nb: int = 4, target: int = 0, r: int | None = None) -> dict:
    res = grover_run(nb, target, r)
    sq = single_query_state(nb, target, res.r)
    out = {
        "algorithm": "grover",
        "inputs": {"nb": nb, "target": target},
        "r": res.r,
        "theta": res.theta,
        "success": res.success,
        "success_2d": grover_success_2d(2**nb, res.r),
        "model_deviation": res.model_deviation,
        "single_query_deviation": float(np.abs(sq - res.final.amps).max()),
        "distribution": res.final.probabilities().tolist(),
    }
    if nb <= QBNET_MAX_BITS:
        net = leaf_distribution(qbnet(nb, target, res.r))
        out["qbnet_deviation"] = float(np.abs(net.probs - res.final.probabilities()).max())
    return out


def demo_younes(nb: int = 4, target: int = 0, r: int | None = None) -> dict:
    res = younes_run(nb, target, r)
    return {
        "algorithm": "younes",
        "inputs": {"nb": nb, "target": target},
        "r": res.r,
        "r_grover_2n": grover_optimal_r(2 ** (nb + 1)),
        "theta": res.theta,
        "success": res.success,
        "success_2d": res.model_success,
        "identity_errors": younes_identity_errors(nb, target),
        "distribution": res.final.bit_marginal(range(nb)).tolist(),
    }
