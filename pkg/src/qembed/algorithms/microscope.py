"""Amplification of small voting-net probabilities by repeated double reflection.

The voting net prepares Psi = (phi_p; phi_q) / sqrt(N) from |0>, with the
output bit y as the most significant bit.  Each step -R_Psi R_Psi'perp turns
the state clockwise by alpha in the plane of e0 = (phi_p^; 0) and
e1 = (0; phi_q^), driving it towards e0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import gates
from ..embedding import d_matrix
from ..errors import NetError
from ..qsim import StateVector, apply_operator
from .grover import grover_run
from .rotation import QUARTER_CW, angle_cw, iterations_to_target, rot_ccw, rot_cw, trajectory

NORM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class MicroscopeSetup:
    p: np.ndarray
    q: np.ndarray
    phi_p: np.ndarray
    phi_q: np.ndarray
    theta: float
    alpha: float
    r: int

    @property
    def n(self) -> int:
        return self.p.size

    @property
    def nb(self) -> int:
        return int(math.log2(self.n))

    @property
    def norm_p(self) -> float:
        return float(np.linalg.norm(self.phi_p))

    @property
    def norm_q(self) -> float:
        return float(np.linalg.norm(self.phi_q))


def microscope_setup(p, alpha: float | None = None, r: int | None = None) -> MicroscopeSetup:
    p = np.asarray(p, dtype=float).reshape(-1)
    if not gates.is_power_of_two(p.size):
        raise NetError(f"need 2**nb probabilities, got {p.size}")
    if ((p < 0) | (p > 1)).any():
        raise NetError("probabilities must lie in [0, 1]")
    q = 1 - p
    phi_p, phi_q = np.sqrt(p), np.sqrt(q)
    if np.linalg.norm(phi_p) < NORM_TOL:
        raise NetError("nothing to magnify: every p_i is zero")
    cos_half = min(1.0, float(np.linalg.norm(phi_q)) / math.sqrt(p.size))
    theta = 2 * math.acos(cos_half)
    alpha = theta if alpha is None else float(alpha)
    if r is None:
        r = iterations_to_target(math.pi / 2 - theta / 2, alpha)
    return MicroscopeSetup(p, q, phi_p, phi_q, theta, alpha, int(r))


def net_unitary(setup: MicroscopeSetup) -> np.ndarray:
    """U_net = D (I (x) H_nb): Hadamard root followed by the D-matrix for y."""
    return d_matrix(setup.p, setup.q) @ np.kron(gates.I2, gates.hadamard(setup.nb))


def plane_vectors(setup: MicroscopeSetup) -> tuple[np.ndarray, np.ndarray]:
    n = setup.n
    e0 = np.concatenate([setup.phi_p / setup.norm_p, np.zeros(n)]).astype(complex)
    if setup.norm_q > NORM_TOL:
        lower = setup.phi_q / setup.norm_q
    else:
        lower = gates.basis_vector(0, n).real
    e1 = np.concatenate([np.zeros(n), lower]).astype(complex)
    return e0, e1


def w_operator(setup: MicroscopeSetup) -> np.ndarray:
    """Quarter turn clockwise then alpha/2 counter-clockwise in the plane; identity elsewhere."""
    e = np.stack(plane_vectors(setup), axis=1)
    w2 = rot_ccw(setup.alpha / 2) @ QUARTER_CW
    return np.eye(2 * setup.n) - e @ e.conj().T + e @ w2 @ e.conj().T


def step_operator(setup: MicroscopeSetup) -> np.ndarray:
    """-R_Psi R_Psi'perp with R_Psi = U R_0 U^dagger and R_Psi'perp = W R_Psi W^dagger."""
    u = net_unitary(setup)
    r0 = gates.reflection(gates.basis_vector(0, 2 * setup.n))
    r_psi = u @ r0 @ u.conj().T
    w = w_operator(setup)
    r_perp = w @ r_psi @ w.conj().T
    return -r_psi @ r_perp


def model_2d(setup: MicroscopeSetup) -> np.ndarray:
    start = np.array([setup.norm_p, setup.norm_q]) / math.sqrt(setup.n)
    return trajectory(rot_cw(setup.alpha), start, setup.r)


@dataclass(frozen=True, eq=False)
class MicroscopeResult:
    setup: MicroscopeSetup
    final: StateVector
    overlap: float
    path: np.ndarray
    model: np.ndarray

    @property
    def model_deviation(self) -> float:
        return float(np.abs(self.path - self.model).max())

    @property
    def total_angle(self) -> float:
        return angle_cw(self.path[0], self.path[-1])


def microscope_run(setup: MicroscopeSetup) -> MicroscopeResult:
    u = net_unitary(setup)
    psi = u[:, 0]
    step = step_operator(setup)
    e0, e1 = plane_vectors(setup)
    state = StateVector(setup.nb + 1, psi)
    path = [(np.vdot(e0, state.amps), np.vdot(e1, state.amps))]
    for _ in range(setup.r):
        state = apply_operator(state, step)
        path.append((np.vdot(e0, state.amps), np.vdot(e1, state.amps)))
    overlap = float(abs(np.vdot(e0, state.amps)) ** 2)
    return MicroscopeResult(setup, state, overlap, np.real(np.array(path)), model_2d(setup))


def and_like_p(nb: int, j_targ: int) -> np.ndarray:
    p = np.zeros(2**nb)
    p[j_targ] = 1
    return p


def grover_correspondence(nb: int, j_targ: int) -> float:
    """Max difference between the microscope and Grover plane trajectories (AND-like p, alpha = theta)."""
    res = microscope_run(microscope_setup(and_like_p(nb, j_targ)))
    g = grover_run(nb, j_targ, res.setup.r)
    return float(np.abs(res.path - g.path).max())


def demo(nb: int = 5, target: int = 0, p: list[float] | None = None, alpha: float | None = None,
         r: int | None = None) -> dict:
    probs = and_like_p(nb, target) if p is None else np.asarray(p, dtype=float)
    setup = microscope_setup(probs, alpha, r)
    res = microscope_run(setup)
    out = {
        "algorithm": "microscope",
        "inputs": {"nb": setup.nb, "p": setup.p.tolist(), "alpha": setup.alpha},
        "theta": setup.theta,
        "alpha": setup.alpha,
        "r": setup.r,
        "r_alpha": setup.r * setup.alpha,
        "overlap_e0": res.overlap,
        "total_angle": res.total_angle,
        "model_deviation": res.model_deviation,
        "path": res.path.tolist(),
    }
    if p is None:
        out["grover_deviation"] = grover_correspondence(nb, target)
    return out
