"""Two-dimensional rotation and reflection helpers shared by the amplification algorithms."""

from __future__ import annotations

import math

import numpy as np

from .. import gates


def rot_cw(angle: float) -> np.ndarray:
    """Clockwise rotation [[c, s], [-s, c]] in the (e0, e1) plane."""
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, s], [-s, c]])


def rot_ccw(angle: float) -> np.ndarray:
    return rot_cw(-angle)


QUARTER_CW = np.array([[0.0, 1.0], [-1.0, 0.0]])


def double_reflection(e_first: np.ndarray, e_second: np.ndarray) -> np.ndarray:
    """-R_a R_b for unit vectors a (applied last) and b (applied first)."""
    return -gates.reflection(e_first) @ gates.reflection(e_second)


def tilted_e1(theta: float) -> np.ndarray:
    """e1 rotated clockwise by theta/2."""
    return rot_cw(theta / 2) @ np.array([0.0, 1.0])


def angle_cw(v_from: np.ndarray, v_to: np.ndarray) -> float:
    """Clockwise angle carrying 2D vector ``v_from`` onto the direction of ``v_to``."""
    a = math.atan2(float(np.real(v_from[1])), float(np.real(v_from[0])))
    b = math.atan2(float(np.real(v_to[1])), float(np.real(v_to[0])))
    return a - b


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def iterations_to_target(start_angle: float, step: float) -> int:
    """Number of steps of size ``step`` that best covers ``start_angle`` (k = 0 branch)."""
    if step <= 0:
        return 0
    return max(0, round_half_up(start_angle / step))


def trajectory(step_matrix: np.ndarray, start: np.ndarray, r: int) -> np.ndarray:
    """Array of the r + 1 vectors start, M start, ..., M^r start."""
    out = [np.asarray(start)]
    for _ in range(r):
        out.append(step_matrix @ out[-1])
    return np.array(out)
