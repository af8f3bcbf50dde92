"""Dense single- and multi-bit operators.

Bit ``alpha`` of a register is bit ``alpha`` of the basis-state index
(``index = sum x_alpha 2**alpha``), so an operator on bit ``alpha`` of an
``nb``-bit register is ``I(2**(nb-1-alpha)) (x) M (x) I(2**alpha)``.
"""

from __future__ import annotations

import math
from functools import reduce
from typing import Callable, Iterable, Sequence

import numpy as np

SQRT1_2 = 1 / math.sqrt(2)

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}
H1 = np.array([[1, 1], [1, -1]], dtype=complex) * SQRT1_2
NUMBER = np.array([[0, 0], [0, 1]], dtype=complex)  # n = |1><1|
NUMBER_BAR = np.array([[1, 0], [0, 0]], dtype=complex)  # nbar = |0><0|
KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
MINUS_X = np.array([1, -1], dtype=complex) * SQRT1_2


def kron_all(mats: Iterable[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, mats, np.eye(1, dtype=complex))


def on_bits(ops: dict[int, np.ndarray], nb: int) -> np.ndarray:
    """Tensor product with ``ops[alpha]`` on bit alpha and identity elsewhere."""
    return kron_all(ops.get(a, I2) for a in reversed(range(nb)))


def on_bit(m: np.ndarray, alpha: int, nb: int) -> np.ndarray:
    return on_bits({alpha: m}, nb)


def hadamard(nb: int) -> np.ndarray:
    """Normalized nb-bit Hadamard; entry (b, b') is (-1)**(b.b') / sqrt(2**nb)."""
    return kron_all([H1] * nb)


def hadamard_on(bits: Sequence[int], nb: int) -> np.ndarray:
    return on_bits({a: H1 for a in bits}, nb)


def dot_bits(a: int, b: int) -> int:
    """Ordinary (not mod 2) dot product of the binary expansions of a and b."""
    return bin(a & b).count("1")


def controlled_flip(f: Callable[[int], int] | Sequence[int], controls: Sequence[int], target: int, nb: int) -> np.ndarray:
    """Permutation flipping ``target`` iff f(control register value) is 1."""
    table = f if not callable(f) else None
    dim = 2**nb
    u = np.zeros((dim, dim), dtype=complex)
    for i in range(dim):
        x = sum(((i >> c) & 1) << k for k, c in enumerate(controls))
        fx = int(table[x]) if table is not None else int(f(x))
        u[i ^ ((fx & 1) << target), i] = 1
    return u


def reflection(v: np.ndarray) -> np.ndarray:
    """R_v = 1 - 2 v v^dagger for a unit vector v."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    return np.eye(v.size, dtype=complex) - 2 * np.outer(v, v.conj())


def projector(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())


def basis_vector(j: int, dim: int) -> np.ndarray:
    e = np.zeros(dim, dtype=complex)
    e[j] = 1
    return e


def is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0
