"""Simon's period finding, with the hidden period recovered over GF(2).

Register layout: kappa = bits 0..nb-1, tau_i = bit nb + i, so a basis index
is ``x + 2**nb * y``.  Dot products in the output distribution are parities.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .. import gates
from ..errors import InsufficientRank, NetError, PromiseViolation
from ..inference import substreams
from ..netcore import QB, Net, Node, StateSpace
from ..qsim import StateVector, apply_all, leaf_distribution
from .boolfn import BoolFn, planted_period, simon_period

SUPPORT_TOL = 1e-12


def parity_dot(a: int, b: int) -> int:
    return gates.dot_bits(a, b) & 1


def closed_form(nb: int, delta: int) -> np.ndarray:
    """P(X') = delta(X'.Delta mod 2, 0) / 2**(nb-1)."""
    return np.array([(parity_dot(xp, delta) == 0) / 2 ** (nb - 1) for xp in range(2**nb)], dtype=float)


def general_formula(f: BoolFn) -> np.ndarray:
    """P(X') = sum_Y' |sum_x (-1)**(x.X') delta(Y', f(x))|**2 / 4**nb, any f."""
    n = f.size
    out = np.zeros(n)
    for xp in range(n):
        amp = np.zeros(2**f.out_bits)
        for x in range(n):
            amp[f(x)] += (-1) ** gates.dot_bits(x, xp)
        out[xp] = float((amp**2).sum()) / n**2
    return out


def oracle(f: BoolFn) -> np.ndarray:
    n = f.size
    u = np.zeros((n * n, n * n), dtype=complex)
    for x in range(n):
        for y in range(n):
            u[x + n * (y ^ f(x)), x + n * y] = 1
    return u


def circuit_distribution(f: BoolFn) -> np.ndarray:
    nb = f.nb
    h_k = gates.hadamard_on(range(nb), 2 * nb)
    final = apply_all(StateVector.basis(0, 2 * nb), [h_k, oracle(f), h_k])
    return final.bit_marginal(range(nb))


def qbnet(f: BoolFn) -> Net:
    nb, n = f.nb, f.size
    s = StateSpace.range(n)
    h = gates.hadamard(nb)
    pick_x = np.zeros((n, n * n), dtype=complex)
    pick_y = np.zeros((n, n * n), dtype=complex)
    for c in range(n * n):
        pick_x[c % n, c] = 1
        pick_y[c // n, c] = 1
    e0 = gates.basis_vector(0, n).reshape(-1, 1)
    nodes = [
        Node("X", s, e0),
        Node("Y", s, e0),
        Node("x", s, h, ("X",)),
        Node("c", StateSpace.product([s, s]), oracle(f), ("x", "Y"), components=(s, s), component_names=("c_x", "c_y")),
        Node("x'", s, pick_x, ("c",)),
        Node("X'", s, h, ("x'",)),
        Node("Y'", s, pick_y, ("c",)),
    ]
    return Net(tuple(nodes), QB)


def qbnet_distribution(f: BoolFn) -> np.ndarray:
    dist = leaf_distribution(qbnet(f))
    return dist.probs.sum(axis=dist.axis("Y'"))


def simon_distribution(f: BoolFn) -> dict[str, np.ndarray]:
    delta = simon_period(f)
    return {
        "closed_form": closed_form(f.nb, delta),
        "formula": general_formula(f),
        "circuit": circuit_distribution(f),
        "qbnet": qbnet_distribution(f),
    }


def gf2_row_reduce(rows: Iterable[int], nb: int) -> tuple[list[int], list[int]]:
    """Reduced row echelon form over GF(2); returns (pivot rows, pivot bits).

    Pivots are taken from the most significant bit down, choosing the first
    remaining row that has the bit, so the result is deterministic.
    """
    work = [int(r) for r in rows if int(r)]
    pivots, bits = [], []
    for b in reversed(range(nb)):
        mask = 1 << b
        k = next((i for i, r in enumerate(work) if r & mask), None)
        if k is None:
            continue
        row = work.pop(k)
        work = [r ^ row if r & mask else r for r in work]
        pivots = [p ^ row if p & mask else p for p in pivots]
        pivots.append(row)
        bits.append(b)
    return pivots, bits


def gf2_rank(rows: Iterable[int], nb: int) -> int:
    return len(gf2_row_reduce(rows, nb)[0])


def simon_recover_period(vectors: Iterable[int], nb: int) -> int:
    """Unique nonzero Delta with v.Delta = 0 (mod 2) for every observed v."""
    pivots, bits = gf2_row_reduce(vectors, nb)
    rank = len(pivots)
    if rank < nb - 1:
        raise InsufficientRank(f"rank {rank} < {nb - 1}: need more samples")
    if rank == nb:
        raise PromiseViolation("observed vectors have full rank, so no nonzero period exists")
    free = next(b for b in range(nb) if b not in bits)
    delta = 1 << free
    for row, b in zip(pivots, bits):
        if (row >> free) & 1:
            delta |= 1 << b
    return delta


def support(dist: np.ndarray) -> list[int]:
    return [int(i) for i in np.flatnonzero(dist > SUPPORT_TOL)]


def sample_outcomes(dist: np.ndarray, n: int, seed: int = 0) -> np.ndarray:
    cdf = np.cumsum(dist)
    cdf /= cdf[-1]
    out = np.zeros(n, dtype=np.int64)
    for sl, rng in substreams(seed, n):
        out[sl] = np.minimum(np.searchsorted(cdf, rng.random(sl.stop - sl.start), side="right"), dist.size - 1)
    return out


def demo(nb: int = 3, period: int = 5, seed: int = 0, samples: int = 16) -> dict:
    if not 0 < period < 2**nb:
        raise NetError(f"period must lie in 1..{2**nb - 1}")
    f = planted_period(nb, period, np.random.default_rng(seed))
    d = simon_distribution(f)
    draws = sample_outcomes(d["circuit"], samples, seed)
    try:
        from_samples = simon_recover_period(draws, nb)
    except InsufficientRank:
        from_samples = None
    dev = max(float(np.abs(d[k] - d["closed_form"]).max()) for k in ("formula", "circuit", "qbnet"))
    return {
        "algorithm": "simon",
        "inputs": {"nb": nb, "period": period, "seed": seed, "samples": samples, "table": f.to_list()},
        "distribution": {k: v.tolist() for k, v in d.items()},
        "support": support(d["circuit"]),
        "recovered_period": simon_recover_period(support(d["circuit"]), nb),
        "samples": draws.tolist(),
        "recovered_from_samples": from_samples,
        "max_deviation": dev,
    }
