"""Boolean functions given by their full truth tables."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import NetError, PromiseViolation


@dataclass(frozen=True, eq=False)
class BoolFn:
    """f: Bool^nb -> Bool^out_bits stored as integers ``table[x]``."""

    nb: int
    table: np.ndarray
    out_bits: int = 1

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.int64).reshape(-1)
        if t.size != 2**self.nb:
            raise NetError(f"table needs {2**self.nb} entries, has {t.size}")
        if (t < 0).any() or (t >= 2**self.out_bits).any():
            raise NetError(f"table values must lie in 0..{2**self.out_bits - 1}")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    def __call__(self, x: int) -> int:
        return int(self.table[x])

    @property
    def size(self) -> int:
        return self.table.size

    @classmethod
    def from_callable(cls, f: Callable[[int], int], nb: int, out_bits: int = 1) -> BoolFn:
        return cls(nb, np.array([f(x) for x in range(2**nb)]), out_bits)

    def is_constant(self) -> bool:
        return bool((self.table == self.table[0]).all())

    def is_balanced(self) -> bool:
        return self.out_bits == 1 and int(self.table.sum()) * 2 == self.size

    def to_list(self) -> list[int]:
        return [int(v) for v in self.table]


def constant(nb: int, value: int) -> BoolFn:
    return BoolFn(nb, np.full(2**nb, value & 1))


def parity(nb: int) -> BoolFn:
    return BoolFn.from_callable(lambda x: bin(x).count("1") & 1, nb)


def bit(nb: int, k: int) -> BoolFn:
    return BoolFn.from_callable(lambda x: (x >> k) & 1, nb)


def random_balanced(nb: int, rng: np.random.Generator) -> BoolFn:
    t = np.zeros(2**nb, dtype=np.int64)
    t[rng.permutation(2**nb)[: 2 ** (nb - 1)]] = 1
    return BoolFn(nb, t)


def linear(b: int, nb: int) -> BoolFn:
    """f(x) = b.x mod 2."""
    return BoolFn.from_callable(lambda x: bin(x & b).count("1") & 1, nb)


def planted_period(nb: int, delta: int, rng: np.random.Generator | None = None) -> BoolFn:
    """Random 2-to-1 f: Bool^nb -> Bool^nb with f(x) = f(x xor delta)."""
    if not 0 < delta < 2**nb:
        raise NetError(f"period must be a nonzero {nb}-bit value, got {delta}")
    rng = rng if rng is not None else np.random.default_rng(0)
    table = np.full(2**nb, -1, dtype=np.int64)
    images = rng.permutation(2**nb)[: 2 ** (nb - 1)]
    k = 0
    for x in range(2**nb):
        if table[x] < 0:
            table[x] = table[x ^ delta] = images[k]
            k += 1
    return BoolFn(nb, table, nb)


def simon_period(f: BoolFn) -> int:
    """Return the period of a 2-to-1 periodic f, or raise PromiseViolation."""
    n = f.size
    if n < 2:
        raise PromiseViolation("a period needs at least one input bit")
    delta = None
    for x in range(1, n):
        if f.table[x] == f.table[0]:
            delta = x
            break
    if delta is None:
        raise PromiseViolation("f is injective, so it has no period")
    idx = np.arange(n)
    if not (f.table[idx ^ delta] == f.table).all():
        raise PromiseViolation(f"f(x) != f(x xor {delta}) for some x")
    counts = np.bincount(f.table, minlength=2**f.out_bits)
    if set(np.unique(counts[counts > 0]).tolist()) != {2}:
        raise PromiseViolation("f is not 2-to-1")
    return delta


def parse_function(spec: str, nb: int, rng: np.random.Generator | None = None) -> BoolFn:
    """Named single-output functions: constant0/1, parity, bit<k>, balanced, or a 0/1 table."""
    spec = spec.strip().lower()
    if spec in ("constant0", "const0", "zero"):
        return constant(nb, 0)
    if spec in ("constant1", "const1", "one"):
        return constant(nb, 1)
    if spec == "parity":
        return parity(nb)
    if spec.startswith("bit") and spec[3:].isdigit():
        k = int(spec[3:])
        if k >= nb:
            raise NetError(f"bit {k} out of range for nb={nb}")
        return bit(nb, k)
    if spec == "balanced":
        return random_balanced(nb, rng if rng is not None else np.random.default_rng(0))
    if spec.startswith("table:"):
        digits = spec[6:]
        if any(c not in "01" for c in digits):
            raise NetError("table must be a string of 0/1 digits")
        return BoolFn(nb, np.array([int(c) for c in digits]))
    raise NetError(f"unknown function {spec!r}")
