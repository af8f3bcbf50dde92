"""Grover and Younes-Miller success probabilities over a range of register sizes.

For each nb the optimal iteration count, the simulated success probability,
the 2D rotation-model prediction and their deviation are tabulated.
"""

from __future__ import annotations

import argparse

from qembed.algorithms import grover


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-nb", type=int, default=10)
    parser.add_argument("--target", type=int, default=0)
    args = parser.parse_args()

    print(f"{'nb':>3s} {'N':>6s} | {'r':>3s} {'grover':>10s} {'2D dev':>9s} | {'r':>3s} {'younes':>10s} {'2D dev':>9s}")
    for nb in range(1, args.max_nb + 1):
        j = args.target % 2**nb
        g = grover.grover_run(nb, j)
        if nb <= 8:
            y = grover.younes_run(nb, j)
            ycols = f"{y.r:3d} {y.success:10.6f} {abs(y.success - y.model_success):9.1e}"
        else:
            ycols = f"{'':3s} {'-':>10s} {'':9s}"
        print(f"{nb:3d} {2**nb:6d} | {g.r:3d} {g.success:10.6f} {g.model_deviation:9.1e} | {ycols}")


if __name__ == "__main__":
    main()
