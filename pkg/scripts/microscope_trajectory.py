"""Plane trajectory of the amplification microscope for a voting net.

With no ``--p`` the net is the deterministic AND-like one and the path is
compared step by step with Grover's.
"""

from __future__ import annotations

import argparse
import math

import numpy as np

from qembed.algorithms import grover, microscope


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--nb", type=int, default=5)
    parser.add_argument("--target", type=int, default=0)
    parser.add_argument("--p", help="comma-separated P(y=0|x), 2**nb values")
    parser.add_argument("--alpha", type=float)
    args = parser.parse_args()

    if args.p:
        p = np.array([float(v) for v in args.p.split(",")])
    else:
        p = microscope.and_like_p(args.nb, args.target)
    setup = microscope.microscope_setup(p, args.alpha)
    res = microscope.microscope_run(setup)
    print(f"nb={setup.nb} theta={setup.theta:.6f} alpha={setup.alpha:.6f} r={setup.r}")
    ref = grover.grover_run(setup.nb, args.target, setup.r).path if args.p is None else None
    print(f"{'k':>3s} {'e0':>10s} {'e1':>10s} {'angle':>9s}" + (f" {'grover dev':>11s}" if ref is not None else ""))
    for k, (a, b) in enumerate(res.path):
        line = f"{k:3d} {a:10.6f} {b:10.6f} {math.atan2(b, a):9.5f}"
        if ref is not None:
            line += f" {np.abs(res.path[k] - ref[k]).max():11.1e}"
        print(line)
    print(f"|<e0|final>|^2 = {res.overlap:.6f}, model deviation {res.model_deviation:.1e}")


if __name__ == "__main__":
    main()
