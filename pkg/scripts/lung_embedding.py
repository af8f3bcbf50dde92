"""Embed the lung-disease net, verify it, and compare a few posteriors.

Prints the node layout of the quantum net, the verification error and
P(query | evidence) from both engines, plus a sampled estimate.
"""

from __future__ import annotations

import argparse
import math
import time

from qembed.embedding import embed_cbnet
from qembed.inference import conditional, exact_joint, marginal
from qembed.library import lung_net
from qembed.qsim import embedded_joint, estimate_conditional, sample_leaves, verify_net_embedding

QUERIES = [
    ("d", {}),
    ("l", {"s": "1"}),
    ("t", {"a": "1", "x": "1"}),
    ("e", {"d": "1", "x": "1"}),
]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--lean", action="store_true")
    parser.add_argument("-n", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    cb = lung_net()
    t0 = time.perf_counter()
    qb, leafmap = embed_cbnet(cb, lean=args.lean)
    rep = verify_net_embedding(qb, cb, leafmap)
    dt = time.perf_counter() - t0
    print(f"{len(cb)} classical nodes -> {len(qb)} quantum nodes ({qb.packed_bits():g} packed bits)")
    for node in qb.nodes:
        print(f"  {node.id:8s} {node.kind:14s} size {node.size:3d}  parents {', '.join(node.parents) or '-'}")
    print(f"verification: max error {rep.max_error:.2e} in {dt:.3f}s")
    print("leaf map:", ", ".join(f"{k}->{v}" for k, v in leafmap.pairs.items()))

    classical = exact_joint(cb)
    quantum = embedded_joint(qb, cb, leafmap)
    samples = sample_leaves(qb, args.n, seed=args.seed)
    print(f"\n{'query':24s} {'classical':>12s} {'quantum':>12s} {'sampled':>12s} {'SE':>9s}")
    for q, ev in QUERIES:
        pc = conditional(classical, [q], ev).probs[1]
        pq = conditional(quantum, [q], ev).probs[1]
        est = estimate_conditional(samples, [q], ev, leafmap)
        p_ev = marginal(classical, list(ev))[{k: int(v) for k, v in ev.items()}] if ev else 1.0
        accepted = args.n * p_ev
        se = math.sqrt(pc * (1 - pc) / max(accepted, 1))
        label = f"P({q}=1" + (" | " + ",".join(f"{k}={v}" for k, v in ev.items()) if ev else "") + ")"
        print(f"{label:24s} {pc:12.6f} {pq:12.6f} {est.probs[1]:12.6f} {se:9.2e}")


if __name__ == "__main__":
    main()
