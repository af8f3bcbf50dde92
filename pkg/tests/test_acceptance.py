"""End-to-end acceptance checks.

Each check returns ``(ok, detail)``.  ``test_acceptance_summary`` runs all of
them and prints one PASS/FAIL line per check; the parametrized test asserts
each one individually so failures show up by number.  Run this file directly
(``python3 tests/test_acceptance.py``) to get the summary without pytest.
"""

from __future__ import annotations

import itertools
import math
import time

import numpy as np
import pytest

from qembed import gates
from qembed.algorithms import bernstein_vazirani as bv
from qembed.algorithms import deutsch_jozsa as dj
from qembed.algorithms import grover, microscope, simon
from qembed.algorithms.boolfn import constant, planted_period, random_balanced
from qembed.embedding import (
    AND_LIKE, MULTI_TARGET, OR_LIKE, compose_quasi_deterministic, embed_cbnet,
    embed_deterministic_gate, embed_probability_matrix, embed_quasi_deterministic, has_matrix,
)
from qembed.inference import exact_joint, marginal
from qembed.library import lung_net, scattering_net
from qembed.qsim import embedded_joint, leaf_distribution, sample_leaves, verify_net_embedding


def _random_stochastic(rng, rows, cols):
    return rng.dirichlet(np.ones(rows), size=cols).T


def check_01():
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst_u = worst_e = 0.0
    for _ in range(200):
        rows = int(rng.choice([2, 3, 4]))
        cols = int(rng.choice([2, 4, 8]))
        p = _random_stochastic(rng, rows, cols)
        emb = embed_probability_matrix(p)
        worst_u = max(worst_u, emb.unitarity_error())
        worst_e = max(worst_e, emb.embedding_error(p))
    dt = time.perf_counter() - t0
    ok = worst_u < 1e-10 and worst_e < 1e-12 and dt < 10
    return ok, f"unitarity {worst_u:.1e}, embedding {worst_e:.1e}, {dt:.2f}s"


def check_02():
    err = float(np.abs(has_matrix(gates.H1) - 0.5 * np.ones((2, 2))).max())
    for theta in np.linspace(-3, 3, 13):
        c, s = math.cos(theta), math.sin(theta)
        rot = np.array([[c, -s], [s, c]])
        want = np.array([[c * c, s * s], [s * s, c * c]])
        err = max(err, float(np.abs(has_matrix(rot) - want).max()))
    return err <= 1e-15, f"max error {err:.1e}"


def _lung_t1_by_hand():
    # P(t=1) = P(t=1|a=1) P(a=1) + P(t=1|a=0) P(a=0)
    return 0.05 * 0.01 + 0.01 * 0.99


def check_03():
    t0 = time.perf_counter()
    cb = lung_net()
    qb, leafmap = embed_cbnet(cb)
    report = verify_net_embedding(qb, cb, leafmap)
    got = embedded_joint(qb, cb, leafmap)
    p_t = float(marginal(got, ["t"]).probs[1])
    oracle = float(marginal(exact_joint(cb), ["t"]).probs[1])
    dt = time.perf_counter() - t0
    ok = (report.max_error < 1e-9 and abs(p_t - oracle) < 1e-12
          and abs(oracle - _lung_t1_by_hand()) < 1e-12 and got.probs.size == 2**8 and dt < 60)
    return ok, f"max dev {report.max_error:.1e}, P(t=1) = {p_t:.12g}, {dt:.2f}s"


def check_04():
    cb = scattering_net(2)
    qb, leafmap = embed_cbnet(cb)
    dist = leaf_distribution(qb)
    pa, pb = cb["a"].matrix[:, 0], cb["b"].matrix[:, 0]
    px, pc, pd = cb["x"].matrix, cb["c"].matrix, cb["d"].matrix
    # leaves carrying a, b (sinks of x), the two copies of x (sinks of c and d), c, d
    err = 0.0
    for a, b, xc, xd, c, d in itertools.product(range(2), repeat=6):
        want = math.sqrt(pa[a] * pb[b] * px[xc, a + 2 * b] * pc[c, xc] * pd[d, xd]) * (xc == xd)
        leaf = {"x_snk0": a, "x_snk1": b, "c_snk0": xc, "d_snk0": xd, "c_m0": c, "d_m0": d}
        err = max(err, abs(dist.amplitudes[tuple(leaf[i] for i in dist.scope)] - want))
    return err < 1e-12, f"max amplitude error {err:.1e} over 64 assignments"


def check_05():
    rng = np.random.default_rng(5)
    fs = [constant(3, 0), constant(3, 1)] + [random_balanced(3, rng) for _ in range(100)]
    worst_p, worst_agree = 0.0, 0.0
    for f in fs:
        d = dj.dj_distribution(f)
        want = 1.0 if f.is_constant() else 0.0
        worst_p = max(worst_p, max(abs(v[0] - want) for v in d.values()))
        vals = list(d.values())
        worst_agree = max(worst_agree, max(float(np.abs(u - v).max()) for u in vals for v in vals))
    ok = worst_p < 1e-12 and worst_agree < 1e-12
    return ok, f"P(X'=0) error {worst_p:.1e}, method spread {worst_agree:.1e}"


def check_06():
    nb = 3
    err, recovered = 0.0, 0
    cases = [(delta, seed) for delta in range(1, 2**nb) for seed in range(3)]
    for delta, seed in cases:
        f = planted_period(nb, delta, np.random.default_rng(seed))
        want = np.array([(bin(x & delta).count("1") % 2 == 0) / 2 ** (nb - 1) for x in range(2**nb)])
        d = simon.simon_distribution(f)
        err = max(err, max(float(np.abs(v - want).max()) for v in d.values()))
        recovered += simon.simon_recover_period(simon.support(d["qbnet"]), nb) == delta
    ok = err < 1e-12 and recovered == len(cases)
    return ok, f"max error {err:.1e}, recovered {recovered}/{len(cases)} periods"


def check_07():
    worst = 0.0
    for b in range(8):
        ket = gates.basis_vector(b, 8)
        worst = max(worst, float(np.abs(bv.run_plain(b, 3).amps - ket).max()))
        worst = max(worst, float(np.abs(bv.run_with_target(b, 3).amps - np.kron(gates.MINUS_X, ket)).max()))
    return worst < 1e-12, f"max error {worst:.1e} over 8 vectors"


def check_08():
    small = grover.grover_run(2, 3)
    big = grover.grover_run(10, 613)
    dev = max(grover.grover_run(nb, (5 * nb) % 2**nb).model_deviation for nb in range(2, 11))
    sq = max(float(np.abs(grover.single_query_state(nb, j, grover.grover_optimal_r(2**nb))
                          - grover.grover_run(nb, j).final.amps).max())
             for nb in range(2, 8) for j in (0, 1, 2**nb - 1))
    ok = (small.r == 1 and abs(small.success - 1) < 1e-12 and big.r == 25 and big.success >= 0.999
          and dev < 1e-10 and sq < 1e-10)
    return ok, (f"N=4 success {small.success:.15f}, N=1024 r={big.r} success {big.success:.5f}, "
                f"2D dev {dev:.1e}, single-query dev {sq:.1e}")


def check_09():
    worst, r_ok = 0.0, True
    for nb in range(2, 7):
        n = 2**nb
        for j in (0, n - 1):
            res = grover.younes_run(nb, j)
            r_ok &= res.r == grover.grover_optimal_r(2 * n)
            worst = max(worst, abs(res.success - res.model_success))
    return r_ok and worst < 1e-10, f"r rule ok={r_ok}, success vs 2D {worst:.1e}"


def check_10():
    nb, j = 5, 0
    setup = microscope.microscope_setup(microscope.and_like_p(nb, j))
    res = microscope.microscope_run(setup)
    g = grover.grover_run(nb, j, setup.r)
    dev = float(np.abs(res.path - g.path).max())
    ok = setup.r == 4 and abs(setup.alpha - setup.theta) < 1e-15 and res.overlap >= 0.999 and dev < 1e-10
    return ok, f"r={setup.r}, overlap {res.overlap:.5f}, Grover trajectory dev {dev:.1e}"


def _pi(targets, n):
    d = np.zeros(n)
    d[list(targets)] = 1
    return np.diag(d)


def _gate_case(mode, targets, nb):
    n = 2**nb
    pi, one = _pi(targets, n), np.eye(n)
    if mode == OR_LIKE:
        want = np.block([[pi, one - pi], [one - pi, -pi]])
        f = [int(x not in targets) for x in range(n)]
    else:
        want = np.block([[one - pi, -pi], [pi, one - pi]])
        f = [int(x in targets) for x in range(n)]
    emb = embed_deterministic_gate(mode, targets, nb)
    exact = bool(np.array_equal(emb.matrix, want))
    delta = np.array([[float(y == f[x]) for x in range(n)] for y in (0, 1)])
    return exact, float(np.abs(emb.probability_matrix() - delta).max())


def check_11():
    exact, err, count = True, 0.0, 0
    for nb in (2, 3):
        for t in range(2**nb):
            for mode in (AND_LIKE, OR_LIKE):
                e, d = _gate_case(mode, [t], nb)
                exact &= e
                err = max(err, d)
                count += 1
    e, d = _gate_case(MULTI_TARGET, [1, 4, 6], 3)
    exact &= e
    err = max(err, d)
    return exact and err == 0, f"{count + 1} gates, block forms exact={exact}, HAS error {err:.1e}"


def check_12():
    p01 = p10 = 0.1
    got = compose_quasi_deterministic(embed_quasi_deterministic([0], 2, (p01, p10), OR_LIKE))
    # P(y=0|x) = prod over bits of P(t_alpha=0 | x_alpha)
    want = np.zeros((2, 4))
    for x in range(4):
        p0 = math.prod(p01 if (x >> a) & 1 else 1 - p10 for a in range(2))
        want[:, x] = [p0, 1 - p0]
    err = float(np.abs(got - want).max())
    spot = float(got[1, 3])
    ok = err < 1e-12 and abs(spot - 0.99) < 1e-12
    return ok, f"max error {err:.1e}, P(y=1|x=(1,1)) = {spot:.15g}"


def check_13():
    cb = lung_net()
    qb, leafmap = embed_cbnet(cb)
    n = 100_000
    s1 = sample_leaves(qb, n, seed=1234)
    s2 = sample_leaves(qb, n, seed=1234)
    same = s1.to_csv().encode() == s2.to_csv().encode()
    est = float(np.mean(s1.column(leafmap.leaf("d")) == 1))
    oracle = float(marginal(exact_joint(cb), ["d"]).probs[1])
    se = math.sqrt(oracle * (1 - oracle) / n)
    z = abs(est - oracle) / se
    return same and z < 3, f"P(d=1) est {est:.5f} vs {oracle:.5f} ({z:.2f} SE), byte-identical={same}"


CHECKS = {k: v for k, v in sorted(globals().items()) if k.startswith("check_")}


def run_all():
    lines, results = [], {}
    for name, fn in CHECKS.items():
        ok, detail = fn()
        results[name] = ok
        lines.append(f"criterion {int(name[6:]):2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    return results, lines


@pytest.mark.parametrize("name", list(CHECKS))
def test_criterion(name):
    ok, detail = CHECKS[name]()
    assert ok, detail


def test_acceptance_summary(capsys):
    results, lines = run_all()
    with capsys.disabled():
        print()
        for line in lines:
            print(line)
    assert all(results.values())


if __name__ == "__main__":
    _, lines = run_all()
    print("\n".join(lines))
