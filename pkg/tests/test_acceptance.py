"""Exit criteria. Each test records one PASS/FAIL line, printed in the terminal summary.

Run standalone with ``python3 tests/test_acceptance.py``.
"""

import itertools
import json
import subprocess
import sys
import time
from math import comb, sqrt

import numpy as np
import pytest

from multadv.additive import AdditiveAdversary
from multadv.constructions import (
    or_block_eigs,
    or_gamma,
    search_block_norm,
    search_gamma,
    tfold_block_eigs,
    tfold_gamma,
    threshold_gamma,
)
from multadv.dpt import verify_tensor_norm_identity
from multadv.multiplicative import MultiplicativeAdversary, bad_projector, block_ratio_bound, eta, ratio_norms
from multadv.query import FunctionSpec, builtin, verify_difference_identity
from multadv.verify import grover_endtoend, suite_thm1, suite_thm2

pytestmark = pytest.mark.acceptance

RESULTS = []


def record(number, title, ok, detail, elapsed, limit):
    ok = bool(ok) and elapsed < limit
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} | {detail} | {elapsed:.2f}s (limit {limit}s)"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_criterion_01_search_block_norm():
    t0 = time.perf_counter()
    worst_gap, worst_num = 0.0, 0.0
    ok = True
    for n in (4, 16, 64, 256):
        r = search_block_norm(n, 2.0)
        full = ratio_norms(search_gamma(n, 2.0).gamma, builtin("search", n), indices=[1]).max
        worst_num = max(worst_num, abs(full - r.exact), abs(r.numeric - r.exact))
        ok &= r.gap <= 10 / n
        worst_gap = max(worst_gap, r.gap * n)
    at4 = abs(search_block_norm(4, 2.0).exact - (2.375 + sqrt(1.640625)) / 2)
    ok &= at4 <= 1e-9 and worst_num <= 1e-9
    record(1, "search exact block norm", ok,
           f"max n*gap={worst_gap:.3f} (<=10), n=4 residual={at4:.1e}, numeric residual={worst_num:.1e}",
           time.perf_counter() - t0, 1)


def test_criterion_02_ratio_suite():
    t0 = time.perf_counter()
    reps = [suite_thm2(search_gamma(4, 2.0), seeds=200, T=5, dim_W=2),
            suite_thm2(threshold_gamma(4, 2, 2.0), seeds=200, T=5, dim_W=2)]
    counts = [r.counts for r in reps]
    slack = min(r.quantities["max_ratio_norm"] - r.quantities["max_observed_ratio"] for r in reps)
    record(2, "per-query ratio <= max ratio norm", all(r.passed for r in reps),
           f"search(4) {counts[0][0]}/{counts[0][1]}, threshold(4,2) {counts[1][0]}/{counts[1][1]}, "
           f"min slack={slack:.3e}", time.perf_counter() - t0, 30)


def test_criterion_03_additive_suite():
    t0 = time.perf_counter()
    reps = [suite_thm1(builtin("search", 4), seeds=200), suite_thm1(builtin("threshold", 4, 2), seeds=200)]
    detail = ", ".join(f"{r.counts[0]}/{r.counts[1]}" for r in reps)
    record(3, "W^0 = ||Gamma|| and step <= 2 max ||Gamma o D_i||", all(r.passed for r in reps),
           f"checks passed {detail}", time.perf_counter() - t0, 30)


def test_criterion_04_block_equality():
    t0 = time.perf_counter()
    cons = [search_gamma(4, 2.0), search_gamma(6, 2.0), search_gamma(8, 2.0),
            tfold_gamma(6, 2, 2.0), tfold_gamma(8, 2, 2.0)]
    eq, slack = 0.0, np.inf
    for con in cons:
        for i in range(1, con.spec.n + 1):
            rep = block_ratio_bound(con.gamma, con.spec, i, con.partition(i))
            eq = max(eq, rep.equality_residual)
            slack = min(slack, rep.bound_slack)
    record(4, "block ratio equality and bound", eq <= 1e-9 and slack >= -1e-9,
           f"max equality residual={eq:.1e}, min bound slack={slack:.3e}", time.perf_counter() - t0, 60)


def test_criterion_05_eta():
    t0 = time.perf_counter()
    search_res = 0.0
    for n in (2, 4, 8, 16):
        con = search_gamma(n, 2.0)
        search_res = max(search_res, abs(eta(bad_projector(con.gamma, con.lam), con.spec) - 1 / n))
    con = tfold_gamma(8, 2, 2.0)
    e_t = eta(bad_projector(con.gamma, con.lam), con.spec)
    con = threshold_gamma(8, 2, 2.0)
    e_h = eta(bad_projector(con.gamma, con.lam), con.spec)
    bound = comb(8, 1) / comb(8, 2)
    ok = search_res <= 1e-12 and e_t <= bound + 1e-9 and e_h <= 0.5 + 1e-9
    record(5, "eta checks", ok, f"search residual={search_res:.1e}, tfold(8,2)={e_t:.6f} (<= {bound:.6f}), "
           f"threshold(8,2)={e_h:.6f} (<= 0.5)", time.perf_counter() - t0, 60)


def test_criterion_06_closed_form_eigs():
    t0 = time.perf_counter()
    tf = max(tfold_block_eigs(n, t, 2.0, j).max_deviation for n, t in [(8, 2), (6, 3)] for j in range(t))
    ors = [or_block_eigs(n, 2.0) for n in (4, 8, 16)]
    od = max(r.max_deviation for r in ors)
    prod = max(abs(r.numeric[0] * r.numeric[2] - 1) for r in ors)
    record(6, "closed-form block eigenvalues", tf <= 1e-8 and od <= 1e-8 and prod <= 1e-9,
           f"tfold dev={tf:.1e}, OR dev={od:.1e}, OR product residual={prod:.1e}", time.perf_counter() - t0, 30)


def test_criterion_07_dpt_norm_identity():
    t0 = time.perf_counter()
    ratio, spec_res = 0.0, 0.0
    for con in (search_gamma(4, 2.0), or_gamma(3, 4.0)):
        adv = MultiplicativeAdversary(con.gamma, con.lam, zeta=0.9).fit(con.spec)
        for k in (2, 3):
            rep = verify_tensor_norm_identity(adv, con.spec, k)
            ratio = max(ratio, rep.ratio_residual)
            spec_res = max(spec_res, rep.eigen_residual)
    record(7, "tensor-power norm identity", ratio <= 1e-9 and spec_res <= 1e-9,
           f"ratio residual={ratio:.1e}, spectrum residual={spec_res:.1e}", time.perf_counter() - t0, 60)


def test_criterion_08_grover_endtoend():
    t0 = time.perf_counter()
    rep = grover_endtoend(4, 1)
    q = rep.quantities
    record(8, "Grover success implies W^T >= zeta^2 lambda", rep.passed,
           f"success={q['success']:.6f}, zeta={q['zeta']:.4f}, W^T={q['final_W']:.4f} >= {q['threshold']:.4f}",
           time.perf_counter() - t0, 5)


def test_criterion_09_difference_identity():
    t0 = time.perf_counter()
    specs = []
    for n in range(2, 7):
        specs += [builtin("search", n), builtin("or", n)]
        specs += [builtin(f, n, t) for f in ("tfold", "threshold") for t in range(1, n)]
    rng = np.random.default_rng(0)
    inputs = ["".join(map(str, x)) for x in itertools.product(range(3), repeat=3)]
    values = [str(v) for v in rng.integers(0, 3, len(inputs))]
    values[:3] = ["0", "1", "2"]
    specs.append(FunctionSpec(3, 3, inputs, values, name="random-ternary"))
    worst = max(verify_difference_identity(s, i) for s in specs for i in range(1, s.n + 1))
    record(9, "difference identity", worst <= 1e-12, f"{len(specs)} functions, max residual={worst:.1e}",
           time.perf_counter() - t0, 5)


def test_criterion_10_cli_determinism():
    t0 = time.perf_counter()
    cmd = [sys.executable, "-m", "multadv", "verify", "thm2", "--family", "search", "--n", "4",
           "--seeds", "10", "--json"]
    outs = [subprocess.run(cmd, capture_output=True, check=True).stdout for _ in range(2)]
    json.loads(outs[0])
    record(10, "byte-identical CLI JSON", outs[0] == outs[1] and outs[0],
           f"{len(outs[0])} bytes x2", time.perf_counter() - t0, 5)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
