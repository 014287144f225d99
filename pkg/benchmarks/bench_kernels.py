#!/usr/bin/env python3
"""Time the hot kernels under the numba and pure-numpy backends.

The backend is chosen at import time from TWOBINOM_BACKEND, so this
script re-executes itself once per backend and prints a small table.

Workloads mirror the package's hot paths: the per-theta tail table used
by rejection-set construction (rank_tail_table), the region-probability
sweep used by supremum searches and the CSM construction (region_prob),
and an end-to-end unconditional p-value at a 21 + 21 design.
"""

import json
import os
import subprocess
import sys
import time

import numpy as np


def _bench_one(repeat: int) -> dict:
    from twobinom._backend import backend_name
    from twobinom._kernels import binom_pmf_matrix, rank_tail_table, region_prob
    from twobinom.core import Alternative, Hypothesis, Measure, TwoByTwoData
    from twobinom.orderings import order_diff_tiebreak
    from twobinom.unconditional import uncond_pvalue_onesided

    n1 = n2 = 20
    G = 1001
    rng = np.random.default_rng(0)
    thetas = np.linspace(0.0, 1.0, G)
    P1 = binom_pmf_matrix(n1, thetas)
    P2 = binom_pmf_matrix(n2, thetas)
    ordering = order_diff_tiebreak(n1, n2)
    ii, jj = np.nonzero(ordering.mask)
    rk = ordering.rank[ii, jj]
    order = np.argsort(rk, kind="stable")
    oi = ii[order].astype(np.int64)
    oj = jj[order].astype(np.int64)
    block_ends = np.cumsum(np.bincount(rk)) - 1
    member = (rng.uniform(size=(n1 + 1, n2 + 1)) < 0.5).astype(float)

    # warm-up (includes any jit compilation)
    rank_tail_table(P1, P2, oi, oj, block_ends)
    region_prob(P1, P2, member)

    out = {"backend": backend_name()}

    t0 = time.perf_counter()
    for _ in range(repeat):
        rank_tail_table(P1, P2, oi, oj, block_ends)
    out["rank_tail_table_ms"] = (time.perf_counter() - t0) / repeat * 1e3

    t0 = time.perf_counter()
    for _ in range(repeat):
        region_prob(P1, P2, member)
    out["region_prob_ms"] = (time.perf_counter() - t0) / repeat * 1e3

    data = TwoByTwoData(8, n1, 15, n2)
    hyp = Hypothesis(Measure.DIFFERENCE, 0.0, Alternative.GREATER)
    uncond_pvalue_onesided(data, hyp, ordering)  # warm-up
    t0 = time.perf_counter()
    for _ in range(max(1, repeat // 4)):
        uncond_pvalue_onesided(data, hyp, ordering)
    out["uncond_pvalue_ms"] = (
        (time.perf_counter() - t0) / max(1, repeat // 4) * 1e3
    )
    return out


def main() -> int:
    if os.environ.get("_TWOBINOM_BENCH_CHILD"):
        print(json.dumps(_bench_one(repeat=20)))
        return 0

    rows = []
    for backend in ("numba", "numpy"):
        env = dict(os.environ, TWOBINOM_BACKEND=backend,
                   _TWOBINOM_BENCH_CHILD="1")
        res = subprocess.run(
            [sys.executable, __file__], capture_output=True, text=True, env=env
        )
        if res.returncode != 0:
            print(f"{backend}: failed\n{res.stderr}", file=sys.stderr)
            continue
        rows.append(json.loads(res.stdout.strip().splitlines()[-1]))

    if not rows:
        return 1
    keys = ["rank_tail_table_ms", "region_prob_ms", "uncond_pvalue_ms"]
    header = f"{'kernel':<22}" + "".join(f"{r['backend']:>12}" for r in rows)
    print(header)
    print("-" * len(header))
    for k in keys:
        line = f"{k.removesuffix('_ms'):<22}"
        for r in rows:
            line += f"{r[k]:>10.3f}ms"
        print(line)
    if len(rows) == 2:
        print("-" * len(header))
        for k in keys:
            speedup = rows[1][k] / rows[0][k]
            print(f"{k.removesuffix('_ms'):<22}{rows[0]['backend']} is "
                  f"{speedup:.2f}x vs {rows[1]['backend']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
