#!/usr/bin/env python3
"""Benchmark the hot kernels on the numba path vs the pure-numpy fallback.

Runs the workload in-process, then re-executes itself in a subprocess with
LANEEMDEN_NO_NUMBA=1 and compares wall times.  Checksums are printed so the
two paths can be seen to agree.

Usage: python benchmarks/bench_kernels.py [--inner-only]
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def build_profile():
    """Synthetic symmetric-point profile from the explicit bubble (no ODE solve)."""
    from laneemden.params import ProblemParams
    from laneemden.radial import RadialProfile, fit_tail

    n = 4
    grid = np.concatenate([[0.0], np.geomspace(1e-3, 1e4, 5601)])
    U = (1.0 + grid ** 2 / 8.0) ** -1.0
    dU = -(grid / 4.0) * (1.0 + grid ** 2 / 8.0) ** -2.0
    prof = RadialProfile(params=ProblemParams(n=n, p=3.0), grid=grid, U=U, dU=dU,
                         V=U.copy(), dV=dU.copy(), v0=1.0, r_max=1e4, ode_tol=0.0)
    return prof.with_tail(fit_tail(prof, (1e3, 1e4)))


def run_workload():
    from laneemden.ansatz import PW1_APPROX, AnsatzField
    from laneemden.ballquad import get_quadrature
    from laneemden.halfspace import PHI1, HalfSpaceCorrection

    prof = build_profile()
    corr = HalfSpaceCorrection(prof, PHI1)
    timings = {}
    sums = {}

    t0 = time.perf_counter()
    r = np.geomspace(1e-3, 2e4, 2_000_000)
    vals = prof.eval_many(r)
    timings["profile_eval_2M"] = time.perf_counter() - t0
    sums["profile_eval_2M"] = float(sum(np.sum(v) for v in vals))

    t0 = time.perf_counter()
    tab = corr.table(250.0, m=193)
    timings["phi_table_193"] = time.perf_counter() - t0
    sums["phi_table_193"] = float(np.sum(tab.tab))

    quad = get_quadrature(4, 0.01, 1)
    fld = AnsatzField(prof, PW1_APPROX, 0.02, phi1=corr, table_extent=250.0)
    t0 = time.perf_counter()
    for _ in range(5):
        total = quad.integrate(lambda s, t: fld.eval_st(s, t) ** 2)
    timings["field_square_integral_x5"] = time.perf_counter() - t0
    sums["field_square_integral_x5"] = float(total)

    return timings, sums


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--inner-only", action="store_true",
                    help="run the workload once and dump JSON (used by the driver)")
    args = ap.parse_args()

    if args.inner_only:
        from laneemden._accel import USING_NUMBA
        # warm the JIT so compile time is not billed to the kernels
        run_workload()
        timings, sums = run_workload()
        print(json.dumps({"numba": USING_NUMBA, "timings": timings, "sums": sums}))
        return

    def run(env_flag):
        env = dict(os.environ)
        env["LANEEMDEN_NO_NUMBA"] = env_flag
        out = subprocess.run([sys.executable, __file__, "--inner-only"], env=env,
                             capture_output=True, text=True, check=True)
        return json.loads(out.stdout.splitlines()[-1])

    jit = run("0")
    plain = run("1")
    print(f"{'kernel':34s} {'numba':>10s} {'numpy':>10s} {'speedup':>8s}")
    for k in jit["timings"]:
        a, b = jit["timings"][k], plain["timings"][k]
        print(f"{k:34s} {a:9.3f}s {b:9.3f}s {b/a:7.2f}x")
    for k in jit["sums"]:
        ja, pa = jit["sums"][k], plain["sums"][k]
        rel = abs(ja - pa) / max(abs(ja), 1e-300)
        print(f"agreement {k}: rel diff {rel:.2e}")
    if not jit["numba"]:
        print("note: numba unavailable; both columns ran the fallback path")


if __name__ == "__main__":
    main()
