"""Compare the JIT-compiled kernels against the pure-numpy fallback.

Run:  python benchmarks/bench_kernels.py

Workload mirrors the package's hot paths: facial-set LPs (two-phase
simplex on t' = X'y systems) and restricted Poisson-Newton fits, sized
like the randomized property sweeps and the bundled 8-factor dataset.
"""

import os
import sys
from time import perf_counter

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from sparseloglin import _kernels
from sparseloglin import lp as lpmod
from sparseloglin.datasets import haberman
from sparseloglin.design import build_design, sufficient_statistic
from sparseloglin.formula import parse_generators
from sparseloglin.table import ContingencyTable, FactorSpec


def make_random_tables(n, shape, rng):
    names = "abcdefgh"
    factors = tuple(
        FactorSpec(names[k], tuple(str(v) for v in range(lv))) for k, lv in enumerate(shape)
    )
    out = []
    n_cells = int(np.prod(shape))
    while len(out) < n:
        counts = np.where(rng.random(n_cells) < 0.4, 0, rng.poisson(3.0, n_cells) + 1)
        if counts.sum() > 0:
            out.append(ContingencyTable(factors, counts.astype(np.int64)))
    return out


def lp_workload(tables, design):
    """Solve one facial-set LP per table; returns the objective sum."""
    xt = design.matrix.T
    acc = 0.0
    for table in tables:
        y = (table.counts > 0).astype(np.int64)
        t_prime = sufficient_statistic(design, y).t.astype(float)
        c = (table.counts == 0).astype(float)
        sol = lpmod.solve(lpmod.LinearProgram(c, xt, t_prime))
        acc += sol.objective_value
    return acc


def newton_workload(tables, design):
    acc = 0.0
    x = np.ascontiguousarray(design.matrix)
    for table in tables:
        y = table.counts.astype(float)
        theta0 = np.zeros(design.d)
        theta0[0] = np.log(max(y.mean(), 0.25))
        theta, status, _it, _g = _kernels.newton_poisson_core(
            x, y, theta0, 1e-8, 1e-8, 200
        )
        acc += float(theta[0])
    return acc


def run(label, fn, *args, repeats=3):
    fn(*args)  # warmup (JIT compilation on the numba path)
    best = np.inf
    for _ in range(repeats):
        t0 = perf_counter()
        ref = fn(*args)
        best = min(best, perf_counter() - t0)
    print(f"  {label:28s} {1000 * best:9.1f} ms")
    return ref, best


def main():
    mode = "numba" if _kernels.using_numba() else "pure numpy (fallback)"
    print(f"active kernels: {mode}")
    print("set SPARSELOGLIN_DISABLE_NUMBA=1 to force the numpy fallback\n")

    rng = np.random.default_rng(0)
    small = make_random_tables(300, (2, 2, 3), rng)
    model_small = parse_generators("[ab][bc]")
    design_small = build_design(small[0], model_small)

    big = make_random_tables(20, (2,) * 8, rng)
    model_big = parse_generators("|ad|ae|be|ce|ef|acg|dg|fg|bdh|")
    design_big = build_design(big[0], model_big)

    print("facial-set LPs, 300 random 2x2x3 tables, model [ab][bc]:")
    ref_lp_small, _ = run("simplex", lp_workload, small, design_small)
    print("facial-set LPs, 20 random 2^8 tables, 24-parameter model:")
    ref_lp_big, _ = run("simplex", lp_workload, big, design_big)
    print("Poisson-Newton fits, 300 small tables:")
    ref_nt_small, _ = run("newton", newton_workload, small, design_small)
    print("Poisson-Newton fits, 20 2^8 tables:")
    ref_nt_big, _ = run("newton", newton_workload, big, design_big)

    print("\nchecksums (compare across kernel modes):")
    for name, v in [
        ("lp_small", ref_lp_small),
        ("lp_big", ref_lp_big),
        ("newton_small", ref_nt_small),
        ("newton_big", ref_nt_big),
    ]:
        print(f"  {name:14s} {v:.6f}")

    table = haberman()
    design = build_design(table, parse_generators("[ab][ac][bc]"))
    y = (table.counts > 0).astype(np.int64)
    t_prime = sufficient_statistic(design, y).t.astype(float)
    sol = lpmod.solve(lpmod.LinearProgram((table.counts == 0).astype(float), design.matrix.T, t_prime))
    assert sol.status == "optimal" and abs(sol.objective_value) < 1e-8


if __name__ == "__main__":
    main()
