"""Compiled vs pure-Python kernels on 4-regular tori.

    python benchmarks/bench_kernels.py [--sizes 4096 16384 65536] [--repeats 3]

Prints one CSV row per (kernel, size, backend) with the median wall-clock and
the speedup of the compiled kernel.  Both backends must give identical output.
"""

import argparse
import time

import numpy as np

from ingrass import kernels
from ingrass.generators import regular_graph
from ingrass.resistance import build_embedder, estimate_resistances


def _time(fn, repeats):
    ts = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        ts.append(time.perf_counter() - t0)
    return float(np.median(ts)), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[1 << 12, 1 << 14, 1 << 16])
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()
    try:
        from ingrass import _ckernels  # noqa: F401
    except ImportError:
        raise SystemExit("compiled extension not built; reinstall without INGRASS_NO_EXT")

    print("kernel,n,edges,python_s,cython_s,speedup")
    for n in args.sizes:
        g = regular_graph(n)
        emb = build_embedder(g, m=8, seed=0)
        score = estimate_resistances(emb, g.u, g.v)
        order = np.argsort(score, kind="stable")
        eu, ev, sc = g.u[order], g.v[order], score[order]
        levels = int(np.ceil(np.log2(n)))
        thr = np.median(score) * 2.0 ** np.arange(levels)
        cases = {
            "lrd_contract": lambda b: kernels.lrd_contract(n, eu, ev, sc, thr, backend=b),
            "kruskal": lambda b: kernels.kruskal(n, eu, ev, backend=b),
        }
        for name, fn in cases.items():
            tp, out_p = _time(lambda: fn("python"), args.repeats)
            tc, out_c = _time(lambda: fn("cython"), args.repeats)
            out_p = out_p if isinstance(out_p, tuple) else (out_p,)
            out_c = out_c if isinstance(out_c, tuple) else (out_c,)
            assert all(np.array_equal(a, b) for a, b in zip(out_p, out_c)), name
            print(f"{name},{g.n_nodes},{g.n_edges},{tp:.4f},{tc:.5f},{tp / tc:.1f}")


if __name__ == "__main__":
    main()
