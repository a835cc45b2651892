"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py --reps 20

Both backends must give identical outputs; the script checks that before timing.
"""
import argparse
import time

import numpy as np

from scsframe._seeds import run_seed
from scsframe.diversity import element_csr
from scsframe.generators import PRESETS, generate
from scsframe.kernels import available_backends, get_backend
from scsframe.pipeline import make_problem, sample
from scsframe.sp import floyd_warshall


def cases(size_tag):
    sp = make_problem(generate(*PRESETS[f"SP-Grid-{size_tag}"], 0))
    tsp = make_problem(generate(*PRESETS[f"TSP-{size_tag}"], 0))
    spp = make_problem(generate(*PRESETS[f"SPP-{size_tag}"], 0))
    g = sp.graph
    ptr, flat = spp.inst.csr
    ptr_j, elems = element_csr([sp.element_set(p) for p in sample(sp, 300, 0)])
    w = g.weight_matrix
    nh = floyd_warshall(g).next_hop
    return {
        "sp_search": lambda k, i: k.sp_search(sp._indptr, sp._indices, sp.dist_to_t, sp.relaxed.weights,
                                              g.s, g.t, run_seed(0, i), nxt=nh),
        "tsp_search": lambda k, i: k.tsp_search(tsp.inst.dist, run_seed(0, i)),
        "spp_search": lambda k, i: k.spp_search(ptr, flat, spp.inst.costs, spp.inst.n_cells, run_seed(0, i)),
        "jaccard_matrix(300)": lambda k, i: k.jaccard_matrix(ptr_j, elems),
        "floyd_warshall": lambda k, i: k.floyd_warshall(w),
    }


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", choices=("100", "900"), default="100")
    ap.add_argument("--reps", type=int, default=10)
    args = ap.parse_args()

    backends = available_backends()
    if "cython" not in backends:
        print("compiled extension not built; only the Python backend is available")
    mods = {b: get_backend(b) for b in backends}
    print(f"{'kernel':22s}" + "".join(f"{b + ' ms':>14s}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name, fn in cases(args.size).items():
        outs = {b: fn(m, 0) for b, m in mods.items()}
        if len(outs) > 1:
            assert same(outs["cython"], outs["python"]), f"{name}: backends disagree"
        ms = {}
        for b, m in mods.items():
            reps = args.reps if b == "cython" else max(1, args.reps // 5)
            t0 = time.perf_counter()
            for i in range(reps):
                fn(m, i)
            ms[b] = 1000 * (time.perf_counter() - t0) / reps
        line = f"{name:22s}" + "".join(f"{ms[b]:14.3f}" for b in backends)
        if len(backends) > 1:
            line += f"{ms['python'] / ms['cython']:11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
