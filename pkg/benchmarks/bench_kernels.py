"""Compare the compiled fiberwise kernels against the numpy reference.

Runs every kernel that has a compiled implementation on node stacks sized
like the working grids (n**4 nodes), checks the two backends agree, and
prints per-call timings plus the speedup.

Usage: python benchmarks/bench_kernels.py [--grid N] [--repeat K]
"""

import argparse
import time

import numpy as np

from tkhodge.kernels import _backend_np

try:
    from tkhodge.kernels import _core
except ImportError:
    _core = None


def _timeit(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def _cases(nodes, rng):
    mats44 = rng.standard_normal((nodes, 4, 4))
    mats66 = rng.standard_normal((nodes, 6, 6))
    vec6 = rng.standard_normal((nodes, 6))
    vec6b = rng.standard_normal((nodes, 6))
    w = rng.random(nodes) + 0.5
    return [
        ("batch_matvec", (mats66, vec6)),
        ("batch_matvec_t", (mats66, vec6)),
        ("wedge_pair2", (vec6, vec6b)),
        ("weighted_block_dot", (w, mats66, vec6, vec6b)),
        ("compound2", (mats44,)),
        ("compound3", (mats44,)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", type=int, default=13, help="nodes = grid**4")
    ap.add_argument("--repeat", type=int, default=7)
    args = ap.parse_args()

    nodes = args.grid**4
    rng = np.random.default_rng(42)
    print(f"nodes = {args.grid}^4 = {nodes}, best of {args.repeat} runs")
    if _core is None:
        print("compiled backend unavailable; timing numpy reference only")
    header = f"{'kernel':<22}{'numpy':>12}{'compiled':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))

    for name, case in _cases(nodes, rng):
        np_fn = getattr(_backend_np, name)
        t_np = _timeit(np_fn, case, args.repeat)
        if _core is None:
            print(f"{name:<22}{t_np * 1e3:>10.2f}ms{'--':>12}{'--':>10}")
            continue
        c_fn = getattr(_core, name)
        contig = tuple(np.ascontiguousarray(a) for a in case)
        got = c_fn(*contig)
        want = np_fn(*case)
        err = np.max(np.abs(np.asarray(got) - np.asarray(want)))
        scale = max(np.max(np.abs(np.asarray(want))), 1.0)
        if err > 1e-12 * scale:
            raise SystemExit(f"{name}: backends disagree, err={err:.3e}")
        t_c = _timeit(c_fn, contig, args.repeat)
        print(
            f"{name:<22}{t_np * 1e3:>10.2f}ms{t_c * 1e3:>10.2f}ms"
            f"{t_np / t_c:>9.1f}x"
        )


if __name__ == "__main__":
    main()
