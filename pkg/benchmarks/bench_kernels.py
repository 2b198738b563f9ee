"""Compare the compiled and NumPy kernel backends.

Usage: python benchmarks/bench_kernels.py [--rows 10000] [--levels 11] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from gaussradon import _kernels_py, kernels


def bench(backend, name, args, repeat):
    fn = getattr(backend, name)
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=10_000)
    ap.add_argument("--levels", type=int, default=11)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    try:
        compiled = kernels.load_backend("cython")
    except ImportError:
        print("compiled extension not built; only the NumPy backend is available")
        compiled = None

    rng = np.random.default_rng(0)
    C = rng.standard_normal((args.rows, 1 << args.levels))
    paths = _kernels_py.schauder_synthesize(C, args.levels)
    w = 0.25 ** np.arange(1, C.shape[1] + 1)
    cases = [
        ("schauder_synthesize", (C, args.levels)),
        ("schauder_analyze", (paths, args.levels)),
        ("schauder_sup", (C, args.levels)),
        ("weighted_sq_norm", (C, w)),
    ]
    print(f"rows={args.rows} levels={args.levels} (best of {args.repeat})")
    print(f"{'kernel':<22}{'numpy [ms]':>12}{'cython [ms]':>13}{'speedup':>9}")
    for name, a in cases:
        t_py = bench(_kernels_py, name, a, args.repeat)
        if compiled is None:
            print(f"{name:<22}{1e3 * t_py:>12.2f}{'-':>13}{'-':>9}")
            continue
        t_c = bench(compiled, name, a, args.repeat)
        same = np.array_equal(getattr(compiled, name)(*a), getattr(_kernels_py, name)(*a))
        print(f"{name:<22}{1e3 * t_py:>12.2f}{1e3 * t_c:>13.2f}{t_py / t_c:>8.1f}x" + ("" if same else "  (differs in last bits)"))


if __name__ == "__main__":
    main()
