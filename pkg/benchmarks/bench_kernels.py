"""Compare the compiled and pure-numpy sparse kernels.

Usage: ``python benchmarks/bench_kernels.py [--family quadratic] [--n 64]``.
"""
import argparse
import time

import numpy as np

from hwopsip import _fallback
from hwopsip.assembly import assemble_system
from hwopsip.exact import boundary_layer
from hwopsip.mesh import MeshFamily, generate

try:
    from hwopsip import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def best_of(fun, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fun()
        times.append(time.perf_counter() - t)
    return min(times)


def bench(mod, A, b, steps, repeat):
    x = np.random.default_rng(0).normal(size=A.n)
    y = np.empty(A.n)
    t_mv = best_of(lambda: mod.csr_matvec(A.indptr, A.indices, A.data, x, y), repeat)

    def cg():
        xs, r = np.zeros(A.n), b.copy()
        p, q = r.copy(), np.empty(A.n)
        mod.cg_chunk(A.indptr, A.indices, A.data, xs, r, p, q, float(r @ r), 0.0, steps)

    return t_mv, best_of(cg, max(1, repeat // 10))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--family", default="quadratic")
    ap.add_argument("--n", type=int, default=64)
    ap.add_argument("--steps", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=30)
    args = ap.parse_args()
    s = assemble_system(generate(MeshFamily(args.family, args.n)), boundary_layer().f)
    A = s.matrix
    print(f"{args.family} N={args.n}: n={A.n}, nnz={A.nnz}, {args.steps} CG steps")
    print(f"{'backend':<8} {'matvec [ms]':>12} {'cg [ms]':>10}")
    results = {}
    for name, mod in (("cython", _ckernels), ("python", _fallback)):
        if mod is None:
            print(f"{name:<8} {'n/a':>12} {'n/a':>10}")
            continue
        results[name] = bench(mod, A, s.rhs, args.steps, args.repeat)
        mv, cg = results[name]
        print(f"{name:<8} {1e3 * mv:12.3f} {1e3 * cg:10.1f}")
    if len(results) == 2:
        print(f"speed-up: matvec x{results['python'][0] / results['cython'][0]:.1f}, "
              f"cg x{results['python'][1] / results['cython'][1]:.1f}")


if __name__ == "__main__":
    main()
