"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--n 16] [--repeat 5]

Prints one line per kernel with the best-of-repeat time for each backend
and the speedup. Outputs are compared before timing.
"""

import argparse
import timeit

import numpy as np

from gf2to1._backend import available_backends
from gf2to1.field import create_context


def cases(F, rng):
    q = F.order
    x = np.arange(q, dtype=np.uint32)
    u = rng.integers(0, q, q, dtype=np.uint32)
    vals = (x >> 1).astype(np.uint32)
    rng.shuffle(vals)
    images = np.array([F.mul(1 << i, 0x2B % q or 1) for i in range(F.n)], dtype=np.uint32)
    c, e = int(rng.integers(1, q)), int(rng.integers(2, q))

    def acc(mod):
        out = np.zeros(q, dtype=np.uint32)
        mod.term_accumulate(out, x, u, c, 1, e, F.exp, F.log)
        return out

    return {
        "build_exp_table": lambda mod: mod.build_exp_table(F.n, F.modulus, F.generator),
        "term_accumulate": acc,
        "value_counts": lambda mod: mod.value_counts(vals, q),
        "partners": lambda mod: mod.partners(vals),
        "linear_table": lambda mod: mod.linear_table(images, F.n),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=16)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    backends = available_backends()
    F = create_context(args.n)
    print(f"n={args.n} backends={','.join(backends)}")
    for name, fn in cases(F, np.random.default_rng(args.seed)).items():
        results = {b: np.asarray(fn(mod)) for b, mod in backends.items()}
        ref = results["numpy"]
        same = all(np.array_equal(ref, r) for r in results.values())
        times = {b: min(timeit.repeat(lambda mod=mod: fn(mod), number=1, repeat=args.repeat))
                 for b, mod in backends.items()}
        cols = "  ".join(f"{b}={t * 1e3:9.3f} ms" for b, t in times.items())
        speed = f"  speedup={times['numpy'] / times['cython']:.1f}x" if "cython" in times else ""
        print(f"{name:16s} {cols}{speed}  agree={same}")


if __name__ == "__main__":
    main()
