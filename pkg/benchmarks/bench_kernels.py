"""Compare the compiled and numpy orbit kernels on random states.

    python3 benchmarks/bench_kernels.py [--repeat 20]
"""
import argparse
import timeit

import numpy as np

from orbit_atlas import kernels
from orbit_atlas.lie import GroupSpec, build_basis


def random_density(n, rng):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    m = a @ a.conj().T
    return m / np.trace(m)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    impls = kernels.backends()
    print(f"{'size':>6} " + " ".join(f"{name:>12}" for name in impls) + "   speedup")
    for n1, n2 in [(2, 2), (3, 3), (4, 4), (4, 3)]:
        coo = kernels.to_coo(build_basis(GroupSpec.full(n1, n2)).stack())
        rho = random_density(n1 * n2, rng)
        times = {}
        for name, fn in impls.items():
            fn(*coo, rho)
            times[name] = min(timeit.repeat(lambda: fn(*coo, rho), number=10, repeat=args.repeat)) / 10
        ref = impls["python"](*coo, rho)
        for name, fn in impls.items():
            got = fn(*coo, rho)
            assert all(np.allclose(g, r, atol=1e-13) for g, r in zip(got, ref)), name
        cells = " ".join(f"{times[k] * 1e6:10.1f}us" for k in impls)
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{n1}x{n2:<4} {cells}   {speed:6.1f}x")


if __name__ == "__main__":
    main()
