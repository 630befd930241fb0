"""Compare the compiled and numpy Grover kernels.

    python benchmarks/bench_kernels.py [--repeat 5]

Times the in-place Grover power on a few register sizes, then a full
pac_learn run with each backend swapped in.
"""

import argparse
import time

import numpy as np

from qpac import grover, kernels
from qpac.concepts import ConceptClass, perturbed_delta
from qpac.eqlearn import pac_learn
from qpac.sim import build_sample_oracle, make_rng


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def power_case(dim, n, rng):
    state = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    state /= np.linalg.norm(state)
    axis = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    axis /= np.linalg.norm(axis)
    good = (rng.random(dim) < 0.3).astype(np.uint8)
    return state, axis, good


def learn_run(seed):
    cls = ConceptClass.full(8)
    rng = make_rng(seed)
    c = cls[int(rng.integers(len(cls)))]
    oracle = build_sample_oracle(c, perturbed_delta(range(8), 0, 0.01))
    return pac_learn(cls, oracle, 0.01, 0.2, rng)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    names = sorted(kernels.BACKENDS)
    print(f"default backend: {kernels.BACKEND}; available: {', '.join(names)}")

    rng = np.random.default_rng(0)
    print(f"\n{'case':<28}" + "".join(f"{n:>12}" for n in names) + f"{'speedup':>10}")
    for dim, n in [(16, 2000), (128, 500), (1024, 100), (8192, 20)]:
        state, axis, good = power_case(dim, n, rng)
        row = {}
        for name in names:
            k = kernels.BACKENDS[name]
            row[name] = best_of(lambda: k.axis_grover_power(state.copy(), axis, 0, good, n),
                                args.repeat)
        speedup = row["python"] / row["cython"] if "cython" in row else float("nan")
        print(f"{f'grover power dim={dim} N={n}':<28}"
              + "".join(f"{row[nm] * 1e3:>10.2f}ms" for nm in names) + f"{speedup:>9.1f}x")

    row = {}
    for name in names:
        # grover looks kernels up through the module, so swap the functions in place
        saved = {f: getattr(kernels, f) for f in kernels.KERNEL_NAMES}
        for f in kernels.KERNEL_NAMES:
            setattr(kernels, f, getattr(kernels.BACKENDS[name], f))
        try:
            assert grover.kernels is kernels
            row[name] = best_of(lambda: [learn_run(s) for s in range(3)], max(1, args.repeat // 2))
        finally:
            for f, fn in saved.items():
                setattr(kernels, f, fn)
    speedup = row["python"] / row["cython"] if "cython" in row else float("nan")
    print(f"{'pac_learn |X|=8 eps=0.01 x3':<28}"
          + "".join(f"{row[nm] * 1e3:>10.1f}ms" for nm in names) + f"{speedup:>9.1f}x")


if __name__ == "__main__":
    main()
