"""Time the jitted kernels against their interpreted bodies and the numpy variants.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--end-to-end]

``--end-to-end`` also runs ``karbblock selftest`` twice in subprocesses, once with
KARBBLOCK_DISABLE_NUMBA=1, so the switch itself is exercised.
"""

import argparse
import os
import subprocess
import sys
import time
import timeit

import numpy as np

from karbblock import kernels
from karbblock._accel import USE_NUMBA, py_func


def best_of(fn, repeat: int, number: int) -> float:
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def f_table_inputs(rng, nw: int, m: int):
    heads = rng.integers(0, nw, size=m).astype(np.int64)
    tmasks = np.array([int(rng.integers(0, 1 << nw)) & ~(1 << int(h)) for h in heads], np.int64)
    mult = rng.integers(1, 4, size=m).astype(np.int64)
    return heads, tmasks, mult


def karb_inputs(rng, n: int, m: int):
    tails = rng.integers(0, n, 4 * m)
    heads = rng.integers(0, n, 4 * m)
    keep = tails != heads
    tails, heads = tails[keep][:m].astype(np.int64), heads[keep][:m].astype(np.int64)
    return tails, heads, rng.integers(0, 9, tails.shape[0]).astype(np.int64)


def row(name, size, timings):
    base = timings.get("interpreted")
    cells = []
    for label, t in timings.items():
        speed = f" ({base / t:6.1f}x)" if base and label != "interpreted" else ""
        cells.append(f"{label}={t * 1e6:10.1f}us{speed}")
    print(f"{name:<14} {size:<10} " + "  ".join(cells))


def bench_kernels(repeat: int) -> None:
    rng = np.random.default_rng(0)
    for nw in (6, 10, 14):
        args = (nw,) + f_table_inputs(rng, nw, 3 * nw)
        kernels.f_table_loop(*args)  # compile outside the timing
        number = 3 if nw >= 14 else 20
        row("f_table", f"nw={nw}", {
            "interpreted": best_of(lambda: py_func(kernels.f_table_loop)(*args), repeat, 1),
            "numba": best_of(lambda: kernels.f_table_loop(*args), repeat, number),
            "numpy": best_of(lambda: kernels.f_table_numpy(*args), repeat, number),
        })
        ftab = kernels.f_table_numpy(*args)
        kernels.min_disjoint_pair_loop(ftab, nw)
        row("min_pair", f"nw={nw}", {
            "interpreted": best_of(lambda: py_func(kernels.min_disjoint_pair_loop)(ftab, nw), repeat, 1),
            "numba": best_of(lambda: kernels.min_disjoint_pair_loop(ftab, nw), repeat, number),
            "numpy": best_of(lambda: kernels.min_disjoint_pair_numpy(ftab, nw), repeat, number),
        })
    for n, m, k in ((6, 20, 2), (10, 60, 3), (16, 120, 3)):
        tails, heads, costs = karb_inputs(rng, n, m)
        call = (n, 0, k, tails, heads, costs, k * (n - 1))
        kernels.karb_min_cost(*call)
        row("karb_min_cost", f"n={n},m={m}", {
            "interpreted": best_of(lambda: py_func(kernels.karb_min_cost)(*call), repeat, 1),
            "numba": best_of(lambda: kernels.karb_min_cost(*call), repeat, 5),
        })


def bench_end_to_end() -> None:
    cmd = [sys.executable, "-m", "karbblock.cli", "selftest", "--count", "40", "--seed", "1"]
    for flag in ("0", "1"):
        env = dict(os.environ, KARBBLOCK_DISABLE_NUMBA=flag)
        t0 = time.perf_counter()
        subprocess.run(cmd, env=env, check=True, capture_output=True)
        label = "numpy fallback" if flag == "1" else "numba"
        print(f"selftest x40 with {label:<15} {time.perf_counter() - t0:7.2f}s (includes startup and jit)")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--end-to-end", action="store_true")
    args = ap.parse_args()
    if not USE_NUMBA:
        print("numba is disabled in this process; 'numba' columns show the plain functions")
    bench_kernels(args.repeat)
    if args.end_to_end:
        bench_end_to_end()


if __name__ == "__main__":
    main()
