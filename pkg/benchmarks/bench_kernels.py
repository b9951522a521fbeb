"""Compare the compiled kernels against the pure-numpy fallback.

Run:  python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from roundkit import bodies as bd
from roundkit import kernels
from roundkit.kernels import _ref
from roundkit.linear import RngStream
from roundkit.measure import mc_volume

try:
    from roundkit.kernels import _fast
except ImportError:
    _fast = None


def timeit(fn, *args, repeats=7):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernel(name, ref_fn, fast_fn, args):
    t_ref = timeit(ref_fn, *args)
    if fast_fn is None:
        print(f"{name:<46} python {t_ref*1e3:8.2f} ms   (no compiled backend)")
        return
    t_fast = timeit(fast_fn, *args)
    print(
        f"{name:<46} python {t_ref*1e3:8.2f} ms   compiled {t_fast*1e3:8.2f} ms"
        f"   speedup {t_ref / t_fast:5.2f}x"
    )


def bench_mc(backend_name, impl):
    saved = (kernels.abs_dot_max, kernels.factor_norm, kernels.pnorm_rows)
    kernels.abs_dot_max = impl.abs_dot_max
    kernels.factor_norm = impl.factor_norm
    kernels.pnorm_rows = impl.pnorm_rows
    try:
        body = bd.cube(8)
        t = timeit(lambda: mc_volume(body, bd.ball(8), 200_000, RngStream(3)), repeats=3)
        print(f"mc_volume cube dim 8, 2e5 samples [{backend_name:>8}] {t*1e3:8.1f} ms")
    finally:
        kernels.abs_dot_max, kernels.factor_norm, kernels.pnorm_rows = saved


def main():
    rng = np.random.default_rng(0)
    print(f"active backend at import: {kernels.backend_name()}\n")
    for m, rows, n in [(200_000, 8, 4), (200_000, 16, 8), (200_000, 64, 8), (20_000, 64, 16)]:
        mat = np.ascontiguousarray(rng.standard_normal((rows, n)))
        pts = np.ascontiguousarray(rng.standard_normal((m, n)))
        bench_kernel(
            f"abs_dot_max m={m} rows={rows} n={n}",
            _ref.abs_dot_max,
            None if _fast is None else _fast.abs_dot_max,
            (mat, pts),
        )
    for m, n in [(200_000, 4), (200_000, 8), (200_000, 16)]:
        factor = np.ascontiguousarray(rng.standard_normal((n, n)))
        pts = np.ascontiguousarray(rng.standard_normal((m, n)))
        bench_kernel(
            f"factor_norm m={m} n={n}",
            _ref.factor_norm,
            None if _fast is None else _fast.factor_norm,
            (factor, pts),
        )
    for p in [1.0, 2.0, 3.0, float("inf")]:
        pts = np.ascontiguousarray(rng.standard_normal((200_000, 8)))
        bench_kernel(
            f"pnorm_rows m=200000 n=8 p={p}",
            _ref.pnorm_rows,
            None if _fast is None else _fast.pnorm_rows,
            (pts, p),
        )
    print()
    bench_mc("python", _ref)
    if _fast is not None:
        bench_mc("compiled", _fast)


if __name__ == "__main__":
    main()
