"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--depth 8] [--points 10000] [--repeat 5]

Inputs mirror the dyadic forbidden-energy scan: a few hundred atoms against
a 10^4-point energy grid. Both backends are checked for agreement before
timing.
"""
import argparse
import time

import numpy as np

from singpert import kernels
from singpert.measure import dyadic_benchmark


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(x, w, y):
    eta = np.full(y.size, 1e-3)
    gaps_lo, gaps_hi = x[:-1] + 1e-12, x[1:] - 1e-12
    target = np.zeros(gaps_lo.size)
    return {
        "herglotz_atoms": lambda k: k.herglotz_atoms(x, w, y, eta),
        "gn_ladder(k=60)": lambda k: k.gn_ladder(x, w, y[:2000], 60),
        "stieltjes_real": lambda k: k.stieltjes_real(x, w, y),
        "bisect_stieltjes": lambda k: k.bisect_stieltjes(x, w, gaps_lo, gaps_hi,
                                                         target, 1e-12, 200),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--depth", type=int, default=8, help="dyadic depth (2^(d+1)-2 atoms)")
    ap.add_argument("--points", type=int, default=10_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    m = dyadic_benchmark(args.depth, 4.0)
    x, w = np.array(m.x), np.array(m.w)
    y = np.linspace(-1, 1, args.points) + 1e-7
    backends = kernels.available_backends()
    if "compiled" not in backends:
        print("compiled extension not built; timing the numpy fallback only")

    print(f"{x.size} atoms, {y.size} points, best of {args.repeat}")
    print(f"{'kernel':<20}" + "".join(f"{name:>12}" for name in sorted(backends)) + "     speedup")
    for label, fn in cases(x, w, y).items():
        results = {name: fn(mod) for name, mod in backends.items()}
        ref = results["python"]
        for name, out in results.items():
            a = np.asarray(out[0] if isinstance(out, tuple) else out)
            b = np.asarray(ref[0] if isinstance(ref, tuple) else ref)
            if not np.allclose(a, b, rtol=1e-10, atol=1e-10):
                raise SystemExit(f"{label}: {name} disagrees with python")
        t = {name: best_of(lambda: fn(mod), args.repeat) for name, mod in backends.items()}
        row = f"{label:<20}" + "".join(f"{t[n] * 1e3:>10.2f}ms" for n in sorted(t))
        if "compiled" in t:
            row += f"  {t['python'] / t['compiled']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
