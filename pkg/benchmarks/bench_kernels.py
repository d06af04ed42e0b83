"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from proxcat import kernels
from proxcat.geometry import Euclidean, HalfPlane, Spider


def _points(space, base, n, rng):
    return space.to_array([space.sample(rng, base, 2.0) for _ in range(n)])


def cases(rng):
    out = []
    spaces = [
        (Euclidean(3), Euclidean(3).origin()),
        (HalfPlane(), HalfPlane().point(0.0, 1.0)),
        (Spider(5), Spider(5).hub()),
    ]
    for space, base in spaces:
        P, Q = _points(space, base, 20_000, rng), _points(space, base, 20_000, rng)
        out.append((f"batch_dist {space!r} n=20000", lambda b, k=space.kind_code, P=P, Q=Q: kernels.batch_dist(k, P, Q, backend=b)))
        W = _points(space, base, 400, rng)
        ends = np.minimum(np.arange(400) + 40, 399)
        out.append((f"window_points {space!r} n=400", lambda b, k=space.kind_code, W=W, e=ends: kernels.window_witness_points(k, W, e, 1e-12, backend=b)))
    # a slowly decaying sequence keeps the scan running to the end
    a = 1.0 / np.arange(1, 200_001)
    ends = np.minimum(np.arange(len(a)) + 1000, len(a) - 1)
    out.append(("window_real n=200000", lambda b: kernels.window_witness_real(a, ends, 1e-12, backend=b)))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = sorted(kernels.BACKENDS)
    print(f"active backend: {kernels.BACKEND}")
    print(f"{'case':40s}" + "".join(f"{b:>12s}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name, fn in cases(np.random.default_rng(0)):
        t = {b: min(timeit.repeat(lambda: fn(b), number=1, repeat=args.repeat)) for b in backends}
        row = f"{name:40s}" + "".join(f"{t[b] * 1e3:10.2f}ms" for b in backends)
        if len(backends) > 1:
            row += f"{t['python'] / t['compiled']:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
