"""Compare the compiled and pure-Python kernel backends.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from stlsq import kernels
from stlsq.solver import support_masks


def cases():
    rng = np.random.default_rng(0)
    out = []
    for name, fn, steps in (("rk4_lorenz", "rk4_lorenz", 400), ("rk4_thomas", "rk4_thomas", 4000)):
        buf = np.empty((steps + 1, 3))
        u0 = np.array([1.0, 1.0, 0.0])
        out.append((f"{name} ({steps} steps)", lambda m, fn=fn, u0=u0, steps=steps, buf=buf:
                    getattr(m, fn)(u0, 0.025, steps, buf)))
    for n in (8, 12):
        A = rng.standard_normal((3 * n, n))
        b = rng.standard_normal(3 * n)
        masks = support_masks(n)
        out.append((f"best_subset (n={n}, {len(masks)} supports)",
                    lambda m, A=A, b=b, masks=masks: m.best_subset(A, b, masks, 1.0, 0.25, 1e-12, 1e-12)))
    return out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    backends = kernels.available_backends()
    print(f"selected backend: {kernels.BACKEND}; available: {', '.join(sorted(backends))}")
    header = f"{'kernel':<36}" + "".join(f"{k:>14}" for k in sorted(backends)) + f"{'speedup':>10}"
    print(header)
    for label, run in cases():
        t = {}
        for key, mod in backends.items():
            number = 1 if key == "python" else 20
            t[key] = min(timeit.repeat(lambda: run(mod), number=number, repeat=args.repeat)) / number
        row = f"{label:<36}" + "".join(f"{t[k] * 1e3:>12.3f}ms" for k in sorted(backends))
        if "cython" in t:
            row += f"{t['python'] / t['cython']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
