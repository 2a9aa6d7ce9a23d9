"""Compare the compiled kernels against the numpy fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--sizes 256 4096 65536] [--repeat 5]

Both backends are imported directly, so the comparison does not depend on
``SHIFTLAB_PURE_PYTHON``. Each row reports the best of ``--repeat`` timings and
the largest absolute difference between the two outputs.
"""

import argparse
import timeit

import numpy as np

from shiftlab import _kernels_py

try:
    from shiftlab import _kernels
except ImportError:  # extension not built
    _kernels = None


def _cases(n, rng):
    theta = np.sort(rng.uniform(0, 2 * np.pi, n))
    jumps = rng.choice([-1.0, 1.0], n)
    t = np.sort(rng.standard_normal(n) * 10)
    coeffs = rng.standard_normal(33) + 1j * rng.standard_normal(33)
    poles = np.array([-1j, 1 - 2j, -3 - 0.5j])
    orders = np.array([1, 2, 2], dtype=np.int_)
    rc = np.array([1.0, 0.5 - 0.25j, 2.0 + 0j])
    near = np.sort(np.concatenate([theta, theta[: n // 4] + 1e-14]))
    nj = rng.choice([-1.0, 1.0], near.size)
    vals = np.exp(3j * np.linspace(0, 2 * np.pi, n, endpoint=False)) * (2 + np.cos(np.linspace(0, 6, n)))
    return {
        "jump_fourier_sums": (theta, jumps, -64, 64),
        "laurent_jump_sum": (theta, jumps, coeffs, -16),
        "rational_jump_sum": (t, jumps, poles, orders, rc),
        "merge_sorted_phases": (near, nj, 1e-12),
        "unwrap_phase": (vals,),
        "arctan_weighted_l1": (t, rng.standard_normal(n + 1)),
        "truncated_l1": (t, rng.standard_normal(n + 1), 100.0),
    }


def _diff(a, b):
    if isinstance(a, tuple):
        return max(_diff(x, y) for x, y in zip(a, b))
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)), initial=0.0))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[256, 4096, 65536])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    if _kernels is None:
        print("compiled extension not available; build with `pip install -e . --no-build-isolation`")
        return 1
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<22}{'n':>8}{'numpy [ms]':>13}{'cython [ms]':>13}{'speedup':>9}{'max diff':>11}")
    for n in args.sizes:
        for name, call_args in _cases(n, rng).items():
            fp, fc = getattr(_kernels_py, name), getattr(_kernels, name)
            number = max(1, 20000 // n)
            tp = min(timeit.repeat(lambda: fp(*call_args), number=number, repeat=args.repeat)) / number
            tc = min(timeit.repeat(lambda: fc(*call_args), number=number, repeat=args.repeat)) / number
            d = _diff(fp(*call_args), fc(*call_args))
            print(f"{name:<22}{n:>8}{tp * 1e3:>13.3f}{tc * 1e3:>13.3f}{tp / tc:>9.2f}{d:>11.1e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
