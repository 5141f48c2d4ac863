"""Compare the compiled and numpy transition kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Part one times ``successors`` alone on full layers of N walkers in a slice of
the given width.  Part two times a whole q = 1 sweep in a subprocess per
backend, since the backend is fixed at import; the exact big-integer sums
take a fixed share of that time whichever kernel runs.
"""
import argparse
import itertools
import os
import subprocess
import sys
import timeit

import numpy as np

from lozenge import _kernels_py

try:
    from lozenge import _kernels
except ImportError:
    _kernels = None


def full_layer(n: int, width: int, offset: int = 0):
    positions = [offset + 2 * k for k in range(width)]
    rows = [sorted(c, reverse=True) for c in itertools.combinations(positions, n)]
    states = np.ascontiguousarray(rows, dtype=np.int64)
    # the next slice has the other parity and one more site on each side
    allowed = np.ones(width + 1, dtype=np.uint8)
    return states, allowed, offset - 1


SWEEP = (
    "from fractions import Fraction; from lozenge.lattice import build_hexagon;"
    "from lozenge.enumeration import partition_value;"
    "d = build_hexagon(10, Fraction(1, 4), 20)"
)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = {"python": _kernels_py.successors}
    if _kernels is not None:
        backends["cython"] = _kernels.successors
    else:
        print("compiled kernel not built; timing the numpy fallback only")

    print(f"{'N':>3} {'width':>6} {'states':>8} " + " ".join(f"{b + ' ms':>11}" for b in backends) + "   speedup")
    for n, width in [(2, 20), (3, 20), (4, 18), (5, 18), (6, 16)]:
        states, allowed, offset = full_layer(n, width)
        ref = None
        times = {}
        for name, fn in backends.items():
            out = fn(states, allowed, offset)
            if ref is None:
                ref = out
            else:
                assert all(np.array_equal(a, b) for a, b in zip(ref, out)), "backends disagree"
            times[name] = min(timeit.repeat(lambda: fn(states, allowed, offset), number=1, repeat=args.repeat)) * 1e3
        speed = f"{times['python'] / times['cython']:8.1f}x" if "cython" in times else ""
        print(f"{n:>3} {width:>6} {len(states):>8} " + " ".join(f"{t:11.2f}" for t in times.values()) + "  " + speed)

    print("\nfull sweep: partition_value at q = 1 of a 5-walker hexagon, T = 20")
    for name in backends:
        env = dict(os.environ, LOZENGE_PURE_PYTHON="1" if name == "python" else "0")
        code = (f"import timeit; {SWEEP}; "
                f"print(min(timeit.repeat(lambda: partition_value(d, 1), number=1, repeat={args.repeat})))")
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        print(f"  {name:>7}: {float(out.stdout) * 1e3:9.1f} ms")


if __name__ == "__main__":
    main()
