"""Independent reference computations, kept free of any lozenge import.

These are deliberately naive: direct enumeration of plane-partition arrays and of
lattice-path families, and plain-integer power-series products.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

# frozen reference values, each reproduced by a function below
BOX_222_COUNT = 20
TSSCPP_COUNTS = {1: 1, 2: 2, 3: 7, 4: 42}
MACMAHON_HEAD = [1, 1, 3, 6, 13, 24, 48]


def plane_partitions_in_box(rows: int, cols: int, height: int) -> dict[int, int]:
    """Count rows x cols arrays with entries in [0, height], weakly decreasing along rows and columns."""
    counts: dict[int, int] = {}

    def fill(cells, idx, grid):
        if idx == len(cells):
            s = sum(grid.values())
            counts[s] = counts.get(s, 0) + 1
            return
        i, j = cells[idx]
        cap = height
        if i > 0:
            cap = min(cap, grid[(i - 1, j)])
        if j > 0:
            cap = min(cap, grid[(i, j - 1)])
        for v in range(cap + 1):
            grid[(i, j)] = v
            fill(cells, idx + 1, grid)
        grid.pop((i, j), None)

    fill([(i, j) for i in range(rows) for j in range(cols)], 0, {})
    return counts


def macmahon_coefficients(order: int) -> list[int]:
    """Expand prod_k (1 - q^k)^(-k) by multiplying geometric series one factor at a time."""
    series = [1] + [0] * order
    for k in range(1, order + 1):
        for _ in range(k):
            # multiply by 1/(1 - q^k): running sum with stride k
            for n in range(k, order + 1):
                series[n] += series[n - k]
    return series


def macmahon_coefficients_reversed(order: int) -> list[int]:
    """Same product taken in the opposite factor order, as a cross-check."""
    series = [1] + [0] * order
    for k in range(order, 0, -1):
        geo = [0] * (order + 1)
        for m in range(0, order + 1, k):
            geo[m] = 1
        for _ in range(k):
            series = [sum(series[i] * geo[n - i] for i in range(n + 1)) for n in range(order + 1)]
    return series


def _paths(slices: dict[int, set[int]], t0: int, t1: int, start: int | None = None):
    """All single-walker paths through the allowed twice-positions, steps of +-1 in twice units."""
    starts = [start] if start is not None else sorted(slices[t0])
    out = []

    def walk(path):
        t = t0 + len(path) - 1
        if t == t1:
            out.append(tuple(path))
            return
        for step in (-1, 1):
            nxt = path[-1] + step
            if nxt in slices[t + 1]:
                path.append(nxt)
                walk(path)
                path.pop()

    for s in starts:
        if s in slices[t0]:
            walk([s])
    return out


def tsscpp_family_count(n: int) -> int:
    """Families of n strictly ordered walkers in the twelfth-hexagon, each time t covering twice-position 3t."""
    slices = {t: {t + 2 * j for j in range(2 * n - 1 - t)} for t in range(n)}
    paths = _paths(slices, 0, n - 1)
    total = 0
    for fam in itertools.combinations(sorted(paths), n):
        ok = True
        for t in range(n):
            pos = [p[t] for p in fam]
            if len(set(pos)) < n or 3 * t not in pos:
                ok = False
                break
        # non-intersection: positions at every time distinct and order preserved
        if ok:
            order0 = sorted(range(n), key=lambda i: fam[i][0])
            ok = all(
                all(fam[order0[i]][t] < fam[order0[i + 1]][t] for i in range(n - 1)) for t in range(n)
            )
        total += ok
    return total


def family_count(slices: dict[int, set[int]], t0: int, t1: int, n: int, q: Fraction = Fraction(1),
                 up_weight: Fraction = Fraction(1)) -> Fraction:
    """Weighted count of n non-intersecting walkers: weight q^(sum twice-h / 2) * up_weight^(#up steps)."""
    paths = _paths(slices, t0, t1)
    total = Fraction(0)
    for fam in itertools.combinations(sorted(paths), n):
        if all(len({p[t - t0] for p in fam}) == n for t in range(t0, t1 + 1)):
            order = sorted(fam)
            if all(all(order[i][k] < order[i + 1][k] for i in range(n - 1)) for k in range(t1 - t0 + 1)):
                twice = sum(sum(p) for p in fam)
                ups = sum(1 for p in fam for a, b in zip(p, p[1:]) if b > a)
                w = up_weight**ups
                if q != 1:
                    w *= _qpow(q, twice)
                total += w
    return total


def _qpow(q: Fraction, twice_exp: int) -> Fraction:
    root = Fraction(math.isqrt(q.numerator), math.isqrt(q.denominator))
    if root * root != q:
        raise ValueError("q must be a rational square for half-integer powers")
    return root**twice_exp


def hexagon_ellipse(a: float, b: float, tau, sign: int):
    """Closed-form envelope of the a x b hexagon."""
    import numpy as np

    tau = np.asarray(tau, dtype=float)
    return 0.5 * (a + b + tau * a * (1 + b) + sign * np.sqrt((1 - tau**2) * (1 - a * a) * b * (b + 2)))


def standard_tableaux(parts: tuple[int, ...]) -> int:
    """Hook length formula for the number of standard Young tableaux."""
    n = sum(parts)
    conj = [sum(1 for p in parts if p > j) for j in range(parts[0])] if parts else []
    hooks = 1
    for i, p in enumerate(parts):
        for j in range(p):
            hooks *= (p - j - 1) + (conj[j] - i - 1) + 1
    return math.factorial(n) // hooks
