"""Exact transfer-matrix enumeration of non-intersecting particle trajectories.

The state at time t is a strictly decreasing tuple of twice-positions.  A layer
is an int64 array of such rows; transitions come from :mod:`lozenge.kernels`.
Weights accumulate in numpy object arrays holding Python ints or Fractions, so
every result is exact.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .lattice import DomainError, Partition, RhombusDomain, accessible_cells, intervals
from .qpoly import HalfQPolynomial, _rational_sqrt

log = logging.getLogger(__name__)

__all__ = [
    "ParticleConfig",
    "DensityTable",
    "StateCapExceeded",
    "NoConfiguration",
    "DEFAULT_STATE_CAP",
    "partition_function",
    "partition_value",
    "volume_normalize",
    "box_volume_offset",
    "gv_count",
    "single_path_counts",
    "density",
    "densities",
    "brute_force_count",
    "build_tsscpp",
    "tsscpp_partition_function",
    "build_plancherel",
    "plancherel_weight",
    "plancherel_domain_weight",
    "build_trapezoid",
]

DEFAULT_STATE_CAP = 5_000_000


class StateCapExceeded(RuntimeError):
    pass


class NoConfiguration(ValueError):
    """The domain admits no trajectory (Z = 0)."""


@dataclass(frozen=True)
class ParticleConfig:
    positions: tuple[int, ...]  # twice values, strictly decreasing
    time: int

    def __post_init__(self):
        p = tuple(int(x) for x in self.positions)
        if any(p[i] <= p[i + 1] for i in range(len(p) - 1)):
            raise ValueError(f"positions must be strictly decreasing: {p}")
        if any((x - self.time) % 2 for x in p):
            raise ValueError(f"parity mismatch at t={self.time}: {p}")
        object.__setattr__(self, "positions", p)


@dataclass
class DensityTable:
    time: int
    occupation: dict[int, Fraction]  # twice_h -> probability
    n_particles: int

    def integrated(self) -> dict[int, Fraction]:
        """I(h, t): expected number of particles at positions >= h."""
        out, acc = {}, Fraction(0)
        for h in sorted(self.occupation, reverse=True):
            acc += self.occupation[h]
            out[h] = acc
        return out

    def profile(self, n_l: int | None = None) -> dict[int, Fraction]:
        """Expected partition row ``lambda(h, t) = h + I(h,t) - N - |t|/2`` at each site, in twice units."""
        n = self.n_particles if n_l is None else n_l
        return {h: h + 2 * i - 2 * n - abs(self.time) for h, i in self.integrated().items()}

    def total(self) -> Fraction:
        return sum(self.occupation.values(), Fraction(0))


# ---------------------------------------------------------------- engine


@dataclass
class _Layer:
    t: int
    states: np.ndarray  # [M, N] int64
    energy: np.ndarray  # [M] sum of twice-positions


def _prepare(domain: RhombusDomain) -> dict[int, np.ndarray]:
    """Per-slice sorted arrays restricted to cells reachable from both ends."""
    live = accessible_cells(domain.t_min, domain.t_max, domain.cells())
    out = {}
    for t in domain.times:
        out[t] = np.array(sorted(h for h, tt in live if tt == t), dtype=np.int64)
    return out


def _initial_states(domain: RhombusDomain, cells: np.ndarray) -> np.ndarray:
    n = domain.n_particles
    if len(cells) < n:
        return np.zeros((0, n), dtype=np.int64)
    rows = [sorted(c, reverse=True) for c in _combinations(cells.tolist(), n)]
    return np.array(rows, dtype=np.int64).reshape(len(rows), n)


def _combinations(items, k):
    from itertools import combinations

    return combinations(items, k)


def _constraint_mask(domain: RhombusDomain, t: int, states: np.ndarray, ends) -> np.ndarray:
    keep = np.ones(len(states), dtype=bool)
    for h, tt in domain.obliged:
        if tt == t:
            keep &= (states == h).any(axis=1)
    fill = {i: c for (tt, i), c in domain.filling.items() if tt == t}
    if fill:
        for i, (lo, hi) in enumerate(intervals(domain.slices[t])):
            inside = ((states >= lo) & (states <= hi)).sum(axis=1)
            keep &= inside == fill[i]
    if ends is not None:
        remaining = domain.t_max - t
        keep &= (np.abs(states - ends[None, :]) <= remaining).all(axis=1)
    return keep


def _layers(domain: RhombusDomain, state_cap: int):
    """Forward sweep yielding layers and the transitions between them.

    Returns ``(layers, transitions)`` where ``transitions[k] = (src, dst, ups)``
    links layer k to layer k+1.
    """
    n = domain.n_particles
    cells = _prepare(domain)
    ends = None
    if len(domain.slices[domain.t_max]) == n:
        ends = np.array(sorted(domain.slices[domain.t_max], reverse=True), dtype=np.int64)
    states = _initial_states(domain, cells[domain.t_min])
    if len(states) > state_cap:
        raise StateCapExceeded(f"{len(states)} states at t={domain.t_min} exceed cap {state_cap}")
    states = states[_constraint_mask(domain, domain.t_min, states, ends)]
    layers = [_Layer(domain.t_min, states, states.sum(axis=1))]
    transitions = []
    for t in range(domain.t_min, domain.t_max):
        nxt_cells = cells[t + 1]
        cur = layers[-1].states
        if len(nxt_cells) == 0 or len(cur) == 0:
            empty = np.zeros((0, n), dtype=np.int64)
            layers.append(_Layer(t + 1, empty, np.zeros(0, dtype=np.int64)))
            transitions.append((np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0, np.int64)))
            continue
        offset = int(nxt_cells[0])
        mask = np.zeros((int(nxt_cells[-1]) - offset) // 2 + 1, dtype=np.uint8)
        mask[(nxt_cells - offset) // 2] = 1
        src, nxt, ups = kernels.successors(np.ascontiguousarray(cur), mask, offset)
        keep = _constraint_mask(domain, t + 1, nxt, ends)
        src, nxt, ups = src[keep], nxt[keep], ups[keep]
        if n == 0:
            uniq = np.zeros((1 if len(src) else 0, 0), dtype=np.int64)
            dst = np.zeros(len(src), dtype=np.int64)
        else:
            uniq, dst = _dedupe(nxt, offset)
        if len(uniq) > state_cap:
            raise StateCapExceeded(f"{len(uniq)} states at t={t + 1} exceed cap {state_cap}")
        layers.append(_Layer(t + 1, uniq, uniq.sum(axis=1)))
        transitions.append((src, dst, ups))
    return layers, transitions


def _dedupe(rows: np.ndarray, offset: int):
    if len(rows) == 0:
        return rows, np.zeros(0, dtype=np.int64)
    width = int(rows.max() - offset) // 2 + 1
    if width <= 62:
        codes = np.bitwise_or.reduce(np.left_shift(np.int64(1), (rows - offset) // 2), axis=1)
        _, first, inv = np.unique(codes, return_index=True, return_inverse=True)
        return rows[first], inv.reshape(-1).astype(np.int64)
    uniq, inv = np.unique(rows, axis=0, return_inverse=True)
    # np.unique sorts rows ascending lexicographically; rows stay strictly decreasing
    return uniq, inv.reshape(-1).astype(np.int64)


def _narrow(x):
    """Integral Fractions become ints; object-array sums of ints are several times faster."""
    return int(x) if isinstance(x, Fraction) and x.denominator == 1 else x


def _jump_weights(domain: RhombusDomain, t: int, ups: np.ndarray, n: int) -> np.ndarray | None:
    a, b = domain.weight_up(t), domain.weight_down(t)
    if a == 1 and b == 1:
        return None
    table = [_narrow(a**k * b ** (n - k)) for k in range(n + 1)]
    out = np.empty(len(ups), dtype=object)
    for k in range(n + 1):
        sel = ups == k
        if sel.any():
            out[sel] = table[k]
    return out


def _scatter_add(target: np.ndarray, index: np.ndarray, values: np.ndarray) -> None:
    """``target[index[k]] += values[k]`` for object arrays (rows may be vectors)."""
    if len(index) == 0:
        return
    order = np.argsort(index, kind="stable")
    idx = index[order]
    vals = values[order]
    starts = np.flatnonzero(np.r_[True, idx[1:] != idx[:-1]])
    sums = np.add.reduceat(vals, starts, axis=0)
    target[idx[starts]] += sums


def _forward_scalar(domain, layers, transitions, q: Fraction):
    """Forward weights at numeric q; ``q^(E/2)`` per state kept as an integer power relative to the layer minimum."""
    n = domain.n_particles
    q = _narrow(q)
    weights = []
    e0 = layers[0].energy
    base = int(e0.min()) if len(e0) else 0
    w = np.array([q ** ((int(e) - base) // 2) for e in e0], dtype=object) if len(e0) else np.zeros(0, dtype=object)
    weights.append(w)
    bases = [base]
    for k, (src, dst, ups) in enumerate(transitions):
        lay = layers[k + 1]
        new = np.zeros(len(lay.states), dtype=object)
        vals = weights[-1][src]
        jw = _jump_weights(domain, layers[k].t, ups, n)
        if jw is not None:
            vals = vals * jw
        _scatter_add(new, dst, vals)
        if len(lay.states):
            b = int(lay.energy.min())
            qpow = np.array([q ** ((int(e) - b) // 2) for e in lay.energy], dtype=object)
            new = new * qpow
        else:
            b = 0
        weights.append(new)
        bases.append(b)
    return weights, bases


def _backward_scalar(domain, layers, transitions, q: Fraction):
    n = domain.n_particles
    q = _narrow(q)
    last = layers[-1]
    weights = [None] * len(layers)
    weights[-1] = np.ones(len(last.states), dtype=object) if len(last.states) else np.zeros(0, dtype=object)
    for k in range(len(transitions) - 1, -1, -1):
        src, dst, ups = transitions[k]
        lay = layers[k + 1]
        if len(lay.states):
            b = int(lay.energy.min())
            qpow = np.array([q ** ((int(e) - b) // 2) for e in lay.energy], dtype=object)
            nxt = weights[k + 1] * qpow
        else:
            nxt = weights[k + 1]
        vals = nxt[dst]
        jw = _jump_weights(domain, layers[k].t, ups, n)
        if jw is not None:
            vals = vals * jw
        cur = np.zeros(len(layers[k].states), dtype=object)
        _scatter_add(cur, src, vals)
        weights[k] = cur
    return weights


def _forward_poly(domain, layers, transitions) -> HalfQPolynomial:
    """Full q-series: row s of the accumulator holds coefficients of q^(j + base/2)."""
    n = domain.n_particles
    e0 = layers[0].energy
    if len(e0) == 0:
        return HalfQPolynomial()
    emin = int(e0.min())
    shift = (e0 - emin) // 2
    width = int(shift.max()) + 1
    acc = np.zeros((len(e0), width), dtype=object)
    acc[np.arange(len(e0)), shift] = 1
    base = emin
    for k, (src, dst, ups) in enumerate(transitions):
        lay = layers[k + 1]
        if len(lay.states) == 0:
            return HalfQPolynomial()
        emin = int(lay.energy.min())
        shift = (lay.energy - emin) // 2
        width_new = acc.shape[1] + int(shift.max())
        new = np.zeros((len(lay.states), width_new), dtype=object)
        vals = acc[src]
        jw = _jump_weights(domain, layers[k].t, ups, n)
        if jw is not None:
            vals = vals * jw[:, None]
        sh = shift[dst]
        for d in np.unique(sh):
            sel = sh == d
            block = np.zeros((len(lay.states), acc.shape[1]), dtype=object)
            _scatter_add(block, dst[sel], vals[sel])
            new[:, d : d + acc.shape[1]] += block
        acc = new
        base += emin
    total = acc.sum(axis=0)
    return HalfQPolynomial({base + 2 * j: c for j, c in enumerate(total) if c})


def partition_function(domain: RhombusDomain, N: int | None = None, *, state_cap: int = DEFAULT_STATE_CAP) -> HalfQPolynomial:
    """Exact ``sum_trajectories q^(sum h) alpha^#up beta^#down`` as a polynomial in q^(1/2)."""
    _check_n(domain, N)
    layers, transitions = _layers(domain, state_cap)
    z = _forward_poly(domain, layers, transitions)
    if z.is_zero():
        empty = next((lay.t for lay in layers if len(lay.states) == 0), None)
        log.warning("no admissible configuration%s", "" if empty is None else f" (no state survives at t={empty})")
    return z


def partition_value(domain: RhombusDomain, q=1, N: int | None = None, *, state_cap: int = DEFAULT_STATE_CAP) -> Fraction:
    """Partition function at a single rational q, without building the series.

    When the total exponent is a half-integer, q must be a rational square.
    """
    _check_n(domain, N)
    q = Fraction(q)
    layers, transitions = _layers(domain, state_cap)
    weights, bases = _forward_scalar(domain, layers, transitions, q)
    z = sum(weights[-1].tolist(), Fraction(0)) if len(weights[-1]) else Fraction(0)
    twice = sum(bases)
    if twice % 2:
        root = _rational_sqrt(q)
        if root is None:
            raise ValueError(f"q={q} is not a rational square; the weight carries q^(1/2)")
        return z * root**twice
    return z * q ** (twice // 2)


def _check_n(domain: RhombusDomain, N):
    if N is not None and N != domain.n_particles:
        raise DomainError(f"domain holds {domain.n_particles} particles, not {N}")


def density(domain: RhombusDomain, N: int | None, t: int, q=1, *, state_cap: int = DEFAULT_STATE_CAP) -> DensityTable:
    """Exact occupation probabilities on slice t at rational q."""
    return densities(domain, N, [t], q, state_cap=state_cap)[t]


def densities(domain: RhombusDomain, N: int | None, times: Sequence[int] | None = None, q=1, *, state_cap: int = DEFAULT_STATE_CAP) -> dict[int, DensityTable]:
    """Like :func:`density` for several slices, sharing one forward/backward sweep."""
    _check_n(domain, N)
    q = Fraction(q)
    if q <= 0:
        raise ValueError("q must be positive")
    times = list(domain.times) if times is None else list(times)
    for t in times:
        if t not in domain.slices:
            raise DomainError(f"t={t} outside [{domain.t_min}, {domain.t_max}]")
    layers, transitions = _layers(domain, state_cap)
    fwd, _ = _forward_scalar(domain, layers, transitions, q)
    bwd = _backward_scalar(domain, layers, transitions, q)
    z = sum(fwd[-1].tolist(), 0)
    if z == 0:
        raise NoConfiguration("no admissible configuration")
    out = {}
    for t in times:
        k = t - domain.t_min
        lay = layers[k]
        prob = fwd[k] * bwd[k]
        ztot = sum(prob.tolist(), 0)  # equals z up to the dropped per-layer base powers
        occ = {int(h): Fraction(0) for h in domain.slices[t]}
        if len(lay.states):
            flat = lay.states.reshape(-1)
            rep = np.repeat(prob, lay.states.shape[1])
            pos, inv = np.unique(flat, return_inverse=True)
            sums = np.zeros(len(pos), dtype=object)
            _scatter_add(sums, inv.reshape(-1), rep)
            for h, s in zip(pos.tolist(), sums.tolist()):
                occ[int(h)] = Fraction(s) / Fraction(ztot)
        out[t] = DensityTable(t, occ, domain.n_particles)
    return out


# ---------------------------------------------------------------- normalizations


def box_volume_offset(N_l: int, N_mu: int, N_nu: int) -> Fraction:
    """Total ``sum h`` of the empty plane partition in the boundary-built box."""
    n = N_l
    return Fraction((1 + N_mu + N_nu) * n * (n - 1), 2) + Fraction(n * (N_mu * (N_mu + 1) + N_nu * (N_nu + 1)), 4)


def volume_normalize(Z: HalfQPolynomial, N: int, N_mu: int, N_nu: int, N_l: int | None = None) -> HalfQPolynomial:
    """Divide out the empty configuration's weight so exponents count cubes."""
    n_l = N if N_l is None else N_l
    if n_l != N:
        raise ValueError(f"N={N} differs from N_l={n_l}")
    off = box_volume_offset(n_l, N_mu, N_nu) * 2
    assert off.denominator == 1
    return Z.shift(-int(off))


# ---------------------------------------------------------------- Gessel-Viennot


def single_path_counts(domain: RhombusDomain, start: int, t0: int | None = None) -> dict[tuple[int, int], int]:
    """Number of single slope +-1/2 paths from ``(start, t0)`` to each cell of the domain."""
    t0 = domain.t_min if t0 is None else t0
    cur = {start: 1} if start in set(domain.slices[t0]) else {}
    out = {(h, t0): c for h, c in cur.items()}
    for t in range(t0 + 1, domain.t_max + 1):
        allowed = set(domain.slices[t])
        nxt: dict[int, int] = {}
        for h, c in cur.items():
            for p in (h - 1, h + 1):
                if p in allowed:
                    nxt[p] = nxt.get(p, 0) + c
        cur = nxt
        out.update({(h, t): c for h, c in cur.items()})
    return out


def gv_count(domain: RhombusDomain, start: ParticleConfig | None = None, end: ParticleConfig | None = None) -> int:
    """Lindstrom-Gessel-Viennot determinant of single-path counts (q = 1, unit jump weights).

    Obliged cells and filling constraints are not representable as a determinant
    and are rejected.
    """
    import sympy

    if domain.obliged or domain.filling:
        raise ValueError("determinant formula needs a domain without obliged or filling constraints")
    n = domain.n_particles
    if start is None:
        start = ParticleConfig(tuple(sorted(domain.slices[domain.t_min], reverse=True)), domain.t_min)
    if end is None:
        end = ParticleConfig(tuple(sorted(domain.slices[domain.t_max], reverse=True)), domain.t_max)
    if len(start.positions) != n or len(end.positions) != n:
        raise ValueError("start and end must each hold N particles")
    if n == 0:
        return 1
    rows = []
    for s in start.positions:
        counts = single_path_counts(domain, s, start.time)
        rows.append([counts.get((e, end.time), 0) for e in end.positions])
    return int(sympy.Matrix(rows).det(method="bareiss"))


# ---------------------------------------------------------------- worked domains


def build_trapezoid(T: int, alpha=1, N: int | None = None) -> RhombusDomain:
    """Trapezoid with free start ``0 <= h <= 2T`` at t=0 and ``T/2 <= h <= 3T/2`` at t=T.

    Slice t is ``t/2 <= h <= 2T - t/2``.  Up-jumps carry weight ``alpha``, down-jumps 1.
    ``N`` defaults to T particles.
    """
    n = T if N is None else N
    if n <= 0 or T <= 0:
        raise DomainError("N and T must be positive")
    alpha = Fraction(alpha)
    slices = {t: tuple(range(t, 4 * T - t + 1, 2)) for t in range(T + 1)}
    return RhombusDomain(0, T, slices, n, alpha={t: alpha for t in range(T)})


def build_tsscpp(N: int) -> RhombusDomain:
    """One twelfth of the 2N hexagon with the diagonal straight-line constraint.

    Slices run over t = 0..N-1 with twice-positions ``t + 2j``; the cell at
    twice-position 3t is obliged at every time, and the t=0 slice is left free.
    """
    if N < 1:
        raise DomainError("N must be >= 1")
    slices = {t: tuple(t + 2 * j for j in range(2 * N - 1 - t)) for t in range(N)}
    obliged = {(3 * t, t) for t in range(N)}
    return RhombusDomain(0, N - 1, slices, N, obliged=obliged)


def tsscpp_partition_function(N: int, q=None):
    """TSSCPP generating function: the full q-series, or its exact value when ``q`` is given."""
    dom = build_tsscpp(N)
    if q is None:
        return partition_function(dom)
    return partition_value(dom, q)


def build_plancherel(mu: Partition, N: int, T: int) -> RhombusDomain:
    """Particles start at ``h_i(mu)`` at t=0 and end packed at ``T/2 + N - i`` at t=T."""
    if len(mu.parts) > N:
        raise DomainError(f"mu has more than N={N} parts")
    if T < 0:
        raise DomainError("T must be nonnegative")
    h = Partition(mu.parts, N).h_coordinates()
    start = tuple(2 * x for x in h)
    end = tuple(T + 2 * (N - i) for i in range(1, N + 1))
    top = start[0] + T
    slices = {t: tuple(p for p in range(t, top + 1) if (p - t) % 2 == 0) for t in range(1, T)}
    slices[0] = tuple(sorted(start))
    slices[T] = tuple(sorted(end))
    return RhombusDomain(0, T, slices, N)


def plancherel_domain_weight(mu: Partition, N: int, T: int) -> Fraction:
    """Path-family count of the Plancherel domain at q=1, divided by ``T**|mu|``."""
    z = partition_value(build_plancherel(mu, N, T), 1)
    return Fraction(z) / Fraction(T) ** mu.size


def plancherel_weight(mu: Partition, N: int, q=1) -> Fraction:
    """Closed-form limit weight ``prod_{i>j}[h_j - h_i] / prod_i [h_i]!`` with ``[n] = q^(-n/2) - q^(n/2)``.

    At q=1 this is ``Delta(h) / prod h_i!``.  For q != 1 the product is evaluated
    exactly as ``q^(E/2)`` times a ratio of ``(1 - q^m)`` factors, which requires
    ``q`` to be a rational square whenever E is odd.
    """
    if isinstance(q, complex):
        raise TypeError("complex q is not supported")
    q = Fraction(q)
    if q <= 0:
        raise ValueError("q must be positive")
    if len(mu.parts) > N:
        raise DomainError(f"mu has more than N={N} parts")
    h = Partition(mu.parts, N).h_coordinates()
    pairs = [(h[j] - h[i]) for i in range(N) for j in range(i)]
    facts = [m for x in h for m in range(1, x + 1)]
    if q == 1:
        num = Fraction(1)
        for d in pairs:
            num *= d
        den = Fraction(1)
        for m in facts:
            den *= m
        return num / den
    # [m] = q^(-m/2) (1 - q^m)
    twice_e = -sum(pairs) + sum(facts)
    num = Fraction(1)
    for d in pairs:
        num *= 1 - q**d
    den = Fraction(1)
    for m in facts:
        den *= 1 - q**m
    if den == 0:
        raise ZeroDivisionError("degenerate q")
    if twice_e % 2:
        root = _rational_sqrt(q)
        if root is None:
            raise ValueError(f"q={q} is not a rational square; the closed form carries q^(1/2)")
        return num / den * root**twice_e
    return num / den * q ** (twice_e // 2)


# ---------------------------------------------------------------- brute-force oracles


def brute_force_count(domain: RhombusDomain, q=1) -> Fraction:
    """Sum over all products of single-particle paths; exponential, for tests only."""
    n = domain.n_particles
    q = Fraction(q)
    paths = []

    def walk(prefix):
        t = domain.t_min + len(prefix) - 1
        if t == domain.t_max:
            paths.append(tuple(prefix))
            return
        nxt = set(domain.slices[t + 1])
        for d in (-1, 1):
            if prefix[-1] + d in nxt:
                walk(prefix + [prefix[-1] + d])

    for s in domain.slices[domain.t_min]:
        walk([s])
    total = Fraction(0)
    for fam in _ordered_families(paths, n):
        ok = True
        for k, t in enumerate(domain.times):
            col = [p[k] for p in fam]
            if any(col[i] <= col[i + 1] for i in range(n - 1)):
                ok = False
                break
            for h, tt in domain.obliged:
                if tt == t and h not in col:
                    ok = False
            if not ok:
                break
        if not ok:
            continue
        w = Fraction(1)
        for k in range(len(fam[0]) - 1 if fam else 0):
            t = domain.t_min + k
            for p in fam:
                w *= domain.weight_up(t) if p[k + 1] > p[k] else domain.weight_down(t)
        twice = sum(sum(p) for p in fam)
        if twice % 2:
            root = _rational_sqrt(q)
            if root is None:
                raise ValueError("need a rational square q")
            w *= root**twice
        else:
            w *= q ** (twice // 2)
        total += w
    return total


def _ordered_families(paths, n):
    """n-tuples of paths with strictly decreasing starting points."""
    by_start = sorted(paths, key=lambda p: -p[0])
    if n == 0:
        yield ()
        return

    def rec(i, chosen):
        if len(chosen) == n:
            yield tuple(chosen)
            return
        for j in range(i, len(by_start)):
            if chosen and by_start[j][0] >= chosen[-1][0]:
                continue
            yield from rec(j + 1, chosen + [by_start[j]])

    yield from rec(0, [])
