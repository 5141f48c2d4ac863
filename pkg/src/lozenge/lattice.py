"""Rhombus-lattice domains for non-intersecting jumping particles.

Positions live on the half-integer grid: a cell ``(h, t)`` is valid when
``h - t/2`` is an integer.  Everything here stores ``2h`` as a plain ``int``
(the "twice value"), so the parity test is ``(twice_h - t) % 2 == 0`` and no
floating point ever touches the grid.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping

__all__ = [
    "Partition",
    "HalfInt",
    "RhombusDomain",
    "DefectGeometry",
    "DomainError",
    "build_from_boundaries",
    "build_hexagon",
    "defect_geometry",
    "max_domain",
    "accessible_cells",
    "shadow",
    "intervals",
]


class DomainError(ValueError):
    """Raised for malformed or infeasible domains."""


@dataclass(frozen=True)
class Partition:
    """A weakly decreasing sequence of nonnegative integers, seen with ``n`` particles."""

    parts: tuple[int, ...]
    n: int

    def __init__(self, parts: Iterable[int] = (), n: int | None = None):
        p = tuple(int(x) for x in parts)
        while p and p[-1] == 0:
            p = p[:-1]
        if any(x < 0 for x in p):
            raise DomainError(f"negative part in {p}")
        if any(p[i] < p[i + 1] for i in range(len(p) - 1)):
            raise DomainError(f"parts not weakly decreasing: {p}")
        if n is None:
            n = len(p)
        if len(p) > n:
            raise DomainError(f"{len(p)} nonzero parts but only n={n} particles")
        object.__setattr__(self, "parts", p)
        object.__setattr__(self, "n", int(n))

    def __len__(self) -> int:
        return len(self.parts)

    def padded(self) -> tuple[int, ...]:
        return self.parts + (0,) * (self.n - len(self.parts))

    @property
    def size(self) -> int:
        return sum(self.parts)

    def h_coordinates(self) -> tuple[int, ...]:
        """``h_i = parts_i - i + n`` for i = 1..n (strictly decreasing, >= 0)."""
        return tuple(p - i + self.n for i, p in enumerate(self.padded(), start=1))

    def content_count(self, t: int) -> int:
        """Number of cells (row i, column j) of the diagram with ``j - i == t``."""
        return sum(1 for i, p in enumerate(self.parts, start=1) if i + t >= 1 and i + t <= p)


@dataclass(frozen=True, order=True)
class HalfInt:
    """An exact element of (1/2)Z stored as twice its value."""

    twice_value: int

    @classmethod
    def of(cls, value) -> "HalfInt":
        v = Fraction(value) * 2
        if v.denominator != 1:
            raise ValueError(f"{value} is not a half-integer")
        return cls(int(v))

    @property
    def value(self) -> Fraction:
        return Fraction(self.twice_value, 2)

    def on_slice(self, t: int) -> bool:
        return (self.twice_value - t) % 2 == 0

    def __add__(self, other: "HalfInt") -> "HalfInt":
        return HalfInt(self.twice_value + other.twice_value)

    def __sub__(self, other: "HalfInt") -> "HalfInt":
        return HalfInt(self.twice_value - other.twice_value)

    def __str__(self) -> str:
        v = self.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/2"


def intervals(positions: Iterable[int]) -> list[tuple[int, int]]:
    """Maximal runs of adjacent positions (twice values step by 2), in increasing order."""
    out: list[tuple[int, int]] = []
    for p in sorted(positions):
        if out and p == out[-1][1] + 2:
            out[-1] = (out[-1][0], p)
        else:
            out.append((p, p))
    return out


@dataclass(frozen=True)
class RhombusDomain:
    """Allowed cells per time slice plus jump weights and constraints.

    ``alpha[t]`` / ``beta[t]`` weight an up (``h -> h + 1/2``) / down jump between
    ``t`` and ``t + 1``; missing entries mean weight 1.  ``obliged`` holds
    ``(twice_h, t)`` cells that some particle must visit.  ``filling`` maps
    ``(t, interval_index)`` to a particle count, intervals indexed in increasing h.
    """

    t_min: int
    t_max: int
    slices: Mapping[int, tuple[int, ...]]
    n_particles: int
    alpha: Mapping[int, Fraction] = field(default_factory=dict)
    beta: Mapping[int, Fraction] = field(default_factory=dict)
    obliged: frozenset = frozenset()
    filling: Mapping[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        if self.t_max < self.t_min:
            raise DomainError(f"t_max={self.t_max} < t_min={self.t_min}")
        sl = {}
        for t in range(self.t_min, self.t_max + 1):
            pos = tuple(sorted(set(int(p) for p in self.slices.get(t, ()))))
            bad = [p for p in pos if (p - t) % 2]
            if bad:
                raise DomainError(f"parity violation at t={t}: twice-h {bad[0]} has h - t/2 not integer")
            if len(pos) < self.n_particles:
                raise DomainError(
                    f"infeasible slice t={t}: {len(pos)} positions < N={self.n_particles}"
                )
            sl[t] = pos
        extra = set(self.slices) - set(sl)
        if extra:
            raise DomainError(f"slices outside [t_min, t_max]: {sorted(extra)}")
        object.__setattr__(self, "slices", sl)
        object.__setattr__(self, "alpha", {int(k): Fraction(v) for k, v in self.alpha.items()})
        object.__setattr__(self, "beta", {int(k): Fraction(v) for k, v in self.beta.items()})
        object.__setattr__(self, "obliged", frozenset((int(h), int(t)) for h, t in self.obliged))
        object.__setattr__(self, "filling", {(int(t), int(i)): int(c) for (t, i), c in self.filling.items()})
        for h, t in self.obliged:
            if t not in sl or h not in set(sl[t]):
                raise DomainError(f"obliged cell (2h={h}, t={t}) is not in the domain")
        by_time: dict[int, dict[int, int]] = {}
        for (t, i), c in self.filling.items():
            if t not in sl:
                raise DomainError(f"filling given at t={t} outside the time window")
            by_time.setdefault(t, {})[i] = c
        for t, counts in by_time.items():
            m = len(intervals(sl[t]))
            if set(counts) != set(range(m)):
                raise DomainError(f"filling at t={t} must list all {m} intervals")
            if sum(counts.values()) != self.n_particles:
                raise DomainError(f"filling at t={t} sums to {sum(counts.values())}, not N={self.n_particles}")

    @property
    def times(self) -> range:
        return range(self.t_min, self.t_max + 1)

    def weight_up(self, t: int) -> Fraction:
        return self.alpha.get(t, Fraction(1))

    def weight_down(self, t: int) -> Fraction:
        return self.beta.get(t, Fraction(1))

    def cells(self) -> set[tuple[int, int]]:
        return {(h, t) for t, pos in self.slices.items() for h in pos}

    def with_slices(self, slices: Mapping[int, Iterable[int]]) -> "RhombusDomain":
        return RhombusDomain(
            self.t_min, self.t_max, {t: tuple(p) for t, p in slices.items()}, self.n_particles,
            self.alpha, self.beta, self.obliged, self.filling,
        )

    def without_cells(self, cells: Iterable[tuple[int, int]]) -> "RhombusDomain":
        drop = set(cells)
        return self.with_slices({t: [h for h in pos if (h, t) not in drop] for t, pos in self.slices.items()})

    def reflected(self) -> "RhombusDomain":
        """Time reversal ``t -> -t``; up and down jump weights trade places."""
        sl = {-t: pos for t, pos in self.slices.items()}
        # the step t -> t+1 becomes -t-1 -> -t; an up jump there was a down jump here
        alpha = {-t - 1: w for t, w in self.beta.items()}
        beta = {-t - 1: w for t, w in self.alpha.items()}
        obliged = {(h, -t) for h, t in self.obliged}
        filling = {(-t, i): c for (t, i), c in self.filling.items()}
        return RhombusDomain(-self.t_max, -self.t_min, sl, self.n_particles, alpha, beta, obliged, filling)

    def pinned(self, t: int) -> bool:
        return len(self.slices[t]) == self.n_particles


def _check_partition_fits(p: Partition, n: int, name: str) -> None:
    if len(p.parts) > n:
        raise DomainError(f"{name} has {len(p.parts)} parts, more than {n}")


def build_from_boundaries(
    mu: Partition, nu: Partition, lam: Partition, N_l: int, N_mu: int, N_nu: int
) -> RhombusDomain:
    """Domain of plane partitions with boundary partitions ``(lam, mu, nu)``.

    Endpoints are pinned at ``h_i(-N_mu) = mu_i - i + N_l + N_mu/2`` and
    ``h_i(N_nu) = nu_i - i + N_l + N_nu/2``; in between every cell of the maximal
    hexagon with ``h >= |t|/2 + r_t(lam)`` is allowed, where ``r_t(lam)`` counts
    cells of ``lam`` on the diagonal ``column - row == t``.
    """
    if min(N_l, N_mu, N_nu) < 0:
        raise DomainError("box dimensions must be nonnegative")
    _check_partition_fits(mu, N_l, "mu")
    _check_partition_fits(nu, N_l, "nu")
    if lam.parts and (len(lam.parts) > N_mu or lam.parts[0] > N_nu):
        raise DomainError(f"lambda {lam.parts} does not fit in the {N_mu} x {N_nu} floor")
    N = N_l
    mu_p = Partition(mu.parts, N).padded()
    nu_p = Partition(nu.parts, N).padded()
    start = [2 * (m - i + N) + N_mu for i, m in enumerate(mu_p, start=1)]
    end = [2 * (v - i + N) + N_nu for i, v in enumerate(nu_p, start=1)]
    t0, t1 = -N_mu, N_nu
    slices: dict[int, tuple[int, ...]] = {t0: tuple(sorted(start)), t1: tuple(sorted(end))}
    if N == 0:
        slices = {t: () for t in range(t0, t1 + 1)}
        return RhombusDomain(t0, t1, slices, 0)
    for t in range(t0 + 1, t1):
        lo, hi = _hexagon_bounds(min(start), max(start), min(end), max(end), t0, t1, t)
        floor = abs(t) + 2 * lam.content_count(t)
        lo = max(lo, floor)
        slices[t] = tuple(h for h in range(lo, hi + 1) if (h - t) % 2 == 0)
    for t in (t0, t1):
        floor = abs(t) + 2 * lam.content_count(t)
        if slices[t] and min(slices[t]) < floor:
            raise DomainError(f"endpoint slice at t={t} lies below the floor")
    return RhombusDomain(t0, t1, slices, N)


def _hexagon_bounds(lo0: int, hi0: int, lo1: int, hi1: int, t0: int, t1: int, t: int) -> tuple[int, int]:
    """Twice-h bounds of the six-inequality hexagon at time t."""
    lo = max(lo0 - (t - t0), lo1 - (t1 - t))
    hi = min(hi0 + (t - t0), hi1 + (t1 - t))
    return lo, hi


def build_hexagon(a_steps: int, b_steps, T: int) -> RhombusDomain:
    """Hexagon of half-width ``T`` with ``N = b_steps * T`` particles.

    Particles start at ``h = 1..N`` at ``t = -T`` and end at ``h = a_steps + 1 .. a_steps + N``
    at ``t = T`` (both shifted by 1/2 when T is odd to respect parity).  ``a_steps`` is the
    lattice shift ``T * a`` of the continuum hexagon with side a, so ``0 < a_steps < T``.
    """
    b = Fraction(b_steps)
    if T <= 0 or b <= 0 or a_steps <= 0:
        raise DomainError(f"nonpositive hexagon dimension (a_steps={a_steps}, b={b}, T={T})")
    if a_steps >= T:
        raise DomainError(f"a_steps={a_steps} >= T={T} leaves a side of zero length")
    Nf = b * T
    if Nf.denominator != 1:
        raise DomainError(f"b*T = {Nf} is not an integer")
    N = int(Nf)
    par = T % 2
    start = [2 * i + par for i in range(1, N + 1)]
    end = [2 * (a_steps + i) + par for i in range(1, N + 1)]
    slices = {-T: tuple(start), T: tuple(end)}
    for t in range(-T + 1, T):
        lo, hi = _hexagon_bounds(start[0], start[-1], end[0], end[-1], -T, T, t)
        slices[t] = tuple(h for h in range(lo, hi + 1) if (h - t) % 2 == 0)
    return RhombusDomain(-T, T, slices, N)


def max_domain(domain: RhombusDomain) -> set[tuple[int, int]]:
    """Cells of the maximal hexagon spanned by the extremal positions at t_min and t_max."""
    s0, s1 = domain.slices[domain.t_min], domain.slices[domain.t_max]
    if not s0 or not s1:
        return set()
    cells = set()
    for t in domain.times:
        lo, hi = _hexagon_bounds(s0[0], s0[-1], s1[0], s1[-1], domain.t_min, domain.t_max, t)
        if t == domain.t_min:
            lo, hi = s0[0], s0[-1]
        if t == domain.t_max:
            lo, hi = s1[0], s1[-1]
        cells.update((h, t) for h in range(lo, hi + 1) if (h - t) % 2 == 0)
    return cells


def accessible_cells(t_min: int, t_max: int, allowed: set[tuple[int, int]]) -> set[tuple[int, int]]:
    """Cells lying on some slope +-1/2 path from t_min to t_max inside ``allowed``."""
    by_t: dict[int, set[int]] = {t: set() for t in range(t_min, t_max + 1)}
    for h, t in allowed:
        if t_min <= t <= t_max:
            by_t[t].add(h)
    fwd = {t_min: set(by_t[t_min])}
    for t in range(t_min + 1, t_max + 1):
        prev = fwd[t - 1]
        fwd[t] = {h for h in by_t[t] if h - 1 in prev or h + 1 in prev}
    bwd = {t_max: set(by_t[t_max])}
    for t in range(t_max - 1, t_min - 1, -1):
        nxt = bwd[t + 1]
        bwd[t] = {h for h in by_t[t] if h - 1 in nxt or h + 1 in nxt}
    return {(h, t) for t in by_t for h in fwd[t] & bwd[t]}


def shadow(domain: RhombusDomain, defect: Iterable[tuple[int, int]], maximal=None) -> set[tuple[int, int]]:
    """Cells of the maximal domain unreachable once ``defect`` is removed from it."""
    mx = max_domain(domain) if maximal is None else maximal
    live = mx - set(defect)
    return mx - accessible_cells(domain.t_min, domain.t_max, live)


@dataclass(frozen=True)
class DefectGeometry:
    defect: frozenset
    shadow: frozenset
    minimal_defect: frozenset
    marked_times: tuple[int, ...]


def defect_geometry(domain: RhombusDomain) -> DefectGeometry:
    mx = max_domain(domain)
    defect = mx - domain.cells()
    shade = shadow(domain, defect, mx)
    minimal = set(defect)
    changed = True
    while changed:
        changed = False
        for cell in sorted(minimal, key=lambda c: (c[1], c[0])):
            trial = minimal - {cell}
            if shadow(domain, trial, mx) == shade:
                minimal = trial
                changed = True
    marked = {domain.t_min, domain.t_max} | {t for _, t in minimal}
    return DefectGeometry(frozenset(defect), frozenset(shade), frozenset(minimal), tuple(sorted(marked)))


def exhaustive_minimal_defects(domain: RhombusDomain) -> list[frozenset]:
    """All smallest-cardinality subsets of the defect with the same shadow (small defects only)."""
    mx = max_domain(domain)
    defect = sorted(mx - domain.cells())
    if len(defect) > 16:
        raise DomainError("exhaustive search limited to 16 defect cells")
    target = shadow(domain, defect, mx)
    for k in range(len(defect) + 1):
        hits = [frozenset(c) for c in combinations(defect, k) if shadow(domain, c, mx) == target]
        if hits:
            return hits
    return []
