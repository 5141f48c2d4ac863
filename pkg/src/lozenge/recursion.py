"""Numerical topological recursion on genus-zero rational curves.

Correlators are coefficients of ``dz_1 ... dz_n``.  Residues at the branchpoints
are trapezoidal sums on circles; a nested evaluation at depth ``d`` uses circles
of radius ``r0 * rho**d`` so that every inner circle excludes the points and
conjugate points of the enclosing levels.

Arrays carry one axis per nesting depth (rank ``MAX_DEPTH``), so that the points
of different levels broadcast into outer products without bookkeeping.  The
bracket of the recursion at a given depth does not depend on the first argument,
only on the remaining ones, and is memoized on the identity of those arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.integrate import quad

from .curves import SpectralCurve
from .rational import RationalFunction

__all__ = [
    "BranchPoint",
    "CorrelatorValue",
    "IrregularCurve",
    "QuadratureError",
    "RecursionEngine",
    "branchpoints",
    "bergman",
    "recursion_kernel",
    "correlator",
    "free_energy",
    "w3_closed_form",
    "default_radius",
    "airy_curve",
]

MAX_DEPTH = 8


class IrregularCurve(ValueError):
    pass


class QuadratureError(RuntimeError):
    pass


@dataclass
class BranchPoint:
    a: complex
    x2: complex  # x''(a)
    y1: complex  # y'(a)
    curve: SpectralCurve

    def conjugate(self, z) -> np.ndarray:
        return conjugate_points(self.curve, self.a, z)


@dataclass
class CorrelatorValue:
    value: complex
    error: float
    n: int
    g: int
    points: tuple


def airy_curve() -> SpectralCurve:
    return SpectralCurve(RationalFunction([0.0, 0.0, 1.0]), RationalFunction([0.0, 1.0]), "airy")


def branchpoints(curve: SpectralCurve, tol: float = 1e-8) -> list[BranchPoint]:
    """Zeros of dx, each checked to be simple with dy != 0 there."""
    dx = curve.x.derivative()
    ddx = dx.derivative()
    dy = curve.y.derivative()
    zs = dx.zeros()
    # discard numerator roots cancelled by the denominator
    dens = curve.x.poles()
    zs = [z for z in zs if all(abs(z - p) > 1e-9 for p in dens)]
    out = []
    for i, a in enumerate(zs):
        for b in zs[i + 1 :]:
            if abs(a - b) < 1e-6 * max(1.0, abs(a)):
                raise IrregularCurve(f"dx has a multiple zero near {a}")
        x2 = complex(ddx(a))
        y1 = complex(dy(a))
        scale = max(1.0, abs(a))
        if abs(x2) < tol * scale:
            raise IrregularCurve(f"dx has a multiple zero at {a}")
        if abs(y1) < tol:
            raise IrregularCurve(f"dy vanishes at the branchpoint {a}")
        out.append(BranchPoint(complex(a), x2, y1, curve))
    if not out:
        raise IrregularCurve("dx has no zeros; no branchpoints")
    return out


def conjugate_points(curve: SpectralCurve, a: complex, z) -> np.ndarray:
    """The point ``w != z`` near the branchpoint with ``x(w) = x(z)``.

    Roots of ``Nx(w) Dx(z) - Nx(z) Dx(w)`` are computed per point, the one closest
    to the local guess ``2a - z`` is kept and polished by Newton steps.
    """
    z = np.asarray(z, dtype=complex)
    flat = z.reshape(-1)
    nx, dxp = curve.x.num, curve.x.den
    out = np.empty_like(flat)
    for i, zi in enumerate(flat):
        poly = P.polysub(nx * P.polyval(zi, dxp), dxp * P.polyval(zi, nx))
        roots = P.polyroots(poly)
        guess = 2 * a - zi
        roots = roots[np.abs(roots - zi) > 1e-3 * abs(zi - a)] if len(roots) > 1 else roots
        if len(roots) == 0:
            raise IrregularCurve(f"no conjugate point for z={zi}")
        out[i] = roots[np.argmin(np.abs(roots - guess))]
    out = _newton_conjugate(curve, flat, out)
    if np.any(np.abs(out - flat) < 0.1 * np.abs(flat - a)):
        raise QuadratureError("conjugation collapsed onto the point itself; circle too large")
    return out.reshape(z.shape)


def _newton_conjugate(curve, z, w, steps=3):
    x, dx = curve.x, curve.x.derivative()
    target = x(z)
    for _ in range(steps):
        w = w - (x(w) - target) / dx(w)
    return w


def bergman(z1, z2):
    """``1/(z1 - z2)^2``, the coefficient of the genus-zero Bergman kernel."""
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    if np.any(z1 == z2):
        raise ValueError("Bergman kernel evaluated at coincident points")
    return 1.0 / (z1 - z2) ** 2


def _kernel(curve, dx, z0, z, zb):
    num = 1.0 / (z0 - zb) - 1.0 / (z0 - z)
    return num / (2 * (curve.y(z) - curve.y(zb)) * dx(z))


def recursion_kernel(z0, z, bp: BranchPoint):
    """``(1/(z0 - zbar) - 1/(z0 - z)) / (2 (y(z) - y(zbar)) x'(z))``.

    The kernel has a simple pole at the branchpoint itself, so ``z = a`` is rejected.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z - bp.a) < 1e-12 * max(1.0, abs(bp.a))):
        raise ValueError("the recursion kernel has a pole at the branchpoint")
    zb = bp.conjugate(z)
    return _kernel(bp.curve, bp.curve.x.derivative(), np.asarray(z0, dtype=complex), z, zb)


def w3_closed_form(curve: SpectralCurve, points) -> complex:
    """``sum_i prod_k (z_k - a_i)^-2 / (x''(a_i) y'(a_i))``."""
    total = 0j
    for bp in branchpoints(curve):
        term = 1 / (bp.x2 * bp.y1)
        for z in points:
            term /= (z - bp.a) ** 2
        total += term
    return total


def _axis_shape(d: int, m: int) -> tuple:
    shape = [1] * MAX_DEPTH
    shape[d] = m
    return tuple(shape)


def _scalar(z) -> np.ndarray:
    return np.full((1,) * MAX_DEPTH, complex(z))


class RecursionEngine:
    """Evaluates W_n^(g) with memoized brackets; one engine per radius choice."""

    def __init__(self, curve: SpectralCurve, r0: float, rho: float = 0.55, nodes: int = 96):
        self.curve = curve
        self.bps = branchpoints(curve)
        if r0 >= _clearance(curve, self.bps):
            raise QuadratureError(f"radius {r0:.3g} encloses a pole or another branchpoint")
        self.dx = curve.x.derivative()
        self.r0 = r0
        self.rho = rho
        self.m = nodes
        self._nodes: dict = {}
        self._brackets: dict = {}

    def nodes(self, i: int, d: int):
        """Quadrature nodes around branchpoint i at depth d: (z, zbar, weight * dzbar/dz)."""
        key = (i, d)
        if key not in self._nodes:
            if d >= MAX_DEPTH:
                raise QuadratureError("recursion deeper than supported")
            a = self.bps[i].a
            r = self.r0 * self.rho**d
            th = 2 * np.pi * (np.arange(self.m) + 0.5) / self.m
            z = a + r * np.exp(1j * th)
            zb = conjugate_points(self.curve, a, z)
            if d > 0:
                _, outer_bar, _ = self.nodes(i, d - 1)
                if r >= 0.9 * np.min(np.abs(outer_bar - a)):
                    raise QuadratureError("inner circle reaches the conjugate points of the enclosing level")
            jac = self.dx(z) / self.dx(zb)
            weight = (z - a) / self.m  # trapezoid rule for (1/2 pi i) * contour integral
            shape = _axis_shape(d, self.m)
            self._nodes[key] = (z.reshape(shape), zb.reshape(shape), (weight * jac).reshape(shape))
        return self._nodes[key]

    def W(self, g: int, n: int, z0, J: tuple, d: int):
        """W_n^(g)(z0, *J); arguments are rank-MAX_DEPTH arrays, residues taken at depth d."""
        if g == 0 and n == 1:
            return -self.curve.y(z0) * self.dx(z0)
        if g == 0 and n == 2:
            return bergman(z0, J[0])
        if 2 - 2 * g - n >= 0 or g < 0 or n < 1:
            raise ValueError(f"W_{n}^({g}) is not defined by the recursion")
        total = 0
        for i in range(len(self.bps)):
            z, zb, wt = self.nodes(i, d)
            br = self._bracket(g, n, J, i, d)
            k = _kernel(self.curve, self.dx, z0, z, zb)
            total = total + np.sum(k * wt * br, axis=d, keepdims=True)
        return total

    def _bracket(self, g, n, J, i, d):
        key = (g, n, i, d) + tuple(id(j) for j in J)
        hit = self._brackets.get(key)
        if hit is not None:
            return hit[1]
        z, zb, _ = self.nodes(i, d)
        inner = d + 1
        out = 0
        if g >= 1:
            out = out + self.W(g - 1, n + 1, z, (zb,) + tuple(J), inner)
        idx = range(len(J))
        for h in range(g + 1):
            for size in range(len(J) + 1):
                for I in combinations(idx, size):
                    if h == 0 and size == 0:
                        continue
                    if h == g and size == len(J):
                        continue
                    rest = tuple(J[k] for k in idx if k not in I)
                    left = self.W(h, size + 1, z, tuple(J[k] for k in I), inner)
                    right = self.W(g - h, len(rest) + 1, zb, rest, inner)
                    out = out + left * right
        self._brackets[key] = (J, out)
        return out

    def correlator(self, n: int, g: int, points) -> complex:
        for p in points:
            if any(abs(complex(p) - bp.a) <= self.r0 for bp in self.bps):
                raise QuadratureError(f"point {p} lies inside a residue circle")
        pts = [_scalar(p) for p in points]
        val = self.W(g, n, pts[0], tuple(pts[1:]), 0)
        return complex(np.asarray(val).reshape(-1)[0])

    def free_energy(self, g: int, basepoint) -> complex:
        """``1/(2-2g) sum_i Res W_1^(g) Phi`` with ``Phi' = y x'`` and ``Phi(basepoint) = 0``."""
        if g < 2:
            raise ValueError("only g >= 2 is defined by the residue formula")
        total = 0j
        for i, bp in enumerate(self.bps):
            z, _, _ = self.nodes(i, 0)
            w1 = self.W(g, 1, z, (), 1)
            phi = _phi(self.curve, basepoint, bp.a, z.reshape(-1)).reshape(z.shape)
            weight = (z - bp.a) / self.m
            total += complex(np.sum(w1 * phi * weight))
        return total / (2 - 2 * g)


def _phi(curve: SpectralCurve, base: complex, a: complex, z: np.ndarray) -> np.ndarray:
    """Antiderivative of y x' from ``base`` to each z, through the branchpoint a."""
    f = curve.y * curve.x.derivative()
    start = _line_integral(f, base, a)
    t, w = np.polynomial.legendre.leggauss(40)
    t = (t + 1) / 2
    w = w / 2
    path = a + np.outer(z - a, t)
    local = (z - a) * np.sum(f(path) * w, axis=1)
    return start + local


def _line_integral(f: RationalFunction, p: complex, q: complex) -> complex:
    """Integral of f along a polyline from p to q that keeps clear of the poles of f."""
    poles = f.poles()
    pts = [complex(p), complex(q)]
    seg = q - p
    if abs(seg) > 0:
        for pole in poles:
            s = ((pole - p) * np.conj(seg)).real / abs(seg) ** 2
            if 0 < s < 1 and abs(p + s * seg - pole) < 0.25 * abs(seg):
                # detour sideways around the pole
                normal = 1j * seg / abs(seg)
                pts = [complex(p), complex(pole + 0.5 * abs(seg) * normal), complex(q)]
                break
    total = 0j
    for u, v in zip(pts[:-1], pts[1:]):
        g = lambda t: complex(f(u + t * (v - u))) * (v - u)
        total += quad(g, 0.0, 1.0, complex_func=True, limit=200, epsabs=1e-14, epsrel=1e-13)[0]
    return total


def _obstacle_distances(curve: SpectralCurve, bps) -> list[float]:
    obstacles = list(curve.x.poles()) + list(curve.y.reduced().poles()) + list(curve.x.derivative().zeros())
    return [abs(o - b.a) for b in bps for o in obstacles if abs(o - b.a) > 1e-9]


def _clearance(curve: SpectralCurve, bps) -> float:
    """Largest radius whose circles around the branchpoints enclose nothing else."""
    dists = _obstacle_distances(curve, bps)
    return min(dists) if dists else math.inf


def default_radius(curve: SpectralCurve, points=(), fraction: float = 0.5) -> float:
    """A circle radius safely inside the conjugation neighbourhood of every branchpoint."""
    bps = branchpoints(curve)
    dists = _obstacle_distances(curve, bps) + [abs(complex(p) - b.a) for b in bps for p in points]
    if not dists:
        return 0.5
    return fraction * min(dists)


def correlator(curve: SpectralCurve, n: int, g: int, points, nodes: int = 96, rho: float = 0.55,
               radius: float | None = None, tol: float = 1e-8, verify: bool = True) -> CorrelatorValue:
    """W_n^(g) at the given points, with a second radius as a quadrature check."""
    if len(points) != n:
        raise ValueError(f"need {n} points, got {len(points)}")
    r0 = default_radius(curve, points) if radius is None else radius
    v1 = RecursionEngine(curve, r0, rho, nodes).correlator(n, g, points)
    err = 0.0
    if verify and not (g == 0 and n <= 2):
        v2 = RecursionEngine(curve, 0.7 * r0, rho, nodes).correlator(n, g, points)
        err = abs(v1 - v2)
        if err > tol * max(1.0, abs(v1)):
            raise QuadratureError(f"radius check failed: {v1} vs {v2}")
    return CorrelatorValue(v1, err, n, g, tuple(points))


def free_energy(curve: SpectralCurve, g: int, nodes: int = 128, rho: float = 0.55, basepoint=None,
                second_basepoint=None, tol: float = 1e-8, radius: float | None = None) -> CorrelatorValue:
    """F_g for g >= 2, recomputed from a second basepoint to confirm independence."""
    bps = branchpoints(curve)
    r0 = default_radius(curve, fraction=0.55) if radius is None else radius
    eng = RecursionEngine(curve, r0, rho, nodes)
    b1 = bps[0].a + 0.5 * r0 if basepoint is None else complex(basepoint)
    b2 = bps[0].a + 0.5j * r0 + 0.3 * r0 if second_basepoint is None else complex(second_basepoint)
    f1 = eng.free_energy(g, b1)
    f2 = eng.free_energy(g, b2)
    err = abs(f1 - f2)
    if err > tol * max(1.0, abs(f1)):
        raise QuadratureError(f"free energy depends on the basepoint: {f1} vs {f2}")
    return CorrelatorValue(f1, err, 0, g, ())
