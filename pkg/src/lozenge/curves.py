"""Genus-zero spectral curves of the worked domains and their envelopes.

A time-dependent curve is ``x(z, tau) = u(z) + tau v(z)`` (classical) or
``x(z, tau) = qq^(tau/2) u(z) + qq^(-tau/2) v(z)`` (quantum, with ``x`` the
exponentiated position ``qq^X``).  The arctic curve is traced by the real
critical points ``dx/dz = 0`` parametrized by ``z``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .rational import RationalFunction

__all__ = [
    "Side",
    "SpectralCurve",
    "RationalSpectralCurve",
    "EnvelopeArc",
    "Envelope",
    "Contact",
    "AiryBlowup",
    "PearceyBlowup",
    "CurveError",
    "qnum",
    "solve_hexagon_classical",
    "solve_hexagon_quantum",
    "solve_cardioid",
    "solve_trapezoid",
    "hexagon_sides",
    "trapezoid_sides",
    "hexagon_quantum_closed_form",
    "cardioid_parametric",
    "trapezoid_closed_form",
    "pole_residue",
    "envelope",
    "tangency_report",
    "convexity_check",
    "blowup_airy",
    "blowup_pearcey",
]


class CurveError(ValueError):
    pass


@dataclass(frozen=True)
class Side:
    """Straight boundary segment from ``(tau_a, x_a)`` to ``(tau_b, x_b)``."""

    name: str
    tau_a: float
    x_a: float
    tau_b: float
    x_b: float

    @property
    def vertical(self) -> bool:
        return self.tau_a == self.tau_b

    @property
    def slope(self) -> float:
        return (self.x_b - self.x_a) / (self.tau_b - self.tau_a)

    def x_at(self, tau: float) -> float:
        return self.x_a + self.slope * (tau - self.tau_a)


@dataclass
class SpectralCurve:
    """A fixed curve ``(x(z), y(z))`` on the Riemann sphere."""

    x: RationalFunction
    y: RationalFunction
    name: str = ""

    def scaled(self, lam: complex) -> "SpectralCurve":
        return SpectralCurve(self.x, self.y * lam, f"{self.name}*{lam}")

    def shifted(self, R) -> "SpectralCurve":
        """``y -> y + R(x)`` for a callable building a RationalFunction from x."""
        return SpectralCurve(self.x, self.y + R(self.x), f"{self.name}+R(x)")


def qnum(tau, qq):
    """Normalized q-number ``(qq^(-tau/2) - qq^(tau/2)) / (qq^(-1/2) - qq^(1/2))``."""
    return (qq ** (-tau / 2) - qq ** (tau / 2)) / (qq ** (-0.5) - qq**0.5)


@dataclass
class RationalSpectralCurve:
    u: RationalFunction
    v: RationalFunction
    family: str = "classical"
    qq: float | None = None
    marked_times: tuple = (-1.0, 1.0)
    y: RationalFunction | None = None
    params: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    sides: tuple = ()
    name: str = ""

    def __post_init__(self):
        if self.family not in ("classical", "quantum"):
            raise CurveError(f"unknown family {self.family!r}")
        if self.family == "quantum":
            if self.qq is None or self.qq <= 0 or self.qq == 1:
                raise CurveError("quantum curves need qq > 0, qq != 1")
        self._du = self.u.derivative()
        self._dv = self.v.derivative()
        self._ddu = self._du.derivative()
        self._ddv = self._dv.derivative()

    @property
    def t_range(self) -> tuple[float, float]:
        return float(min(self.marked_times)), float(max(self.marked_times))

    def _coef(self, tau):
        if self.family == "classical":
            return 1.0, tau
        return self.qq ** (tau / 2), self.qq ** (-tau / 2)

    def x(self, z, tau):
        a, b = self._coef(tau)
        return a * self.u(z) + b * self.v(z)

    def dxdz(self, z, tau):
        a, b = self._coef(tau)
        return a * self._du(z) + b * self._dv(z)

    def d2xdz2(self, z, tau):
        a, b = self._coef(tau)
        return a * self._ddu(z) + b * self._ddv(z)

    def x_at(self, tau) -> RationalFunction:
        a, b = self._coef(tau)
        return self.u * a + self.v * b

    def position(self, z, tau):
        """Rescaled position X: x itself (classical) or ``log x / log qq`` (quantum)."""
        xv = self.x(z, tau)
        if self.family == "classical":
            return xv
        return np.log(xv) / math.log(self.qq)

    def critical_time(self, z):
        """tau at which z is a critical point of x(., tau)."""
        if self.family == "classical":
            return -self._du(z) / self._dv(z)
        return np.log(-self._dv(z) / self._du(z)) / math.log(self.qq)

    def envelope_slope(self, z):
        """dX_c/dtau along the envelope, equal to the partial tau-derivative at fixed z."""
        tau = self.critical_time(z)
        if self.family == "classical":
            return self.v(z)
        a, b = self._coef(tau)
        return 0.5 * (a * self.u(z) - b * self.v(z)) / (a * self.u(z) + b * self.v(z))

    def at_time(self, tau) -> SpectralCurve:
        if self.y is None:
            raise CurveError("this curve carries no y function")
        return SpectralCurve(self.x_at(tau), self.y, f"{self.name}@{tau}")

    def breakpoints(self) -> np.ndarray:
        """Real points where u, v have poles or the critical-time map degenerates."""
        pts = list(self.u.poles()) + list(self.v.poles()) + list(self._dv.zeros())
        if self.family == "quantum":
            pts += list(self._du.zeros())
        pts = [p.real for p in pts if abs(p.imag) < 1e-9 * max(1.0, abs(p))]
        return np.unique(np.round(pts, 14))


# ---------------------------------------------------------------- worked curves


def hexagon_sides(a: float, b: float) -> tuple[Side, ...]:
    """The six sides in rescaled (tau, x) coordinates, tau in [-1, 1]."""
    return (
        Side("start", -1.0, 0.0, -1.0, b),
        Side("lower-left", -1.0, 0.0, -a, -(1 - a) / 2),
        Side("lower-right", -a, -(1 - a) / 2, 1.0, a),
        Side("end", 1.0, a, 1.0, a + b),
        Side("upper-right", a, b + (1 + a) / 2, 1.0, a + b),
        Side("upper-left", -1.0, b, a, b + (1 + a) / 2),
    )


def trapezoid_sides() -> tuple[Side, ...]:
    return (
        Side("start", 0.0, 0.0, 0.0, 2.0),
        Side("left", 0.0, 0.0, 1.0, 0.5),
        Side("end", 1.0, 0.5, 1.0, 1.5),
        Side("right", 0.0, 2.0, 1.0, 1.5),
    )


def solve_hexagon_classical(a: float, b: float) -> RationalSpectralCurve:
    """Curve of the a x b hexagon: ``x = c + r tau + gamma((1 - tau) z + (1 + tau)/z)``."""
    if not (0 < a < 1) or b <= 0:
        raise CurveError(f"need 0 < a < 1 and b > 0 (got a={a}, b={b}); gamma^2 <= 0 otherwise")
    c = (a + b) / 2
    r = a * (1 + b) / 2
    g2 = (1 - a) * (1 + a) * b * (b + 2) / 16
    gamma = math.sqrt(g2)
    u = RationalFunction.laurent({0: c, 1: gamma, -1: gamma})
    v = RationalFunction.laurent({0: r, 1: -gamma, -1: gamma})
    y = (1 - 2 * v) / (1 + 2 * v)
    curve = RationalSpectralCurve(
        u, v, "classical", None, (-1.0, 1.0), y, {"a": a, "b": b, "c": c, "r": r, "gamma": gamma},
        sides=hexagon_sides(a, b), name="hexagon",
    )
    curve.residuals.update(_hexagon_conditions(curve, a, b))
    return curve


def _solve_v(curve, target):
    """Real roots of v(z) = target."""
    num = np.polynomial.polynomial.polysub(curve.v.num, target * curve.v.den)
    roots = np.polynomial.polynomial.polyroots(num) if len(num) > 1 else []
    return [z.real for z in roots if abs(z.imag) < 1e-9]


def _hexagon_conditions(curve, a, b) -> dict[str, float]:
    """Residuals of the four side-contact conditions at tau = -1 and +1."""
    out = {}
    checks = [(-1, -0.5, 0.0), (-1, 0.5, b), (1, 0.5, a), (1, -0.5, a + b)]
    for k, (tau, vt, xt) in enumerate(checks):
        zs = _solve_v(curve, vt)
        out[f"contact{k}"] = min(abs(complex(curve.x(z, tau)) - xt) for z in zs) if zs else math.inf
    return out


def solve_hexagon_quantum(a: float, b: float, qq: float) -> RationalSpectralCurve:
    """Quantum hexagon ``x = [1-tau]/[2] (c + z) + [1+tau]/[2] (r + d/z)`` in exponentiated coordinates."""
    if qq <= 0:
        raise CurveError("qq must be positive")
    if qq == 1:
        raise CurveError("qq = 1 is the classical curve; use solve_hexagon_classical")
    if not (0 < a < 1) or b <= 0:
        raise CurveError(f"need 0 < a < 1 and b > 0 (got a={a}, b={b})")
    q = qq
    den = q**-1 - q
    c = (q**-1 + q ** (a + b) - q**a - q ** (b + 1)) / den
    r = -(1 + q ** (a + b + 1) - q ** (a - 1) - q**b) / den
    d = (1 - q**b) * (q**a - q) * (q**a - q**-1) * (q ** (b + 1) - q**-1) / den**2
    # [1 -+ tau] split into qq^(+-tau/2) parts
    D = (q**-0.5 - q**0.5) * qnum(2, q)
    left = RationalFunction.laurent({0: c, 1: 1.0})
    right = RationalFunction.laurent({0: r, -1: d})
    u = (left * q**-0.5 - right * q**0.5) / D
    v = (right * q**-0.5 - left * q**0.5) / D
    curve = RationalSpectralCurve(
        u, v, "quantum", q, (-1.0, 1.0), None, {"a": a, "b": b, "c": c, "r": r, "d": d},
        sides=hexagon_sides(a, b), name="quantum-hexagon",
    )
    # the four tangency conditions: x0 = c + z, x1 = r + d/z
    conds = [(1.0, q**-1), (q**b, q ** (b + 1))]
    res = {}
    for k, (x0t, x1t) in enumerate(conds):
        z = x0t - c
        res[f"contact{k}"] = abs(r + d / z - x1t)
    for k, (x1t, x0t) in enumerate([(q**a, q ** (a - 1)), (q ** (a + b), q ** (a + b + 1))], start=2):
        z = d / (x1t - r)
        res[f"contact{k}"] = abs(c + z - x0t)
    curve.residuals.update(res)
    return curve


def hexagon_quantum_closed_form(curve: RationalSpectralCurve, tau, sign: int):
    """Closed-form envelope position X_c(tau) for the quantum hexagon."""
    p, q = curve.params, curve.qq
    m, pl = qnum(1 - tau, q), qnum(1 + tau, q)
    xc = (m * p["c"] + pl * p["r"] + sign * 2 * np.sqrt(p["d"] * pl * m)) / qnum(2, q)
    return np.log(xc) / math.log(q)


def solve_cardioid(a: float, b: float, tol: float = 1e-9) -> RationalSpectralCurve:
    """Three-pole symmetric curve; the root w of the quadratic is selected by the consistency identity."""
    if not (0 < a < 1) or b <= 0:
        raise CurveError(f"need 0 < a < 1 and b > 0 (got a={a}, b={b})")
    roots = np.roots([3.0, -(2 * a + 2 * b - 1), b * (a - 1)]).real
    candidates = []
    for w in sorted(roots):
        gamma = 2 * w * (b + 1 - w) * (a - w)
        gamma2 = 2 * (w + 1) * (b - w) * (a - w - 1)
        s = -(2 * w + 1) * (2 * b + 1 - 2 * w) * (2 * a - 1 - 2 * w) / 2
        ident = abs(3 * w - (a + b - 0.5 + 2 * gamma + s))
        if ident > tol or abs(gamma - gamma2) > tol:
            continue
        base = a + b - 0.5 - 2 * w
        # tau = 0 crossings of the envelope must sit inside the tau = 0 slice [a - 1/2, b + 1/2]
        inside = all(a - 0.5 - tol <= xx <= b + 0.5 + tol for xx in (base, base + 2 * gamma))
        candidates.append((not inside, w, gamma, gamma2, s, ident))
    if not candidates:
        raise CurveError(f"no root of the cardioid quadratic passes the consistency identity at a={a}, b={b}")
    candidates.sort()
    bad, w, gamma, gamma2, s, ident = candidates[0]
    if bad:
        raise CurveError(f"no root places the envelope inside the domain at a={a}, b={b}")
    base = a + b - 0.5 - 2 * w
    u = RationalFunction.simple_poles(base, {1.0: -gamma, -1.0: gamma})
    v = RationalFunction.simple_poles(0.0, {1.0: gamma, -1.0: gamma, 0.0: s})
    curve = RationalSpectralCurve(
        u, v, "classical", None, (-1.0, 0.0, 1.0), (1 - 2 * v) / (1 + 2 * v),
        {"a": a, "b": b, "w": w, "gamma": gamma, "s": s, "base": base}, name="cardioid",
    )
    curve.residuals.update({"identity": ident, "gamma_forms": abs(gamma - gamma2),
                            "quadratic": abs(3 * w * w - w * (2 * a + 2 * b - 1) + b * (a - 1))})
    return curve


def cardioid_parametric(curve: RationalSpectralCurve, z):
    """Closed-form (tau(z), X_c(z)) of the cardioid envelope."""
    p = curve.params
    e = p["s"] / (2 * p["gamma"])
    z = np.asarray(z, dtype=float)
    z2 = z * z
    den = z2 * (1 + z2) + e * (z2 - 1) ** 2
    tau = 2 * z**3 / den
    xc = p["base"] + 2 * p["gamma"] * (z2 + e * (1 + z2)) / den
    return tau, xc


def solve_trapezoid(alpha: float) -> RationalSpectralCurve:
    """``x(z, t) = 1 + (t/2)(alpha-1)/(alpha+1) - alpha z/(alpha+1)^2 - (1-t)/z`` for t in [0, 1]."""
    if alpha <= 0:
        raise CurveError("alpha must be positive")
    k = (alpha - 1) / (alpha + 1)
    u = RationalFunction.laurent({0: 1.0, 1: -alpha / (alpha + 1) ** 2, -1: -1.0})
    v = RationalFunction.laurent({0: k / 2, -1: 1.0})
    y = RationalFunction([-1 - alpha, 1.0], [1 + 1 / alpha, 1.0])
    return RationalSpectralCurve(
        u, v, "classical", None, (0.0, 1.0), y, {"alpha": alpha, "k": k}, sides=trapezoid_sides(), name="trapezoid"
    )


def trapezoid_closed_form(alpha: float, t, sign: int):
    return 1 + t / 2 * (alpha - 1) / (alpha + 1) + sign * 2 / (alpha + 1) * np.sqrt((1 - t) * alpha)


# ---------------------------------------------------------------- envelope


@dataclass
class EnvelopeArc:
    z: np.ndarray
    tau: np.ndarray
    x: np.ndarray
    label: str
    mapped_t: np.ndarray | None = None  # qq^tau (quantum only)
    mapped_x: np.ndarray | None = None  # qq^X_c (quantum only)


@dataclass
class Envelope:
    curve: RationalSpectralCurve
    arcs: list
    cusp_times: tuple
    max_residual: float

    def points(self):
        for arc in self.arcs:
            yield from zip(arc.tau, arc.x)


def _theta_nodes(lo: float, hi: float, n: int) -> np.ndarray:
    k = np.arange(1, n + 1)
    return lo + (hi - lo) * (1 - np.cos(np.pi * k / (n + 1))) / 2


def envelope(curve: RationalSpectralCurve, samples: int = 400, max_gap: float = 0.02, refine_passes: int = 6,
             min_separation: float = 1e-6) -> Envelope:
    """Parametric arcs ``(tau(z), X_c(z))`` over the real z-line.

    Each interval between real breakpoints is sampled with nodes clustered toward
    its ends (in the angle ``arctan z``) and then bisected wherever consecutive
    points are more than ``max_gap`` apart.  Points outside the curve's time range
    are dropped.
    """
    t0, t1 = curve.t_range
    cuts = [math.atan(p) for p in curve.breakpoints()]
    edges = sorted(set([-math.pi / 2] + cuts + [math.pi / 2]))
    arcs = []
    worst = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi - lo < 2 * min_separation:
            continue
        th = _theta_nodes(lo + min_separation, hi - min_separation, samples)
        for _ in range(refine_passes + 1):
            tau, xc, ok = _eval_theta(curve, th, t0, t1)
            if not ok.any():
                break
            gaps = np.hypot(np.diff(tau), np.diff(xc))
            need = ok[:-1] & ok[1:] & (gaps > max_gap)
            if not need.any():
                break
            mids = (th[:-1][need] + th[1:][need]) / 2
            th = np.sort(np.concatenate([th, mids]))
        tau, xc, ok = _eval_theta(curve, th, t0, t1)
        for run in _runs(ok):
            th_run = _extend_to_range(curve, th, tau, ok, run, t0, t1)
            zz = np.tan(th_run)
            tt, xx, _ = _eval_theta(curve, th_run, t0 - 1e-9, t1 + 1e-9)
            worst = max(worst, float(_critical_residual(curve, zz, tt).max()))
            label = "+" if zz[len(zz) // 2] > 0 else "-"
            arc = EnvelopeArc(zz, tt, xx, label)
            if curve.family == "quantum":
                arc.mapped_t = curve.qq**tt
                arc.mapped_x = curve.qq**xx
            arcs.append(arc)
    return Envelope(curve, arcs, tuple(curve.marked_times), worst)


def _eval_theta(curve, th, t0, t1, tol=1e-12):
    z = np.tan(th).astype(complex)
    with np.errstate(all="ignore"):
        tau = curve.critical_time(z)
        xc = curve.position(z, tau)
    ok = np.isfinite(tau) & np.isfinite(xc) & (np.abs(np.imag(tau)) < 1e-12) & (np.abs(np.imag(xc)) < 1e-9)
    tau, xc = np.real(tau), np.real(xc)
    ok &= (tau >= t0 - tol) & (tau <= t1 + tol)
    return tau, xc, ok


def _critical_residual(curve, z, tau):
    """|dx/dz| relative to the size of its two terms."""
    z = np.asarray(z, dtype=complex)
    a, b = curve._coef(tau)
    du, dv = a * curve._du(z), b * curve._dv(z)
    return np.abs(du + dv) / np.maximum(np.abs(du) + np.abs(dv), 1e-300)


def _extend_to_range(curve, th, tau, ok, run, t0, t1):
    """Append the exact points where an arc leaves the time window, when it does so inside an interval."""
    pts = list(th[run])
    for inner, outer in ((run[0], run[0] - 1), (run[-1], run[-1] + 1)):
        if outer < 0 or outer >= len(th) or not np.isfinite(tau[outer]):
            continue
        bound = t0 if tau[outer] < t0 else t1 if tau[outer] > t1 else None
        if bound is None:
            continue
        f = lambda t: float(np.real(curve.critical_time(complex(math.tan(t))))) - bound
        try:
            root = brentq(f, th[inner], th[outer], xtol=1e-15)
        except ValueError:
            continue
        pts.append(root)
    return np.array(sorted(pts))


def _runs(mask: np.ndarray):
    idx = np.flatnonzero(mask)
    if len(idx) == 0:
        return []
    splits = np.flatnonzero(np.diff(idx) > 1) + 1
    return [r for r in np.split(idx, splits) if len(r) >= 2]


# ---------------------------------------------------------------- tangency and convexity


@dataclass
class Contact:
    side: str
    tau: float
    x: float
    residual: float
    found: bool


def _pole_list(curve):
    poles = [complex(p) for p in np.concatenate([curve.u.poles(), curve.v.poles()])]
    uniq = []
    for p in poles:
        if all(abs(p - q) > 1e-9 for q in uniq):
            uniq.append(p)
    uniq.append("inf")
    return uniq


def _laurent_radius(curve, pole):
    others = [p for p in _pole_list(curve) if p != "inf" and p != pole]
    if pole == "inf":
        far = max([abs(p) for p in others] + [1.0])
        return 0.25 / far
    gaps = [abs(pole - p) for p in others]
    return 0.25 * min(gaps + [1.0])


def pole_residue(curve, pole, tau) -> complex:
    rad = _laurent_radius(curve, pole)
    return curve.x_at(tau).laurent_coefficients(pole, [-1], radius=rad)[-1]


def tangency_report(env: Envelope, sides=None, tol: float = 1e-8) -> list[Contact]:
    """Contact of the envelope with each straight side.

    Vertical sides are matched with a pole of ``x(., tau_side)`` whose residue
    vanishes; the contact is the constant Laurent term there.  Sloped sides are
    matched with the envelope point whose tangent slope equals the side's slope.
    The residual is the distance from the contact point to the side.
    """
    curve = env.curve
    sides = curve.sides if sides is None else sides
    out = []
    for side in sides:
        if side.vertical:
            out.append(_vertical_contact(curve, env, side, tol))
        else:
            out.append(_sloped_contact(curve, env, side))
    return out


def _segment_gap(lo, hi, x):
    lo, hi = min(lo, hi), max(lo, hi)
    return max(0.0, lo - x, x - hi)


def _vertical_contact(curve, env, side, tol):
    tau0 = side.tau_a
    best = None
    for pole in _pole_list(curve):
        res = pole_residue(curve, pole, tau0)
        if abs(res) > 1e-8:
            continue
        rad = _laurent_radius(curve, pole)
        x0 = curve.x_at(tau0).laurent_coefficients(pole, [0], radius=rad)[0].real
        if curve.family == "quantum":
            if x0 <= 0:
                continue
            x0 = math.log(x0) / math.log(curve.qq)
        r = abs(res) + _segment_gap(side.x_a, side.x_b, x0)
        if best is None or r < best.residual:
            best = Contact(side.name, tau0, x0, r, True)
    if best is None:
        # fall back to the envelope sample closest to the side's time
        for arc in env.arcs:
            i = int(np.argmin(np.abs(arc.tau - tau0)))
            r = abs(arc.tau[i] - tau0) + _segment_gap(side.x_a, side.x_b, arc.x[i])
            if best is None or r < best.residual:
                best = Contact(side.name, float(arc.tau[i]), float(arc.x[i]), r, True)
    if best is None:
        return Contact(side.name, tau0, math.nan, math.inf, False)
    best.found = best.residual < max(tol, 1e-6)
    return best


def _sloped_contact(curve, env, side):
    sigma = side.slope
    lo, hi = sorted((side.tau_a, side.tau_b))
    best = None
    for arc in env.arcs:
        th = np.arctan(arc.z)
        with np.errstate(all="ignore"):
            f = np.real(curve.envelope_slope(arc.z.astype(complex))) - sigma
        for i in np.flatnonzero(np.sign(f[:-1]) * np.sign(f[1:]) <= 0):
            g = lambda t: float(np.real(curve.envelope_slope(complex(math.tan(t))))) - sigma
            try:
                tc = brentq(g, th[i], th[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps) if f[i] != f[i + 1] else th[i]
            except ValueError:
                continue
            z = complex(math.tan(tc))
            tau = float(np.real(curve.critical_time(z)))
            x = float(np.real(curve.position(z, tau)))
            if tau < lo - 1e-9 or tau > hi + 1e-9:
                continue
            r = abs(x - side.x_at(tau))
            if best is None or r < best.residual:
                best = Contact(side.name, tau, x, r, True)
        # a contact sitting exactly on an arc end shows no sign change
        for i in (0, len(f) - 1):
            if np.isfinite(f[i]) and abs(f[i]) < 1e-12 and lo - 1e-9 <= arc.tau[i] <= hi + 1e-9:
                r = abs(float(arc.x[i]) - side.x_at(float(arc.tau[i])))
                if best is None or r < best.residual:
                    best = Contact(side.name, float(arc.tau[i]), float(arc.x[i]), r, True)
    if best is None:
        return Contact(side.name, math.nan, math.nan, math.inf, False)
    best.found = best.residual < 1e-6
    return best


def convexity_check(env: Envelope, rel_tol: float = 1e-9) -> list[bool]:
    """For each arc, whether the turning direction keeps one sign along the samples."""
    out = []
    for arc in env.arcs:
        if len(arc.tau) < 3:
            out.append(True)
            continue
        dt1, dx1 = np.diff(arc.tau)[:-1], np.diff(arc.x)[:-1]
        dt2, dx2 = np.diff(arc.tau)[1:], np.diff(arc.x)[1:]
        cross = dt1 * dx2 - dx1 * dt2
        scale = np.hypot(dt1, dx1) * np.hypot(dt2, dx2)
        significant = np.abs(cross) > rel_tol * np.maximum(scale, 1e-300)
        signs = np.sign(cross[significant])
        out.append(bool(len(signs) == 0 or np.all(signs == signs[0])))
    return out


# ---------------------------------------------------------------- blow-ups


def _fd(f, x0, h=1e-4):
    return (f(x0 + h) - f(x0 - h)) / (2 * h)


@dataclass
class AiryBlowup:
    curve: RationalSpectralCurve
    z_c: float
    t0: float
    X0: float
    X_t: complex
    X_zt: complex
    X_2: complex
    Y_0: complex
    X_1: complex
    kappa: complex
    mu: complex

    def local_curve(self, zeta, tau, s):
        """Rescaled (x, y) of the true curve at ``z = z_c + s kappa zeta``, ``t = t0 + s mu tau``."""
        z = self.z_c + s * self.kappa * zeta
        t = self.t0 + s * self.mu * tau
        c = self.curve
        xh = c.position(z, t) - c.position(self.z_c, t)
        yh = _time_derivative(c, z, t) - _time_derivative(c, self.z_c, t)
        return xh / s**2, yh * self.mu / s

    def normal_form_error(self, zeta, tau, s) -> float:
        """``|(y + tau/2)^2 - (x + tau^2/4)|`` for the rescaled local curve."""
        x, y = self.local_curve(zeta, tau, s)
        return abs((y + tau / 2) ** 2 - (x + tau**2 / 4))


def _time_derivative(curve, z, t):
    if curve.family == "classical":
        return curve.v(z)
    return _fd(lambda tt: curve.position(z, tt), t, 1e-5)


def blowup_airy(curve: RationalSpectralCurve, z_c: float, tol: float = 1e-8) -> AiryBlowup:
    """Local Taylor data at the envelope point parametrized by ``z_c``."""
    z_c = complex(z_c)
    t0 = complex(curve.critical_time(z_c))
    if abs(t0.imag) > 1e-12:
        raise CurveError("z_c does not parametrize a real envelope point")
    t0 = t0.real
    if curve.family == "classical":
        X_t = complex(curve.v(z_c))
        X_zt = complex(curve._dv(z_c))
        X_2 = complex(curve.d2xdz2(z_c, t0)) / 2
        X0 = complex(curve.x(z_c, t0)).real
    else:
        pos = lambda z, t: complex(curve.position(z, t))
        X0 = pos(z_c, t0).real
        X_t = _fd(lambda t: pos(z_c, t), t0, 1e-5)
        X_zt = _fd(lambda t: _fd(lambda z: pos(z, t), z_c, 1e-4), t0, 1e-4)
        X_2 = (pos(z_c + 1e-4, t0) - 2 * pos(z_c, t0) + pos(z_c - 1e-4, t0)) / 2e-8 / 2
    scale = max(1.0, abs(X_t), abs(X0))
    if abs(X_2) < tol * scale:
        raise CurveError("dx has a multiple zero here (cusp or irregular point); use blowup_pearcey")
    if abs(X_zt) < tol * scale:
        raise CurveError("the critical point does not move with time here; not a regular envelope point")
    kappa = 1 / np.sqrt(X_2)
    mu = 1 / (kappa * X_zt)
    return AiryBlowup(curve, z_c.real, t0, X0, X_t, X_zt, X_2, X_t, X_zt, complex(kappa), complex(mu))


@dataclass
class PearceyBlowup:
    curve: RationalSpectralCurve
    pole: object
    t0: float
    v0: complex
    x0: complex
    u0: complex

    def local_x(self, zeta, tau, s):
        """``(X(z, t) - x0)/s`` at the rescaled point; tends to ``zeta + tau/zeta``."""
        w = s * zeta / self.u0
        t = self.t0 + s**2 * tau / (self.u0 * self.v0)
        z = 1 / w if self.pole == "inf" else self.pole + w
        return (self.curve.x(z, t) - self.x0) / s

    def normal_form_error(self, zeta, tau, s) -> float:
        return abs(self.local_x(zeta, tau, s) - (zeta + tau / zeta))


def blowup_pearcey(curve: RationalSpectralCurve, cusp_time: float, tol: float = 1e-8) -> PearceyBlowup:
    """Laurent data ``(t - t0) v / w + x0 + u w`` at the pole whose residue vanishes at ``cusp_time``."""
    if curve.family != "classical":
        raise CurveError("cusp extraction is implemented for classical curves")
    for pole in _pole_list(curve):
        if abs(pole_residue(curve, pole, cusp_time)) > tol:
            continue
        rad = _laurent_radius(curve, pole)
        v0 = curve.v.laurent_coefficients(pole, [-1], radius=rad)[-1]
        if abs(v0) < tol:
            continue  # pole absent at all times
        co = curve.x_at(cusp_time).laurent_coefficients(pole, [0, 1], radius=rad)
        x0, u0 = co[0], co[1]
        if abs(u0) < tol:
            raise CurveError("degenerate cusp: linear Laurent coefficient vanishes")
        return PearceyBlowup(curve, pole, float(cusp_time), v0, x0, u0)
    raise CurveError(f"no pole of x(., {cusp_time}) loses its residue; not a cusp time")
