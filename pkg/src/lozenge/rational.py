"""Rational functions of one complex variable with double-precision coefficients."""
from __future__ import annotations

import numpy as np
from numpy.polynomial import polynomial as P

__all__ = ["RationalFunction"]


def _trim(c: np.ndarray) -> np.ndarray:
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    nz = np.flatnonzero(c != 0)
    if len(nz) == 0:
        return np.zeros(1, dtype=complex)
    return c[: nz[-1] + 1]


class RationalFunction:
    """``num(z) / den(z)``; coefficient arrays are ordered by increasing degree.

    >>> f = RationalFunction.laurent({-1: 1.0, 1: 1.0})   # z + 1/z
    >>> complex(f(2.0))
    (2.5+0j)
    """

    def __init__(self, num, den=(1.0,)):
        num, den = _trim(num), _trim(den)
        if not np.any(den):
            raise ZeroDivisionError("zero denominator")
        # normalize so that the leading denominator coefficient is 1
        lead = den[-1]
        self.num = num / lead
        self.den = den / lead

    @classmethod
    def constant(cls, c) -> "RationalFunction":
        return cls([c])

    @classmethod
    def identity(cls) -> "RationalFunction":
        return cls([0.0, 1.0])

    @classmethod
    def laurent(cls, terms: dict[int, complex]) -> "RationalFunction":
        """Sum of ``coeff * z**k`` with k possibly negative."""
        lo = min(0, min(terms))
        hi = max(terms) - lo
        num = np.zeros(hi + 1, dtype=complex)
        for k, c in terms.items():
            num[k - lo] += c
        den = np.zeros(-lo + 1, dtype=complex)
        den[-lo] = 1.0
        return cls(num, den)

    @classmethod
    def simple_poles(cls, const: complex, poles: dict[complex, complex]) -> "RationalFunction":
        """``const + sum residue / (z - pole)``."""
        f = cls.constant(const)
        for p, r in poles.items():
            f = f + cls([r], [-p, 1.0])
        return f

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return P.polyval(z, self.num) / P.polyval(z, self.den)

    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        return RationalFunction([complex(other)])

    def __add__(self, other):
        o = self._coerce(other)
        if len(self.den) == len(o.den) and np.allclose(self.den, o.den, rtol=0, atol=0):
            return RationalFunction(P.polyadd(self.num, o.num), self.den)
        return RationalFunction(
            P.polyadd(P.polymul(self.num, o.den), P.polymul(o.num, self.den)), P.polymul(self.den, o.den)
        )

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return RationalFunction(P.polymul(self.num, o.num), P.polymul(self.den, o.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        return RationalFunction(P.polymul(self.num, o.den), P.polymul(self.den, o.num))

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def derivative(self) -> "RationalFunction":
        dn, dd = P.polyder(self.num), P.polyder(self.den)
        return RationalFunction(
            P.polysub(P.polymul(dn, self.den), P.polymul(self.num, dd)), P.polymul(self.den, self.den)
        )

    def compose_inverse(self) -> "RationalFunction":
        """``f(1/w)`` as a rational function of w."""
        n, d = len(self.num) - 1, len(self.den) - 1
        m = max(n, d)
        num = np.zeros(m + 1, dtype=complex)
        den = np.zeros(m + 1, dtype=complex)
        num[m - n :] = self.num[::-1]
        den[m - d :] = self.den[::-1]
        return RationalFunction(num, den)

    def zeros(self) -> np.ndarray:
        if len(self.num) == 1:
            return np.zeros(0, dtype=complex)
        return P.polyroots(self.num)

    def poles(self) -> np.ndarray:
        if len(self.den) == 1:
            return np.zeros(0, dtype=complex)
        return P.polyroots(self.den)

    def reduced(self, tol: float = 1e-10) -> "RationalFunction":
        """Cancel numerator/denominator roots that agree within ``tol``."""
        zs = list(self.zeros())
        ps = list(self.poles())
        changed = False
        for p in list(ps):
            for z in zs:
                if abs(z - p) <= tol * max(1.0, abs(p)):
                    zs.remove(z)
                    ps.remove(p)
                    changed = True
                    break
        if not changed:
            return self
        lead_n = self.num[-1]
        num = P.polyfromroots(zs) * lead_n if zs else np.array([lead_n])
        den = P.polyfromroots(ps) if ps else np.array([1.0])
        return RationalFunction(num, den)

    def laurent_coefficients(self, center, orders, radius: float = 1e-2, nodes: int = 128) -> dict[int, complex]:
        """Laurent coefficients about ``center`` (``"inf"`` for infinity, in w = 1/z) by contour quadrature."""
        f = self.compose_inverse() if center == "inf" else self
        c = 0.0 if center == "inf" else complex(center)
        theta = 2 * np.pi * np.arange(nodes) / nodes
        w = radius * np.exp(1j * theta)
        vals = f(c + w)
        return {k: complex(np.mean(vals * w ** (-k))) for k in orders}

    @property
    def degree(self) -> tuple[int, int]:
        return len(self.num) - 1, len(self.den) - 1

    def __repr__(self):
        return f"RationalFunction(num={self.num.tolist()}, den={self.den.tolist()})"
