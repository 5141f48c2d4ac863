"""Exact Laurent polynomials in q^(1/2) with rational coefficients."""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

__all__ = ["HalfQPolynomial", "macmahon_series"]


class HalfQPolynomial:
    """Sparse map ``twice_exponent -> Fraction``.

    The key ``k`` stands for ``q**(k/2)``.  Zero coefficients are never stored,
    so two polynomials are equal iff their coefficient dicts are equal.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping[int, object] | None = None):
        c: dict[int, Fraction] = {}
        for k, v in (coeffs or {}).items():
            v = Fraction(v)
            if v:
                c[int(k)] = v
        self._c = c

    @classmethod
    def monomial(cls, twice_exp: int, coeff=1) -> "HalfQPolynomial":
        return cls({twice_exp: coeff})

    @classmethod
    def from_integer_powers(cls, coeffs: Iterable) -> "HalfQPolynomial":
        """Build from ``[c0, c1, ...]`` meaning ``c0 + c1 q + ...``."""
        return cls({2 * i: c for i, c in enumerate(coeffs)})

    @property
    def coeffs(self) -> dict[int, Fraction]:
        return dict(self._c)

    def items(self):
        return sorted(self._c.items())

    def __getitem__(self, twice_exp: int) -> Fraction:
        return self._c.get(twice_exp, Fraction(0))

    def coefficient(self, power) -> Fraction:
        """Coefficient of ``q**power`` (power may be a half-integer)."""
        k = Fraction(power) * 2
        if k.denominator != 1:
            return Fraction(0)
        return self[int(k)]

    def is_zero(self) -> bool:
        return not self._c

    def min_twice_exponent(self) -> int:
        return min(self._c)

    def max_twice_exponent(self) -> int:
        return max(self._c)

    def shift(self, twice_delta: int) -> "HalfQPolynomial":
        """Multiply by ``q**(twice_delta/2)``."""
        return HalfQPolynomial({k + twice_delta: v for k, v in self._c.items()})

    def truncate(self, max_twice_exp: int) -> "HalfQPolynomial":
        return HalfQPolynomial({k: v for k, v in self._c.items() if k <= max_twice_exp})

    def __add__(self, other):
        other = _coerce(other)
        out = dict(self._c)
        for k, v in other._c.items():
            out[k] = out.get(k, 0) + v
        return HalfQPolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return HalfQPolynomial({k: -v for k, v in self._c.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        out: dict[int, Fraction] = {}
        for k1, v1 in self._c.items():
            for k2, v2 in other._c.items():
                out[k1 + k2] = out.get(k1 + k2, 0) + v1 * v2
        return HalfQPolynomial(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return self._c == other._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __call__(self, q) -> Fraction:
        return self.evaluate(q)

    def evaluate(self, q) -> Fraction:
        """Exact value at a rational ``q``.

        Odd twice-exponents need ``sqrt(q)``; this succeeds only when q is the
        square of a rational, otherwise ValueError.
        """
        q = Fraction(q)
        if any(k % 2 for k in self._c):
            root = _rational_sqrt(q)
            if root is None:
                raise ValueError(f"q={q} is not a rational square; half-integer powers present")
            base = root
            return sum((v * base ** k for k, v in self._c.items()), Fraction(0))
        if q == 0:
            if any(k < 0 for k in self._c):
                raise ZeroDivisionError("negative power of q at q=0")
            return self._c.get(0, Fraction(0))
        return sum((v * q ** (k // 2) for k, v in self._c.items()), Fraction(0))

    def evaluate_float(self, q: float) -> float:
        return sum(float(v) * q ** (k / 2) for k, v in self._c.items())

    def __repr__(self):
        if not self._c:
            return "HalfQPolynomial(0)"
        terms = []
        for k, v in self.items():
            if k == 0:
                terms.append(f"{v}")
            else:
                p = str(k // 2) if k % 2 == 0 else f"{k}/2"
                terms.append(f"{v}*q^{p}")
        return "HalfQPolynomial(" + " + ".join(terms) + ")"


def _coerce(x) -> HalfQPolynomial:
    if isinstance(x, HalfQPolynomial):
        return x
    if isinstance(x, (int, Fraction)):
        return HalfQPolynomial({0: x})
    raise TypeError(f"cannot combine HalfQPolynomial with {type(x).__name__}")


def _rational_sqrt(q: Fraction) -> Fraction | None:
    from math import isqrt

    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def macmahon_series(max_order: int) -> HalfQPolynomial:
    """Truncation of prod_{k>=1} (1 - q^k)^(-k) through ``q**max_order``."""
    if max_order < 0:
        raise ValueError("max_order must be >= 0")
    series = [0] * (max_order + 1)
    series[0] = 1
    for k in range(1, max_order + 1):
        # multiply k times by 1/(1 - q^k), i.e. a running prefix sum with stride k
        for _ in range(k):
            for i in range(k, max_order + 1):
                series[i] += series[i - k]
    return HalfQPolynomial.from_integer_powers(series)
