"""Digamma asymptotics and q-series used by the large-size expansions.

Each evaluator returns ``(value, remainder_bound)``.
"""
from __future__ import annotations

import cmath
import math

__all__ = [
    "BERNOULLI",
    "PoleProximityError",
    "digamma_stirling",
    "q_product",
    "psi_q",
    "q_number",
]

# B_1 = -1/2 enters through the -1/(2x) term; odd ones beyond vanish.
BERNOULLI = {1: -0.5, 2: 1 / 6, 4: -1 / 30, 6: 1 / 42, 8: -1 / 30, 10: 5 / 66, 12: -691 / 2730, 14: 7 / 6}


class PoleProximityError(ValueError):
    pass


def digamma_stirling(x, order: int = 4):
    """``psi(x) ~ ln x - 1/(2x) - sum_{k>=1} B_{2k} / (2k x^{2k})``, summed through ``x^{-order}``.

    The bound is the magnitude of the first omitted term, which for real x > 0
    dominates the true error.
    """
    if order < 0 or order % 2:
        raise ValueError("order must be a nonnegative even integer")
    if order + 2 > max(BERNOULLI):
        raise ValueError(f"order {order} exceeds the stored Bernoulli numbers")
    if x == 0:
        raise PoleProximityError("x = 0 is a pole of psi")
    val = complex(x) if isinstance(x, complex) else float(x)
    s = (cmath.log(val) if isinstance(val, complex) else math.log(val)) - 1 / (2 * val)
    for k in range(2, order + 1, 2):
        s -= BERNOULLI[k] / (k * val**k)
    k = order + 2
    bound = abs(BERNOULLI[k] / (k * val**k))
    return s, bound


def _check_q(q):
    if not abs(q) < 1:
        raise ValueError("q-series need |q| < 1")


def q_product(x, q, truncation: int = 200):
    """``g(x) = prod_{n>=1} (1 - q^n / x)`` truncated after ``truncation`` factors.

    Remainder bound: ``|g| * (exp(T) - 1)`` with ``T = sum_{n>N} |q|^n/|x| / (1 - |q|^n/|x|)``,
    a bound on the relative size of the omitted factors.
    """
    _check_q(q)
    if x == 0:
        raise PoleProximityError("g is singular at x = 0")
    g = 1.0
    for n in range(1, truncation + 1):
        g *= 1 - q**n / x
    r = abs(q) ** (truncation + 1) / abs(x)
    if r >= 1:
        return g, math.inf
    tail = r / ((1 - abs(q)) * (1 - r))
    return g, abs(g) * math.expm1(tail)


def psi_q(x, q, truncation: int = 200, min_distance: float = 1e-12):
    """``x g'(x)/g(x) = sum_{n>=1} q^n / (x - q^n)`` with a geometric tail bound."""
    _check_q(q)
    s = 0.0
    for n in range(1, truncation + 1):
        d = x - q**n
        if abs(d) < min_distance:
            raise PoleProximityError(f"x is within {abs(d):.3g} of the pole q^{n}")
        s += q**n / d
    qa = abs(q) ** (truncation + 1)
    gap = abs(x) - qa
    if gap <= 0:
        return s, math.inf
    return s, qa / ((1 - abs(q)) * gap)


def q_number(n, q):
    """``[n] = q^(-n/2) - q^(n/2)``; exact only as far as the inputs are."""
    return q ** (-n / 2) - q ** (n / 2)
