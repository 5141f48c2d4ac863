"""Text formats: domain specs, curve specs, CSV artifacts and SVG overlays.

Every writer has a matching reader so artifacts can be round-tripped.  Floats are
written with 17 significant digits, exact rationals as numerator/denominator
column pairs.
"""
from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .curves import Envelope, Side, SpectralCurve
from .enumeration import DensityTable
from .lattice import RhombusDomain
from .qpoly import HalfQPolynomial
from .rational import RationalFunction

__all__ = [
    "DomainSpecError",
    "parse_domain_spec",
    "format_domain_spec",
    "read_domain_spec",
    "parse_curve_spec",
    "format_curve_spec",
    "fmt_float",
    "write_qseries_csv",
    "read_qseries_csv",
    "write_density_csv",
    "read_density_csv",
    "write_arcs_csv",
    "read_arcs_csv",
    "envelope_svg",
]


class DomainSpecError(ValueError):
    """Malformed spec text; carries the 1-based line and column of the offending token."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.reason = message


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


# ---------------------------------------------------------------- domain specs

_HEADER = re.compile(r"\[\s*(\w+)(?:\s+(-?\d+))?\s*\]$")
_INT = r"[+-]?\d+"
_TOKEN = re.compile(r"[^\s,]+")


@dataclass
class _Token:
    text: str
    line: int
    col: int

    def integer(self, what: str) -> int:
        if not re.fullmatch(_INT, self.text):
            raise DomainSpecError(f"expected an integer {what}, got {self.text!r}", self.line, self.col)
        return int(self.text)

    def rational(self, what: str) -> Fraction:
        if not re.fullmatch(rf"{_INT}(/\d+)?", self.text):
            raise DomainSpecError(f"expected a rational {what}, got {self.text!r}", self.line, self.col)
        try:
            return Fraction(self.text)
        except ZeroDivisionError:
            raise DomainSpecError(f"zero denominator in {self.text!r}", self.line, self.col) from None


def _tokens(body: str, line: int, start_col: int) -> list[_Token]:
    return [_Token(m.group(), line, start_col + m.start()) for m in _TOKEN.finditer(body)]


def parse_domain_spec(text: str) -> RhombusDomain:
    """Parse the line-oriented domain format (grammar in the README).

    Comments start with ``#``.  Parity and range problems are reported with the
    line and column of the token responsible.
    """
    section = None
    n_particles = None
    slices: dict[int, list[int]] = {}
    where: dict[int, int] = {}
    alpha: dict[int, Fraction] = {}
    beta: dict[int, Fraction] = {}
    obliged: list[tuple[int, int, _Token]] = []
    filling: dict[tuple[int, int], int] = {}
    last_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        last_line = lineno
        body = raw.split("#", 1)[0]
        stripped = body.strip()
        if not stripped:
            continue
        col0 = len(body) - len(body.lstrip()) + 1
        if stripped.startswith("["):
            m = _HEADER.match(stripped)
            if not m:
                raise DomainSpecError(f"malformed section header {stripped!r}", lineno, col0)
            name, arg = m.group(1), m.group(2)
            if name == "time":
                if arg is None:
                    raise DomainSpecError("[time] needs an integer time", lineno, col0)
                t = int(arg)
                if t in slices:
                    raise DomainSpecError(f"duplicate section [time {t}] (first on line {where[t]})", lineno, col0)
                slices[t] = []
                where[t] = lineno
                section = ("time", t)
            elif name in ("particles", "alpha", "beta", "obliged", "filling"):
                if arg is not None:
                    raise DomainSpecError(f"[{name}] takes no argument", lineno, col0)
                section = (name, None)
            else:
                raise DomainSpecError(f"unknown section [{name}]", lineno, col0)
            continue
        if section is None:
            raise DomainSpecError("content before the first section header", lineno, col0)
        kind, t = section
        if kind == "obliged":
            pairs = list(re.finditer(r"\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\)", body))
            leftover = re.sub(r"\(\s*[^,()\s]+\s*,\s*[^,()\s]+\s*\)", "", body).replace(",", " ").strip()
            if leftover or not pairs:
                raise DomainSpecError("expected pairs '(twice_h, t)'", lineno, col0)
            for m in pairs:
                th = _Token(m.group(1), lineno, m.start(1) + 1).integer("twice-h")
                tt = _Token(m.group(2), lineno, m.start(2) + 1)
                obliged.append((th, tt.integer("time"), _Token(m.group(), lineno, m.start() + 1)))
            continue
        toks = _tokens(body, lineno, 1)
        if kind == "particles":
            if n_particles is not None or len(toks) != 1:
                raise DomainSpecError("[particles] holds exactly one integer", lineno, toks[0].col)
            n_particles = toks[0].integer("particle count")
            if n_particles < 0:
                raise DomainSpecError("particle count must be nonnegative", lineno, toks[0].col)
        elif kind == "time":
            for tok in toks:
                if ".." in tok.text:
                    lo_s, hi_s = tok.text.split("..", 1)
                    lo = _Token(lo_s, lineno, tok.col).integer("range start")
                    hi = _Token(hi_s, lineno, tok.col + len(lo_s) + 2).integer("range end")
                    if (lo - t) % 2 or (hi - t) % 2:
                        raise DomainSpecError(
                            f"parity violation: range {tok.text} at t={t} needs endpoints with the parity of t",
                            lineno, tok.col)
                    if hi < lo:
                        raise DomainSpecError(f"empty range {tok.text}", lineno, tok.col)
                    slices[t].extend(range(lo, hi + 1, 2))
                else:
                    p = tok.integer("twice-h")
                    if (p - t) % 2:
                        raise DomainSpecError(
                            f"parity violation: twice-h {p} at t={t} (2h - t must be even)", lineno, tok.col)
                    slices[t].append(p)
        elif kind in ("alpha", "beta"):
            if len(toks) != 2:
                raise DomainSpecError(f"[{kind}] lines are 't weight'", lineno, col0)
            step = toks[0].integer("time")
            w = toks[1].rational("weight")
            if w <= 0:
                raise DomainSpecError("jump weights must be positive", lineno, toks[1].col)
            (alpha if kind == "alpha" else beta)[step] = w
        elif kind == "filling":
            if len(toks) != 3:
                raise DomainSpecError("[filling] lines are 't interval_index count'", lineno, col0)
            key = (toks[0].integer("time"), toks[1].integer("interval index"))
            filling[key] = toks[2].integer("count")
    if n_particles is None:
        raise DomainSpecError("missing [particles] section", last_line + 1)
    if not slices:
        raise DomainSpecError("no [time t] sections", last_line + 1)
    t_min, t_max = min(slices), max(slices)
    for t in range(t_min, t_max + 1):
        if t not in slices:
            raise DomainSpecError(f"missing section [time {t}] between {t_min} and {t_max}", last_line + 1)
    for step in list(alpha) + list(beta):
        if not t_min <= step < t_max:
            raise DomainSpecError(f"jump weight given for step {step} outside [{t_min}, {t_max})", last_line + 1)
    for th, tt, tok in obliged:
        if (th - tt) % 2:
            raise DomainSpecError(f"parity violation: obliged cell ({th}, {tt})", tok.line, tok.col)
    # infeasible slices surface as DomainError (a model problem, not a syntax one)
    return RhombusDomain(t_min, t_max, {t: tuple(p) for t, p in slices.items()}, n_particles,
                         alpha, beta, {(h, t) for h, t, _ in obliged}, filling)


def read_domain_spec(path) -> RhombusDomain:
    with open(path, encoding="utf-8") as fh:
        return parse_domain_spec(fh.read())


def format_domain_spec(domain: RhombusDomain) -> str:
    out = ["[particles]", str(domain.n_particles)]
    for t in domain.times:
        out.append(f"[time {t}]")
        out.append(" ".join(str(p) for p in domain.slices[t]))
    for name, weights in (("alpha", domain.alpha), ("beta", domain.beta)):
        if weights:
            out.append(f"[{name}]")
            out.extend(f"{t} {w}" for t, w in sorted(weights.items()))
    if domain.obliged:
        out.append("[obliged]")
        out.extend(f"({h}, {t})" for h, t in sorted(domain.obliged, key=lambda c: (c[1], c[0])))
    if domain.filling:
        out.append("[filling]")
        out.extend(f"{t} {i} {c}" for (t, i), c in sorted(domain.filling.items()))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- curve specs

_CURVE_KEYS = ("x.num", "x.den", "y.num", "y.den")


def _parse_complex(tok: str, line: int, col: int) -> complex:
    try:
        return complex(tok.replace("i", "j") if tok.endswith("i") else tok)
    except ValueError:
        raise DomainSpecError(f"bad coefficient {tok!r}", line, col) from None


def parse_curve_spec(text: str, name: str = "curve") -> SpectralCurve:
    """Rational curve from ``x.num = c0 c1 ...`` style lines, lowest degree first.

    ``x.den`` and ``y.den`` default to 1.  Coefficients may be complex (``1+2j``).
    """
    found: dict[str, list[complex]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        if "=" not in body:
            raise DomainSpecError("expected 'key = coefficients'", lineno, len(body) - len(body.lstrip()) + 1)
        key, rhs = body.split("=", 1)
        k = key.strip()
        if k not in _CURVE_KEYS:
            raise DomainSpecError(f"unknown key {k!r}", lineno, body.index(k) + 1)
        if k in found:
            raise DomainSpecError(f"duplicate key {k!r}", lineno, body.index(k) + 1)
        toks = _tokens(rhs, lineno, len(key) + 2)
        if not toks:
            raise DomainSpecError(f"{k} has no coefficients", lineno, len(key) + 2)
        found[k] = [_parse_complex(t.text, lineno, t.col) for t in toks]
    for k in ("x.num", "y.num"):
        if k not in found:
            raise DomainSpecError(f"missing {k}", len(text.splitlines()) + 1)
    try:
        x = RationalFunction(found["x.num"], found.get("x.den", [1.0]))
        y = RationalFunction(found["y.num"], found.get("y.den", [1.0]))
    except ZeroDivisionError:
        raise DomainSpecError("zero denominator polynomial", len(text.splitlines()) + 1) from None
    return SpectralCurve(x, y, name)


def _fmt_coef(c: complex) -> str:
    c = complex(c)
    if c.imag == 0:
        return fmt_float(c.real)
    return f"{fmt_float(c.real)}{'+' if c.imag >= 0 else '-'}{fmt_float(abs(c.imag))}j"


def format_curve_spec(curve: SpectralCurve) -> str:
    rows = zip(_CURVE_KEYS, (curve.x.num, curve.x.den, curve.y.num, curve.y.den))
    return "".join(f"{k} = {' '.join(_fmt_coef(c) for c in coeffs)}\n" for k, coeffs in rows)


# ---------------------------------------------------------------- CSV


def _csv_text(header: Iterable[str], rows: Iterable[Iterable]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _read_rows(path, header: tuple[str, ...]) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != header:
            raise ValueError(f"{path}: expected columns {','.join(header)}")
        return list(reader)


def write_qseries_csv(path, series: HalfQPolynomial) -> None:
    rows = [(k, c.numerator, c.denominator) for k, c in series.items()]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(_csv_text(("twice_exponent", "numerator", "denominator"), rows))


def read_qseries_csv(path) -> HalfQPolynomial:
    rows = _read_rows(path, ("twice_exponent", "numerator", "denominator"))
    return HalfQPolynomial({int(r["twice_exponent"]): Fraction(int(r["numerator"]), int(r["denominator"])) for r in rows})


def write_density_csv(path, table: DensityTable) -> None:
    rows = [(h, p.numerator, p.denominator) for h, p in sorted(table.occupation.items())]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(_csv_text(("twice_h", "probability_num", "probability_den"), rows))


def read_density_csv(path) -> dict[int, Fraction]:
    rows = _read_rows(path, ("twice_h", "probability_num", "probability_den"))
    return {int(r["twice_h"]): Fraction(int(r["probability_num"]), int(r["probability_den"])) for r in rows}


def write_arcs_csv(path, env: Envelope) -> None:
    rows = []
    for arc in env.arcs:
        rows.extend((fmt_float(t), fmt_float(x), arc.label) for t, x in zip(arc.tau, arc.x))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(_csv_text(("tau", "x_c", "branch"), rows))


def read_arcs_csv(path) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    rows = _read_rows(path, ("tau", "x_c", "branch"))
    out: dict[str, tuple[list, list]] = {}
    for r in rows:
        ts, xs = out.setdefault(r["branch"], ([], []))
        ts.append(float(r["tau"]))
        xs.append(float(r["x_c"]))
    return {k: (np.array(t), np.array(x)) for k, (t, x) in out.items()}


# ---------------------------------------------------------------- SVG


def envelope_svg(env: Envelope, sides: Iterable[Side] | None = None, width: int = 480, margin: int = 20) -> str:
    """Static overlay of the domain outline (grey) and the envelope arcs (black)."""
    sides = list(env.curve.sides if sides is None else sides)
    ts = [s.tau_a for s in sides] + [s.tau_b for s in sides]
    xs = [s.x_a for s in sides] + [s.x_b for s in sides]
    for arc in env.arcs:
        ts.extend(arc.tau.tolist())
        xs.extend(arc.x.tolist())
    t0, t1, x0, x1 = min(ts), max(ts), min(xs), max(xs)
    scale = (width - 2 * margin) / max(t1 - t0, x1 - x0, 1e-12)
    height = int(round((x1 - x0) * scale)) + 2 * margin

    def pt(t, x):
        # x grows upward on the page
        return f"{(t - t0) * scale + margin:.3f},{height - ((x - x0) * scale + margin):.3f}"

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    ]
    for s in sides:
        parts.append(f'<polyline class="side" data-name="{s.name}" fill="none" stroke="#888" '
                     f'stroke-width="1.5" points="{pt(s.tau_a, s.x_a)} {pt(s.tau_b, s.x_b)}"/>')
    for arc in env.arcs:
        ok = np.isfinite(arc.tau) & np.isfinite(arc.x)
        pts = " ".join(pt(t, x) for t, x in zip(arc.tau[ok], arc.x[ok]))
        parts.append(f'<polyline class="arc" data-branch="{arc.label}" fill="none" stroke="black" '
                     f'stroke-width="1" points="{pts}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
