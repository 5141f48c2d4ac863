"""Command-line front end.

Subcommands write their artifacts into an output directory (``--out``, else
``$LOZENGE_OUTPUT_DIR``, else ``./lozenge-out``) together with ``manifest.json``.
Exit status: 0 success, 2 input error, 3 infeasible model, 4 numeric tolerance failure.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import platform
import sys
import time
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path

import numpy as np
import scipy
import sympy

from . import __version__, kernels
from .curves import (
    CurveError,
    envelope,
    solve_cardioid,
    solve_hexagon_classical,
    solve_hexagon_quantum,
    solve_trapezoid,
    tangency_report,
)
from .enumeration import (
    NoConfiguration,
    StateCapExceeded,
    densities,
    partition_function,
    partition_value,
    plancherel_domain_weight,
    plancherel_weight,
    tsscpp_partition_function,
    volume_normalize,
)
from .io import (
    DomainSpecError,
    envelope_svg,
    fmt_float,
    parse_curve_spec,
    parse_domain_spec,
    write_arcs_csv,
    write_density_csv,
    write_qseries_csv,
)
from .lattice import DomainError, Partition, build_from_boundaries
from .qpoly import HalfQPolynomial
from .recursion import IrregularCurve, QuadratureError, airy_curve, correlator, free_energy

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_NUMERIC = 0, 2, 3, 4
OUTPUT_ENV = "LOZENGE_OUTPUT_DIR"


class InputError(ValueError):
    pass


class ToleranceFailure(RuntimeError):
    pass


class Run:
    """Collects artifacts and timings for one invocation, then writes the manifest."""

    def __init__(self, args: argparse.Namespace, inputs: dict[str, bytes]):
        self.args = args
        self.out = Path(args.out or os.environ.get(OUTPUT_ENV) or "lozenge-out")
        self.out.mkdir(parents=True, exist_ok=True)
        self.inputs = inputs
        self.timings: dict[str, float] = {}
        self.artifacts: list[str] = []

    @contextmanager
    def timed(self, label: str):
        start = time.perf_counter()
        yield
        self.timings[label] = round(time.perf_counter() - start, 6)

    def path(self, name: str) -> Path:
        self.artifacts.append(name)
        return self.out / name

    def write_text(self, name: str, text: str) -> None:
        self.path(name).write_text(text, encoding="utf-8")

    def config(self) -> dict:
        cfg = {k: v for k, v in vars(self.args).items() if k not in ("out", "func")}
        return json.loads(json.dumps(cfg, default=str))

    def inputs_hash(self) -> str:
        h = hashlib.sha256()
        h.update(json.dumps(self.config(), sort_keys=True).encode())
        for name in sorted(self.inputs):
            h.update(name.encode())
            h.update(hashlib.sha256(self.inputs[name]).digest())
        return h.hexdigest()

    def write_manifest(self) -> None:
        digests = {n: hashlib.sha256((self.out / n).read_bytes()).hexdigest() for n in sorted(set(self.artifacts))}
        manifest = {
            "command": self.args.command,
            "config": self.config(),
            "inputs_sha256": self.inputs_hash(),
            "artifacts": digests,
            "versions": {
                "lozenge": __version__,
                "kernel_backend": kernels.BACKEND,
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "sympy": sympy.__version__,
            },
            "timings_s": self.timings,
        }
        (self.out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _parse_q(text: str | None):
    if text is None or text == "symbolic":
        return None
    try:
        q = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"q must be a rational like 1/3 or 'symbolic', got {text!r}") from None
    if q <= 0:
        raise InputError("q must be positive")
    return q


def _parse_points(text: str) -> list[complex]:
    try:
        return [complex(s.strip().replace("i", "j")) for s in text.split(",") if s.strip()]
    except ValueError:
        raise InputError(f"cannot parse points {text!r}") from None


def _fraction_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


# ---------------------------------------------------------------- subcommands


def cmd_enumerate(args, run: Run) -> int:
    q = _parse_q(args.q)
    if args.normalize and args.raw:
        raise InputError("--normalize and --raw are contradictory")
    if args.box:
        n_l, n_mu, n_nu = args.box
        if min(args.box) < 0:
            raise InputError("box sides must be nonnegative")
        empty = Partition(())
        domain = build_from_boundaries(empty, empty, empty, n_l, n_mu, n_nu)
    else:
        if args.normalize or args.raw:
            raise InputError("--normalize/--raw only apply to --box")
        domain = parse_domain_spec(run.inputs["domain"].decode("utf-8"))
    with run.timed("partition_function"):
        if q is None:
            series = partition_function(domain, state_cap=args.state_cap)
            if args.box and not args.raw:
                series = volume_normalize(series, n_l, n_mu, n_nu)
            write_qseries_csv(run.path("series.csv"), series)
            head = ", ".join(f"{_fraction_str(c)}*q^{Fraction(k, 2)}" for k, c in series.items()[:8])
            print(f"Z = {head}{' + ...' if len(series.items()) > 8 else ''}")
        else:
            value = partition_value(domain, q, state_cap=args.state_cap)
            if args.box and not args.raw:
                value = volume_normalize(HalfQPolynomial({0: value}), n_l, n_mu, n_nu).evaluate(q)
            run.write_text("value.csv", f"q,numerator,denominator\n{_fraction_str(q)},{value.numerator},{value.denominator}\n")
            print(f"Z({_fraction_str(q)}) = {_fraction_str(value)}")
    if args.density_t:
        for t in args.density_t:
            if t not in domain.slices:
                raise InputError(f"--density-t {t} outside [{domain.t_min}, {domain.t_max}]")
        with run.timed("densities"):
            tables = densities(domain, None, sorted(set(args.density_t)), 1 if q is None else q,
                               state_cap=args.state_cap)
        for t, table in tables.items():
            if table.total() != domain.n_particles:
                raise ToleranceFailure(f"density at t={t} sums to {table.total()}")
            write_density_csv(run.path(f"density_t{t}.csv"), table)
    return EXIT_OK


def _build_curve(args):
    if args.hexagon:
        a, b = args.hexagon
        if args.qq is not None:
            return solve_hexagon_quantum(a, b, args.qq)
        return solve_hexagon_classical(a, b)
    if args.trapezoid is not None:
        return solve_trapezoid(args.trapezoid)
    a, b = args.cardioid
    return solve_cardioid(a, b)


def cmd_envelope(args, run: Run) -> int:
    if args.qq is not None and not args.hexagon:
        raise InputError("--qq only applies to --hexagon")
    with run.timed("envelope"):
        curve = _build_curve(args)
        env = envelope(curve, samples=args.samples)
    write_arcs_csv(run.path("arcs.csv"), env)
    status = EXIT_OK
    if env.max_residual > args.tol:
        print(f"envelope residual {env.max_residual:.3g} exceeds {args.tol:g}", file=sys.stderr)
        status = EXIT_NUMERIC
    if curve.sides:
        with run.timed("tangency"):
            contacts = tangency_report(env, tol=args.tol)
        rows = ["side,tau,x,residual,found"]
        for c in contacts:
            rows.append(f"{c.side},{fmt_float(c.tau)},{fmt_float(c.x)},{fmt_float(c.residual)},{int(c.found)}")
            print(f"contact {c.side}: tau={c.tau:.12g} x={c.x:.12g} residual={c.residual:.2e}")
        run.write_text("contacts.csv", "\n".join(rows) + "\n")
    if args.emit_svg:
        run.write_text("envelope.svg", envelope_svg(env))
    print(f"{sum(len(a.tau) for a in env.arcs)} envelope points on {len(env.arcs)} arcs, "
          f"max |dX/dz| residual {env.max_residual:.2e}")
    return status


def cmd_recursion(args, run: Run) -> int:
    if args.airy:
        curve = airy_curve()
    else:
        curve = parse_curve_spec(run.inputs["curve"].decode("utf-8"), name=Path(args.curve).stem)
    rows = ["quantity,real,imag,error"]
    with run.timed("recursion"):
        if args.fg is not None:
            if args.fg < 2:
                raise InputError("F_g is implemented for g >= 2")
            res = free_energy(curve, args.fg, tol=args.tol)
            label = f"F_{args.fg}"
        else:
            n, g = args.wng
            if args.at is None:
                raise InputError("--wng needs --at z1,z2,...")
            pts = _parse_points(args.at)
            res = correlator(curve, n, g, pts, tol=args.tol)
            label = f"W_{n}^{g}"
    rows.append(f"{label},{fmt_float(res.value.real)},{fmt_float(res.value.imag)},{fmt_float(res.error)}")
    run.write_text("recursion.csv", "\n".join(rows) + "\n")
    print(f"{label} = {res.value.real:.17g} {res.value.imag:+.3g}i  (check difference {res.error:.2e})")
    return EXIT_OK


def cmd_tsscpp(args, run: Run) -> int:
    if args.n < 1:
        raise InputError("--n must be >= 1")
    q = _parse_q(args.q)
    with run.timed("tsscpp"):
        if q is None:
            series = tsscpp_partition_function(args.n)
            write_qseries_csv(run.path("series.csv"), series)
            print(_fraction_str(series.evaluate(1)))
        else:
            value = tsscpp_partition_function(args.n, q)
            run.write_text("value.csv", f"q,numerator,denominator\n{_fraction_str(q)},{value.numerator},{value.denominator}\n")
            print(_fraction_str(value))
    return EXIT_OK


def cmd_plancherel(args, run: Run) -> int:
    try:
        parts = tuple(int(s) for s in args.mu.split(",") if s.strip())
        mu = Partition(parts, args.n)
    except ValueError as exc:
        raise InputError(f"bad --mu: {exc}") from None
    rows = ["T,numerator,denominator,relative_error"]
    with run.timed("closed_form"):
        exact = plancherel_weight(mu, args.n, 1)
    rows.append(f"inf,{exact.numerator},{exact.denominator},0")
    print(f"closed form: {_fraction_str(exact)}")
    for T in args.T:
        with run.timed(f"domain_T{T}"):
            w = plancherel_domain_weight(mu, args.n, T)
        rel = abs(w - exact) / abs(exact) if exact else abs(w)
        rows.append(f"{T},{w.numerator},{w.denominator},{fmt_float(rel)}")
        print(f"T={T}: {_fraction_str(w)} (relative error {float(rel):.3e})")
    run.write_text("plancherel.csv", "\n".join(rows) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lozenge", description="Lozenge tilings, particle paths and spectral curves.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help=f"output directory (default ${OUTPUT_ENV} or ./lozenge-out)")
        return sp

    e = common(sub.add_parser("enumerate", help="exact partition function of a domain"))
    src = e.add_mutually_exclusive_group(required=True)
    src.add_argument("--box", nargs=3, type=int, metavar=("N_L", "N_MU", "N_NU"))
    src.add_argument("--domain", help="domain-spec file")
    e.add_argument("--normalize", action="store_true", help="divide out the box volume offset (default for --box)")
    e.add_argument("--raw", action="store_true", help="keep the unnormalized exponents of a --box series")
    e.add_argument("--q", default="symbolic", help="exact rational q, or 'symbolic' for the full series")
    e.add_argument("--density-t", type=int, action="append", help="emit the density at this time (repeatable)")
    e.add_argument("--state-cap", type=int, default=5_000_000)
    e.set_defaults(func=cmd_enumerate)

    v = common(sub.add_parser("envelope", help="arctic curve of a worked example"))
    kind = v.add_mutually_exclusive_group(required=True)
    kind.add_argument("--hexagon", nargs=2, type=float, metavar=("A", "B"))
    kind.add_argument("--trapezoid", type=_positive_float, metavar="ALPHA")
    kind.add_argument("--cardioid", nargs=2, type=float, metavar=("A", "B"))
    v.add_argument("--qq", type=_positive_float, help="quantum parameter for the hexagon")
    v.add_argument("--samples", type=int, default=400)
    v.add_argument("--tol", type=_positive_float, default=1e-8)
    v.add_argument("--emit-svg", action="store_true")
    v.set_defaults(func=cmd_envelope)

    r = common(sub.add_parser("recursion", help="topological recursion on a rational curve"))
    which = r.add_mutually_exclusive_group(required=True)
    which.add_argument("--airy", action="store_true")
    which.add_argument("--curve", help="curve-spec file")
    what = r.add_mutually_exclusive_group(required=True)
    what.add_argument("--fg", type=int, metavar="G")
    what.add_argument("--wng", nargs=2, type=int, metavar=("N", "G"))
    r.add_argument("--at", help="comma-separated points, e.g. 0.4+0.2j,1.1")
    r.add_argument("--tol", type=_positive_float, default=1e-8)
    r.set_defaults(func=cmd_recursion)

    t = common(sub.add_parser("tsscpp", help="TSSCPP count via obliged cells"))
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--q", default="symbolic")
    t.set_defaults(func=cmd_tsscpp)

    pl = common(sub.add_parser("plancherel", help="closed-form weight vs finite-domain computation"))
    pl.add_argument("--mu", default="2,1", help="partition parts, comma separated")
    pl.add_argument("--n", type=int, default=2)
    pl.add_argument("--T", type=int, action="append", default=None, help="domain length (repeatable; default 8 and 10)")
    pl.set_defaults(func=cmd_plancherel)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "plancherel" and args.T is None:
        args.T = [8, 10]
    inputs: dict[str, bytes] = {}
    try:
        for key in ("domain", "curve"):
            path = getattr(args, key, None)
            if path:
                inputs[key] = Path(path).read_bytes()
        run = Run(args, inputs)
        status = args.func(args, run)
        run.write_manifest()
        return status
    except (DomainError, NoConfiguration, CurveError, IrregularCurve) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (OSError, DomainSpecError, InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except StateCapExceeded as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (QuadratureError, ToleranceFailure) as exc:
        print(f"tolerance failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
