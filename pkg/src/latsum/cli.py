"""Command-line surface with machine-readable output.

Every command emits one JSON object, a JSON array, or CSV rows (RFC-4180
style, '.' decimal separator).  Floats are serialized with shortest
round-trip precision, so identical invocations produce byte-identical
output.  Exit codes: 0 success, 2 argument/validation error, 3 numerical
tolerance not met, 4 lemma-suite failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import applications as app
from . import proofcheck
from .errors import LatSumError
from .lattice import (
    PhasePoint,
    lattice_from_tau,
    reduce_to_fundamental,
    special_point_a,
    special_point_b,
)
from .optimize import minimize_over_cell
from .theta import TruncationPolicy, theta_charged, theta_shifted

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_TOLERANCE = 3
EXIT_LEMMA = 4


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'a,b', got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected numbers in {text!r}") from exc


def _float_list(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",") if p]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}") from exc


def _linspace_triple(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected start:stop:count, got {text!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad triple {text!r}") from exc
    if count < 1:
        raise argparse.ArgumentTypeError("count must be at least 1")
    return [float(v) for v in np.linspace(start, stop, count)]


def _format_value(v) -> str:
    if isinstance(v, np.floating):
        v = float(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def _json_default(v):
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, np.integer):
        return int(v)
    raise TypeError(f"not JSON serializable: {type(v)}")


def _emit(rows: list[dict], args, single: bool = False) -> None:
    if args.csv:
        lines = [",".join(rows[0].keys())]
        for row in rows:
            lines.append(",".join(_format_value(v) for v in row.values()))
        text = "\n".join(lines) + "\n"
    elif args.human:
        blocks = []
        for row in rows:
            blocks.append("\n".join(f"{k} = {_format_value(v)}" for k, v in row.items()))
        text = ("\n\n".join(blocks)) + "\n"
    else:
        payload = rows[0] if single else rows
        text = json.dumps(payload, indent=2, default=_json_default) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_common(p: argparse.ArgumentParser) -> None:
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON output (default)")
    fmt.add_argument("--csv", action="store_true", help="CSV output")
    fmt.add_argument("--human", action="store_true", help="key = value lines")
    p.add_argument("--out", metavar="PATH", help="write output to a file")
    p.add_argument(
        "--tol", type=_positive_float, default=1e-10, help="target tail tolerance"
    )
    p.add_argument(
        "--max-radius", type=int, default=10_000, help="cap on summation shells"
    )


def _policy(args) -> TruncationPolicy:
    return TruncationPolicy(target_tol=args.tol, max_radius=args.max_radius)


def _certified_row(cv, extra: dict | None = None) -> dict:
    row = {
        "value": cv.value,
        "tail_bound": cv.tail_bound,
        "terms_used": cv.terms_used,
        "converged": cv.converged,
    }
    if extra:
        row.update(extra)
    return row


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _cmd_theta(args) -> int:
    x, y = args.lattice
    lat = lattice_from_tau(x, y)
    if args.shift is None:
        b = special_point_b(x, y)
    else:
        b = PhasePoint(args.shift[0], args.shift[1])
    fn = theta_charged if args.charged else theta_shifted
    cv = fn(lat, b, args.alpha, _policy(args))
    _emit([_certified_row(cv)], args, single=True)
    return EXIT_OK if cv.converged else EXIT_TOLERANCE


def _cmd_minimize(args) -> int:
    x, y = args.lattice
    res = minimize_over_cell(lattice_from_tau(x, y), args.alpha, args.grid_n, _policy(args))
    row = {
        "x": x,
        "y": y,
        "alpha": args.alpha,
        "min_value": res.value.value,
        "argmin_u": res.argmin.u,
        "argmin_v": res.argmin.v,
        "tail_bound": res.value.tail_bound,
        "grid_resolution": res.grid_resolution,
        "refinement_steps": res.refinement_steps,
    }
    _emit([row], args, single=True)
    return EXIT_OK if res.value.converged else EXIT_TOLERANCE


def _sweep_cell(payload) -> list[tuple]:
    x, y, alphas, grid_n, tol, exploratory = payload
    pol = TruncationPolicy(target_tol=tol)
    lat = lattice_from_tau(x, y)
    rows = []
    for alpha in alphas:
        res = minimize_over_cell(lat, alpha, grid_n, pol)
        row = (x, y, alpha, res.value.value, res.argmin.u, res.argmin.v, res.value.tail_bound)
        if exploratory:
            va = theta_shifted(lat, special_point_a(x, y), alpha, pol).value
            vb = theta_shifted(lat, special_point_b(x, y), alpha, pol).value
            row = row + (va, vb)
        rows.append(row)
    return rows


def _cmd_sweep(args) -> int:
    alphas = sorted(args.alpha)
    xs = sorted(args.x)
    ys = sorted(args.y)
    cells = []
    for x in xs:
        for y in ys:
            if y <= 0:
                raise LatSumError(f"lattice parameter y must be positive, got {y}")
            cells.append((x, y, tuple(alphas), args.grid_n, args.tol, args.exploratory))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            chunks = list(pool.map(_sweep_cell, cells))
    else:
        chunks = [_sweep_cell(c) for c in cells]
    header = ["x", "y", "alpha", "min_value", "argmin_u", "argmin_v", "tail_bound"]
    if args.exploratory:
        header += ["value_at_a", "value_at_b"]
    rows = [dict(zip(header, row)) for chunk in chunks for row in chunk]
    _emit(rows, args)
    return EXIT_OK


def _cmd_frame_bounds(args) -> int:
    x, y = args.shape
    fb = app.gabor_frame_bounds(x, y, args.density, _policy(args))
    row = {
        "x": x,
        "y": y,
        "density": fb.density,
        "lower_A": fb.lower_A,
        "upper_B": fb.upper_B,
        "ratio": fb.ratio,
        "argmin_u": fb.argmin_z.u,
        "argmin_v": fb.argmin_z.v,
    }
    _emit([row], args, single=True)
    return EXIT_OK


def _cmd_heat(args) -> int:
    x, y = args.lattice
    u, v = args.z
    cv = app.heat_kernel_torus(
        lattice_from_tau(x, y), PhasePoint(u, v), args.t, _policy(args), route=args.route
    )
    _emit([_certified_row(cv, {"route": args.route, "t": args.t})], args, single=True)
    return EXIT_OK if cv.converged else EXIT_TOLERANCE


def _cmd_zeta(args) -> int:
    x, y = args.lattice
    u, v = args.z
    cv = app.epstein_zeta_shifted(
        lattice_from_tau(x, y), PhasePoint(u, v), args.s, _policy(args), method=args.method
    )
    _emit([_certified_row(cv, {"method": args.method, "s": args.s})], args, single=True)
    return EXIT_OK


def _cmd_born(args) -> int:
    x, y = args.lattice
    lat = lattice_from_tau(x, y)
    if args.pattern == "honeycomb":
        eps = app.epsilon_opt_hexagonal(args.period)
    else:
        if args.period % 2 != 0:
            raise LatSumError("alternating pattern needs an even period")
        m1, m2 = np.meshgrid(np.arange(args.period), np.arange(args.period), indexing="ij")
        eps = app.ChargeDistribution(args.period, np.where((m1 + m2) % 2 == 0, 1.0, -1.0))
    p = app.CMPotential.gaussian(args.node_alpha)
    energy = app.born_energy(lat, eps, p, _policy(args))
    row = {
        "pattern": args.pattern,
        "period": args.period,
        "node_alpha": args.node_alpha,
        "energy": energy,
        "interaction_energy": energy - p.at_zero(),
        "charge_sum": float(np.sum(eps.weights)),
        "charge_norm_sq": float(np.sum(eps.weights**2)),
    }
    _emit([row], args, single=True)
    return EXIT_OK


def _cmd_landau(args) -> int:
    lc = app.landau_constants(_policy(args))
    row = dataclasses.asdict(lc)
    _emit([row], args, single=True)
    return EXIT_OK


def _cmd_verify_lemmas(args) -> int:
    reports = proofcheck.run_default_suite()
    if args.suite != "all":
        wanted = set(args.suite.split(","))
        unknown = wanted - {r.lemma_id for r in reports}
        if unknown:
            raise LatSumError(f"unknown lemma ids: {sorted(unknown)}")
        reports = [r for r in reports if r.lemma_id in wanted]
    rows = [
        {
            "lemma_id": r.lemma_id,
            "params_tested": r.params_tested,
            "worst_margin": r.worst_margin,
            "pass": r.passed,
        }
        for r in reports
    ]
    _emit(rows, args)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_LEMMA


def _cmd_reduce(args) -> int:
    re, im = args.tau
    trace = reduce_to_fundamental(complex(re, im))
    row = {
        "tau_in_re": trace.tau_in.real,
        "tau_in_im": trace.tau_in.imag,
        "tau_out_re": trace.tau_out.real,
        "tau_out_im": trace.tau_out.imag,
        "word": list(trace.word),
    }
    _emit([row], args, single=True)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latsum",
        description="Lattice Gaussian sums with certified tails: evaluation, "
        "minimization, sweeps, applications, lemma verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    hex_xy = f"0.5,{math.sqrt(3) / 2!r}"

    p = sub.add_parser("theta", help="evaluate the shifted or charged family")
    p.add_argument("--lattice", type=_pair, default=_pair(hex_xy), metavar="X,Y")
    p.add_argument("--shift", type=_pair, default=None, metavar="U,V",
                   help="shift/charge in lattice coordinates (default: point b)")
    p.add_argument("--alpha", type=_positive_float, default=1.0)
    p.add_argument("--charged", action="store_true", help="charged family")
    _add_common(p)
    p.set_defaults(func=_cmd_theta)

    p = sub.add_parser("minimize", help="global torus minimum of the Gaussian sum")
    p.add_argument("--lattice", type=_pair, default=_pair(hex_xy), metavar="X,Y")
    p.add_argument("--alpha", type=_positive_float, default=1.0)
    p.add_argument("--grid-n", type=int, default=64)
    _add_common(p)
    p.set_defaults(func=_cmd_minimize)

    p = sub.add_parser("sweep", help="fundamental-domain sweep of torus minima")
    p.add_argument("--alpha", type=_float_list, default=[1.0], metavar="A1,A2,...")
    p.add_argument("--x", type=_linspace_triple, required=True, metavar="START:STOP:COUNT")
    p.add_argument("--y", type=_linspace_triple, required=True, metavar="START:STOP:COUNT")
    p.add_argument("--grid-n", type=int, default=32)
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.add_argument("--exploratory", action="store_true",
                   help="append values at the moving points a and b (no pass/fail)")
    _add_common(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("frame-bounds", help="Gaussian frame bounds for even density")
    p.add_argument("--shape", type=_pair, default=_pair(hex_xy), metavar="X,Y")
    p.add_argument("--density", type=int, default=2)
    _add_common(p)
    p.set_defaults(func=_cmd_frame_bounds)

    p = sub.add_parser("heat", help="heat kernel on the torus of a lattice")
    p.add_argument("--lattice", type=_pair, default=_pair(hex_xy), metavar="X,Y")
    p.add_argument("--z", type=_pair, default=(0.0, 0.0), metavar="U,V")
    p.add_argument("--t", type=_positive_float, required=True)
    p.add_argument("--route", choices=("gaussian", "spectral"), default="gaussian")
    _add_common(p)
    p.set_defaults(func=_cmd_heat)

    p = sub.add_parser("zeta", help="shifted Epstein zeta (squared-distance power)")
    p.add_argument("--lattice", type=_pair, default=_pair(hex_xy), metavar="X,Y")
    p.add_argument("--z", type=_pair, default=(1.0 / 3.0, 1.0 / 3.0), metavar="U,V")
    p.add_argument("--s", type=_positive_float, required=True)
    p.add_argument("--method", choices=("direct", "quadrature"), default="direct")
    _add_common(p)
    p.set_defaults(func=_cmd_zeta)

    p = sub.add_parser("born", help="periodic charge energy per point")
    p.add_argument("--lattice", type=_pair, default=_pair(hex_xy), metavar="X,Y")
    p.add_argument("--pattern", choices=("honeycomb", "alternating"), default="honeycomb")
    p.add_argument("--period", type=int, default=3)
    p.add_argument("--node-alpha", type=_positive_float, default=1.0)
    _add_common(p)
    p.set_defaults(func=_cmd_born)

    p = sub.add_parser("landau", help="disc-covering constants and the 1/2 product")
    _add_common(p)
    p.set_defaults(func=_cmd_landau)

    p = sub.add_parser("verify-lemmas", help="run the lemma verification suite")
    p.add_argument("--suite", default="all", help="'all' or comma-separated lemma ids")
    _add_common(p)
    p.set_defaults(func=_cmd_verify_lemmas)

    p = sub.add_parser("reduce", help="reduce tau into the fundamental half-domain")
    p.add_argument("--tau", type=_pair, required=True, metavar="RE,IM")
    _add_common(p)
    p.set_defaults(func=_cmd_reduce)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LatSumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
