"""Command-line interface: ``chebforge <command> [options]``.

Series arguments accept an inline comma list, a ``.json`` series document
or a ``.csv`` file of ``n,value`` rows.  Output goes to stdout or ``-o``,
as CSV by default or as a JSON series document with ``--json``.  All
numbers are written with 17 significant digits so reruns are byte-identical.

Exit status: 0 on success, 1 on numerical/domain errors, 2 on usage errors.
"""

import argparse
import os
import sys
import warnings

import numpy as np

from .catalog import catalog, catalog_entry, catalog_names
from .core import Basis, ChebSeries, MonomialPoly, cheb_eval, from_monomial, to_monomial
from .errors import ChebError, PrecisionWarning, UnknownFunctionError
from .partial_fractions import decompose, expand_inverse, expand_inverse_shifted
from .recurrence import extend
from .relerr import FitConfig, FitResult, equilibrate, newton_fit, relative_error_curve
from .truncation import divide

__all__ = ["main", "build_parser"]

PRECISION_ENV = "CHEB_FORGE_PRECISION_WARN"
NATIVE_EPS = float(np.finfo(float).eps)
VERIFY_RTOL = 1e-9


class UsageError(Exception):
    """Options are inconsistent with the chosen command."""


def _fmt(x):
    return format(float(x), ".17g")


def _parse_list(text):
    try:
        return [float(v) for v in text.replace(";", ",").split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse number list {text!r}: {exc}") from None


def _read_csv(path, basis):
    """Rows ``n,value``; a header naming ``b_n`` marks unprimed polynomial values."""
    unprimed = False
    rows = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            cells = [c.strip() for c in line.split(",")]
            if cells[0] == "n":
                unprimed = len(cells) > 1 and cells[1] == "b_n"
                continue
            try:
                rows[int(cells[0])] = float(cells[1])
            except (ValueError, IndexError):
                raise UsageError(f"{path}: malformed row {line!r}") from None
    if not rows:
        raise UsageError(f"{path}: no coefficients")
    values = np.zeros(max(rows) + 1)
    for n, v in rows.items():
        values[n] = v
    return ChebSeries.from_unprimed(values, basis) if unprimed else ChebSeries(values, basis)


def load_series(arg, basis=Basis.STANDARD):
    """Series from an inline list or a ``.json`` / ``.csv`` file."""
    if os.path.isfile(arg):
        ext = os.path.splitext(arg)[1].lower()
        if ext == ".json":
            with open(arg, encoding="utf-8") as fh:
                return ChebSeries.from_json(fh.read())
        if ext == ".csv":
            return _read_csv(arg, basis)
        raise UsageError(f"{arg}: unknown file type {ext!r} (use .json or .csv)")
    return ChebSeries(np.array(_parse_list(arg)), basis)


def _series_lines(series):
    return [f"{n},{_fmt(v)}" for n, v in enumerate(series.coeffs)]


def _emit(args, lines=None, series=None):
    if args.json and series is not None:
        text = series.to_json() + "\n"
    else:
        text = "".join(line + "\n" for line in lines)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _precision_warn(value, what):
    if os.environ.get(PRECISION_ENV, "1") == "0":
        return
    if 0 < value < NATIVE_EPS:
        warnings.warn(f"{what} {value:.3g} is below double precision; "
                      "only its order of magnitude is meaningful", PrecisionWarning, stacklevel=2)


def _basis(args):
    return Basis.SHIFTED if getattr(args, "shifted", False) else Basis.STANDARD


def _target(args):
    if bool(args.catalog) == bool(args.f):
        raise UsageError("give exactly one of --catalog or --f")
    if args.catalog:
        return catalog(args.catalog, args.N)
    return load_series(args.f, _basis(args))


def _fit_config(args):
    if args.k < 0:
        raise UsageError("--k must be >= 0")
    if args.N is None:
        args.N = 2 * args.k + 8
    if args.N < 2 * args.k:
        raise UsageError(f"--N {args.N} must be at least 2k = {2 * args.k}")
    kwargs = {"k": args.k, "N": args.N}
    if args.iters is not None:
        if args.iters < 0:
            raise UsageError("--iters must be >= 0")
        kwargs["max_newton_iters"] = args.iters
    if args.tol is not None:
        if not args.tol > 0:
            raise UsageError("--tol must be positive")
        kwargs["newton_tol"] = args.tol
    if getattr(args, "grid", None) is not None:
        if args.grid < 2:
            raise UsageError("--grid must be >= 2")
        kwargs["extremum_grid"] = args.grid
    if getattr(args, "steps", None) is not None:
        if args.steps < 0:
            raise UsageError("--steps must be >= 0")
        kwargs["equilibrate_iters"] = args.steps
    return FitConfig(**kwargs)


def _fit_lines(result, emit_monomial):
    b = result.b.unprimed()
    if not emit_monomial:
        return ["n,b_n"] + [f"{n},{_fmt(v)}" for n, v in enumerate(b)]
    d = to_monomial(result.b).coeffs
    return ["n,b_n,d_n"] + [f"{n},{_fmt(v)},{_fmt(w)}" for n, (v, w) in enumerate(zip(b, d))]


def _report(result, label):
    sys.stderr.write(f"{label}: relerr_estimate {_fmt(result.relerr_estimate)}\n")
    _precision_warn(result.relerr_estimate, "relative error estimate")


def cmd_expand_inverse(args):
    basis = _basis(args)
    given = [a for a in (args.monomial, args.cheb, args.input) if a]
    if len(given) != 1:
        raise UsageError("give exactly one of --monomial, --cheb or --input")
    if args.n_max < 0:
        raise UsageError("--n-max must be >= 0")
    if args.monomial:
        poly = MonomialPoly(np.array(_parse_list(args.monomial)))
        denom = from_monomial(poly, basis)
    else:
        denom = load_series(args.cheb or args.input, basis)
        poly = to_monomial(denom)
    k = denom.degree

    def via_pf(n_max):
        dec = decompose(poly, denom.basis)
        return (expand_inverse_shifted(dec, n_max) if denom.basis is Basis.SHIFTED
                else expand_inverse(dec, n_max))

    def via_truncate(n_max):
        N = max(args.N or 0, n_max + 4 * k + 32)
        one = ChebSeries(np.eye(1, N + 1)[0] * 2.0, denom.basis)
        return divide(one, denom, N, refine_steps=3).truncated(n_max)

    if args.method == "pf":
        result = via_pf(args.n_max)
    elif args.method == "truncate":
        result = via_truncate(args.n_max)
    else:
        seed = via_pf(max(k - 1, 0)).coeffs[:k]
        result = extend(list(seed), denom, args.n_max)
    if args.verify:
        # The recurrence amplifies rounding like |w|^(2n), so only the leading
        # window n <= 2k is compared.
        window = min(args.n_max, 2 * k)
        seed = via_pf(max(k - 1, 0)).coeffs[:k]
        check = extend(list(seed), denom, window).coeffs
        head = result.coeffs[: window + 1]
        worst = float(np.max(np.abs(check - head))) / float(np.max(np.abs(head)))
        sys.stderr.write(f"verify: recurrence agrees through n={window} to relative {worst:.3g}\n")
        if worst > VERIFY_RTOL:
            raise ChebError(f"recurrence cross-check disagrees by relative {worst:.3g}")
    _emit(args, _series_lines(result), result)


def cmd_divide(args):
    basis = _basis(args)
    f = load_series(args.f, basis)
    b = load_series(args.b, basis)
    if args.N < b.degree:
        raise UsageError(f"--N {args.N} is below the denominator degree {b.degree}")
    result = divide(f, b, args.N, refine_steps=args.refine)
    _emit(args, _series_lines(result), result)


def cmd_fit_relerr(args):
    cfg = _fit_config(args)
    f = _target(args)
    result = newton_fit(f, cfg)
    _report(result, "newton")
    _emit(args, _fit_lines(result, args.emit_monomial), result.b)


def cmd_equilibrate(args):
    cfg = _fit_config(args)
    f = _target(args)
    if args.b:
        b = load_series(args.b, f.basis)
        start = FitResult(b, None, None, (), float("nan"))
    else:
        start = newton_fit(f, cfg)
    result = equilibrate(f, start, cfg)
    traj = " -> ".join(format(v, ".3g") for v in result.trajectory)
    sys.stderr.write(f"equilibrate: max|R| {traj}\n")
    _report(result, "equilibrate")
    _precision_warn(result.max_abs_error, "max |R|")
    _emit(args, _fit_lines(result, args.emit_monomial), result.b)


def cmd_catalog(args):
    if args.list:
        _emit(args, [f"{n},{catalog_entry(n).basis.value},{catalog_entry(n).description}"
                     for n in catalog_names()])
        return
    if not args.name:
        raise UsageError("catalog needs --name (or --list)")
    if args.n_max < 0:
        raise UsageError("--n-max must be >= 0")
    result = catalog(args.name, args.n_max)
    _emit(args, _series_lines(result), result)


def _grid(args, basis):
    if args.x:
        return np.array(_parse_list(args.x))
    if args.grid < 2:
        raise UsageError("--grid must be >= 2")
    lo, hi = basis.domain
    return np.linspace(lo, hi, args.grid)


def cmd_eval(args):
    s = load_series(args.series, _basis(args))
    xs = _grid(args, s.basis)
    lo, hi = s.basis.domain
    if np.any(xs < lo) or np.any(xs > hi):
        raise ChebError(f"abscissae must lie in [{lo:g}, {hi:g}]")
    ys = cheb_eval(s, xs)
    _emit(args, [f"{_fmt(x)},{_fmt(y)}" for x, y in zip(xs, ys)])


def cmd_error_curve(args):
    if bool(args.catalog) == bool(args.f):
        raise UsageError("give exactly one of --catalog or --f")
    if args.catalog:
        args.N = args.N if args.N is not None else 64
        f = catalog(args.catalog, args.N)
    else:
        f = load_series(args.f, _basis(args))
        args.N = args.N if args.N is not None else len(f) - 1
    b = load_series(args.b, f.basis)
    xs = _grid(args, f.basis)
    target = catalog_entry(args.catalog).function if (args.catalog and args.exact) else f
    rs = relative_error_curve(target, b, args.N, xs)
    _emit(args, [f"{_fmt(x)},{_fmt(r)}" for x, r in zip(xs, rs)])


def _common(p, json_ok=True):
    p.add_argument("-o", "--output", help="write to this file instead of stdout")
    if json_ok:
        p.add_argument("--json", action="store_true", help="emit a JSON series document")
    else:
        p.set_defaults(json=False)
    p.add_argument("--shifted", action="store_true",
                   help="inline and CSV series use the shifted basis on [0, 1]")


def _fit_options(p):
    p.add_argument("--catalog", help="catalog function to fit")
    p.add_argument("--f", help="target series (inline list, .json or .csv)")
    p.add_argument("--k", type=int, required=True, help="polynomial degree")
    p.add_argument("--N", type=int, help="truncation index (default 2k+8)")
    p.add_argument("--iters", type=int, help="maximum Newton iterations (default 8)")
    p.add_argument("--tol", type=float, help="Newton tolerance on max|a_1..a_k|")
    p.add_argument("--emit-monomial", action="store_true", help="add a d_n power-basis column")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="chebforge",
        description="Chebyshev expansions of inverse polynomials and relative-error fits.")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("expand-inverse", help="Chebyshev series of 1/p(x)")
    p.add_argument("--monomial", help="p as d_0,d_1,...,d_k")
    p.add_argument("--cheb", help="p as stored Chebyshev coefficients")
    p.add_argument("--input", help="p as a .json or .csv series file")
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--method", choices=("pf", "recurrence", "truncate"), default="pf")
    p.add_argument("--N", type=int, help="truncation index for --method truncate")
    p.add_argument("--verify", action="store_true", help="cross-check with the recurrence")
    _common(p)
    p.set_defaults(func=cmd_expand_inverse)

    p = sub.add_parser("divide", help="leading coefficients of f/B from the banded system")
    p.add_argument("--f", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--refine", type=int, default=3, help="refinement steps (default 3)")
    _common(p)
    p.set_defaults(func=cmd_divide)

    p = sub.add_parser("fit-relerr", help="Newton fit of the relative error")
    _fit_options(p)
    _common(p)
    p.set_defaults(func=cmd_fit_relerr)

    p = sub.add_parser("equilibrate", help="Newton fit followed by extremum equilibration")
    _fit_options(p)
    p.add_argument("--b", help="start from these coefficients instead of a Newton fit")
    p.add_argument("--steps", type=int, help="equilibration steps (default 4)")
    p.add_argument("--grid", type=int, help="extremum search grid (default 4001)")
    _common(p)
    p.set_defaults(func=cmd_equilibrate)

    p = sub.add_parser("catalog", help="coefficients of a built-in expansion")
    p.add_argument("--name", help=f"one of: {', '.join(catalog_names())}")
    p.add_argument("--n-max", type=int, default=16)
    p.add_argument("--list", action="store_true", help="list the registered names")
    _common(p)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("eval", help="evaluate a series")
    p.add_argument("--series", required=True)
    p.add_argument("--x", help="comma list of abscissae")
    p.add_argument("--grid", type=int, default=21, help="uniform points over the domain")
    _common(p, json_ok=False)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("error-curve", help="samples x, R(x) of the relative error")
    p.add_argument("--catalog")
    p.add_argument("--f")
    p.add_argument("--b", required=True, help="polynomial coefficients")
    p.add_argument("--N", type=int, help="cut of the target series (default 64 for catalog)")
    p.add_argument("--x", help="comma list of abscissae")
    p.add_argument("--grid", type=int, default=2001)
    p.add_argument("--exact", action="store_true",
                   help="use the exact catalog function instead of its series")
    _common(p, json_ok=False)
    p.set_defaults(func=cmd_error_curve)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (UsageError, UnknownFunctionError) as exc:
        parser.error(str(exc))
    except ChebError as exc:
        sys.stderr.write(f"chebforge: error: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"chebforge: error: {exc}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
