"""Command-line front end: ``iifs-dim <subcommand> ...``.

Exit status is 0 on success, 2 for bad arguments or inputs outside an
operation's domain, and 1 when a computation fails.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import cf, cover, formulas, generic
from .digits import ComplexPowerFamily, digit_set_from_json
from .emit import PlotSpec, Series, emit_csv, emit_svg, emit_table, read_csv
from .errors import GridMismatchError, IifsError, NoTransitionError, SearchExhaustedError, UsageError
from .ifs import GeometricRatios, system_from_json
from .pressure import DimBracket, hausdorff_bracket, pressure_estimate

__all__ = ["main", "run", "build_parser"]

COMPUTATION_ERRORS = (SearchExhaustedError, GridMismatchError, NoTransitionError, OSError)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        sub = self.prog.removeprefix("iifs-dim").strip()
        raise UsageError(f"{sub}: {message}" if sub else message)


# -- argument helpers ---------------------------------------------------------


def _number(text: str) -> float:
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        try:
            return float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {v}")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _load_json(text: str):
    """Inline JSON, or the contents of a file when ``text`` names one."""
    if not text.lstrip().startswith(("{", "[")):
        try:
            text = Path(text).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {text!r}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON: {exc}") from exc


def _scale_list(text: str, num: int, dyadic: bool) -> list[float]:
    """``a,b,c`` lists scales; ``hi:lo`` spans a range (halving or log-spaced)."""
    if ":" in text:
        a, b = (_number(s) for s in text.split(":", 1))
        hi, lo = max(a, b), min(a, b)
        if not lo > 0:
            raise UsageError("scales must be positive")
        if dyadic:
            out = [hi]
            while out[-1] / 2 >= lo * (1 - 1e-12):
                out.append(out[-1] / 2)
            return out
        return list(np.logspace(math.log10(hi), math.log10(lo), num))
    return [_number(s) for s in text.split(",") if s.strip()]


def _write_json(obj, path) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _print_if_unwritten(text: str, path) -> None:
    if path is None:
        sys.stdout.write(text)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise UsageError(message)


# -- subcommands --------------------------------------------------------------


def cmd_pressure(a) -> None:
    _require(a.t > 0, "--t must be positive")
    system = system_from_json(_load_json(a.system))
    est = pressure_estimate(system, a.t, a.level, a.truncate)
    _write_json(
        {"t": est.t, "level": est.level, "truncation": est.truncation, "lower": est.lower_value, "upper": est.upper_value},
        a.out,
    )


def cmd_hausdorff(a) -> None:
    _require(a.tol > 0, "--tol must be positive")
    system = system_from_json(_load_json(a.system))
    b = hausdorff_bracket(system, a.level, a.truncate, tol=a.tol)
    _write_json(b.to_json(), a.out)


def _grid(points: int) -> np.ndarray:
    _require(points >= 2, "--points must be at least 2")
    return formulas.theta_grid(points)


def cmd_curve(a) -> None:
    grid = _grid(a.points)
    if a.family == "seq":
        _require(a.p is not None and a.p > 0, "--p must be positive for the seq family")
        base = formulas.seq_curve(a.p, grid)
    elif a.family == "lattice":
        _require(a.p is not None and a.p > 0, "--p must be positive for the lattice family")
        base = formulas.lattice_curve(a.p, a.d, grid)
    else:
        base = formulas.zero_curve(grid)
    curve = base if a.h is None else formulas.combine_max(_h_bracket(a.h, a.d), base)
    text = emit_csv(curve, a.out)
    _print_if_unwritten(text, a.out)


def _h_bracket(h: float, ambient: float) -> DimBracket:
    _require(0 <= h <= ambient, f"--h must lie in [0, {ambient}]")
    return DimBracket(h, h)


def _cf_output(report: cf.CfReport, a) -> None:
    if a.csv:
        emit_csv(report.curve, a.csv)
    _write_json(report.to_json(), a.out)


def cmd_cf(a) -> None:
    ds = digit_set_from_json(_load_json(a.digits))
    if a.h is not None:
        _h_bracket(a.h, 2 if ds.is_complex else 1)
    _cf_output(cf.cf_report(ds, a.level, a.truncate, h=a.h), a)


def cmd_cf_complex(a) -> None:
    ds = ComplexPowerFamily(a.p, a.R)
    if a.h is not None:
        _h_bracket(a.h, 2)
    _cf_output(cf.cf_report(ds, a.level, a.truncate, h=a.h), a)


def cmd_lattice(a) -> None:
    _require(a.p > 0, "--p must be positive")
    if a.theta is not None:
        _require(0 <= a.theta <= 1, "--theta must lie in [0, 1]")
        _write_json({"p": a.p, "d": a.d, "theta": a.theta, "dim": formulas.lattice_dim_theta(a.p, a.d, a.theta)}, a.out)
        return
    text = emit_csv(formulas.lattice_curve(a.p, a.d, _grid(a.points)), a.out)
    _print_if_unwritten(text, a.out)


def cmd_holder(a) -> None:
    rep = formulas.holder_bounds(a.p, a.q, a.hp, a.hq)
    th = rep.theta
    box = np.full_like(th, rep.bound_box)
    if a.out:
        emit_table(
            ("theta", "dim_p", "dim_q", "alpha_bound"),
            (th, rep.curve_p.upper, rep.curve_q.upper, rep.bound),
            a.out,
        )
    if a.svg:
        spec = PlotSpec(
            (
                Series(f"dim_theta F (p={a.p:g})", th, rep.curve_p.upper),
                Series(f"dim_theta F (q={a.q:g})", th, rep.curve_q.upper),
                Series("box bound (p+1)/(q+1)", th, box, "dashed"),
                Series("alpha bound", th, rep.bound),
            ),
            x_label="theta",
            y_label="dimension / exponent bound",
            x_range=(0.0, 1.0),
        )
        emit_svg(spec, a.svg)
    _write_json(
        {
            "p": rep.p,
            "q": rep.q,
            "hp": rep.h_p,
            "hq": rep.h_q,
            "thetaOpt": rep.theta_opt,
            "boundIntermediate": rep.bound_intermediate,
            "boundClosedForm": rep.bound_closed_form,
            "boundBox": rep.bound_box,
            "boundHausdorff": rep.bound_hausdorff,
        },
        a.json,
    )


def cmd_fbm(a) -> None:
    r = formulas.fbm_image_dims(a.h, a.alpha, a.ambient)
    _write_json(
        {
            "h": a.h,
            "alpha": a.alpha,
            "ambient": a.ambient,
            "hausdorffImage": r.hausdorff_image,
            "boxImageStrictlyBelowAmbient": r.box_image_strictly_below_ambient,
            "allEqualAmbient": r.all_equal_ambient,
        },
        a.out,
    )


def cmd_cover_fit(a) -> None:
    _require(a.p > 0, "--p must be positive")
    _require(0 < a.theta <= 1, "--theta must lie in (0, 1]")
    _require(a.s_step > 0, "--s-step must be positive")
    s = cover.fit_dim_theta(a.p, a.d, a.theta, s_step=a.s_step)
    _write_json(
        {"p": a.p, "d": a.d, "theta": a.theta, "fit": s, "closedForm": formulas.lattice_dim_theta(a.p, a.d, a.theta)},
        a.out,
    )


def cmd_boxdim(a) -> None:
    _require(a.p > 0, "--p must be positive")
    obj = cover.SequenceSet(a.p) if a.set == "seq" else cover.LatticeInversion(a.p, a.d)
    deltas = _scale_list(a.deltas, a.num, dyadic=False)
    series = cover.box_count_series(obj, deltas)
    text = emit_csv(series, a.out)
    if a.out is None:
        sys.stdout.write(text)
        return
    b = cover.box_dim_regression(series)
    _write_json({"lower": b.lower, "upper": b.upper, "leastSquares": cover.least_squares_slope(series)}, None)


def cmd_generic(a) -> None:
    _require(0 < a.window <= 1, "--window must lie in (0, 1]")
    spec = generic.RandomSystemSpec(GeometricRatios(), a.d, a.window, a.maps, a.seed)
    scales = None if a.deltas is None else _scale_list(a.deltas, 0, dyadic=True)
    exp = generic.generic_box_dim_experiment(
        spec,
        scales,
        num_samples=a.samples,
        seeds=range(a.seed, a.seed + a.seeds),
        slack=a.slack,
        depth=a.depth,
        density_delta=a.density_delta,
    )
    _write_json(exp.to_json(), a.out)


def cmd_plot(a) -> None:
    series = []
    for path in a.csv:
        header, data = read_csv(path)
        _require(data.shape[1] >= 2, f"{path} needs at least two columns")
        stem = Path(path).stem
        for j in range(1, data.shape[1]):
            label = header[j] if len(a.csv) == 1 else f"{stem}:{header[j]}"
            series.append(Series(label, data[:, 0], data[:, j]))
    _require(bool(series), "nothing to plot")
    spec = PlotSpec(tuple(series), x_label=a.x_label, y_label=a.y_label, title=a.title)
    emit_svg(spec, a.svg)


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="iifs-dim", description="Dimensions of infinitely generated attractors.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("pressure", help="pressure bracket at a single t")
    s.add_argument("--system", required=True, help="system JSON, inline or a file path")
    s.add_argument("--t", type=_number, required=True)
    s.add_argument("--level", type=_positive_int, default=3)
    s.add_argument("--truncate", type=_positive_int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_pressure)

    s = sub.add_parser("hausdorff", help="certified bracket for the Hausdorff dimension")
    s.add_argument("--system", required=True, help="system JSON, inline or a file path")
    s.add_argument("--level", type=_positive_int, default=6)
    s.add_argument("--truncate", type=_positive_int)
    s.add_argument("--tol", type=_number, default=1e-10)
    s.add_argument("--out")
    s.set_defaults(func=cmd_hausdorff)

    s = sub.add_parser("curve", help="intermediate dimension curve as CSV")
    s.add_argument("--family", choices=("seq", "lattice", "zero"), required=True)
    s.add_argument("--p", type=_number)
    s.add_argument("--d", type=_positive_int, default=1)
    s.add_argument("--h", type=_number, help="Hausdorff dimension to combine with")
    s.add_argument("--points", type=int, default=formulas.GRID_POINTS)
    s.add_argument("--out")
    s.set_defaults(func=cmd_curve)

    for name, help_text in (("cf", "report for a real or complex digit set"), ("cf-complex", "report for a complex power family")):
        s = sub.add_parser(name, help=help_text)
        if name == "cf":
            s.add_argument("--digits", required=True, help="digit set JSON, inline or a file path")
            s.set_defaults(func=cmd_cf)
        else:
            s.add_argument("--p", type=_number, required=True)
            s.add_argument("--R", type=_number, default=0.0)
            s.set_defaults(func=cmd_cf_complex)
        s.add_argument("--level", type=_positive_int, default=4)
        s.add_argument("--truncate", type=_positive_int)
        s.add_argument("--h", type=_number, help="use this Hausdorff dimension instead of computing it")
        s.add_argument("--csv", help="also write the curve as CSV")
        s.add_argument("--out")

    s = sub.add_parser("lattice", help="intermediate dimensions of an inverted lattice")
    s.add_argument("--p", type=_number, required=True)
    s.add_argument("--d", type=_positive_int, default=1)
    s.add_argument("--theta", type=_number)
    s.add_argument("--points", type=int, default=formulas.GRID_POINTS)
    s.add_argument("--out")
    s.set_defaults(func=cmd_lattice)

    s = sub.add_parser("holder", help="Hölder exponent bounds between two power-family sets")
    s.add_argument("--p", type=_number, required=True)
    s.add_argument("--q", type=_number, required=True)
    s.add_argument("--hp", type=_number, required=True)
    s.add_argument("--hq", type=_number, required=True)
    s.add_argument("--out", help="CSV of both curves and the bound")
    s.add_argument("--svg")
    s.add_argument("--json", help="summary JSON path (default: stdout)")
    s.set_defaults(func=cmd_holder)

    s = sub.add_parser("fbm", help="image dimensions under fractional Brownian motion")
    s.add_argument("--h", type=_number, required=True)
    s.add_argument("--alpha", type=_number, required=True)
    s.add_argument("--ambient", type=int, choices=(1, 2), default=1)
    s.add_argument("--out")
    s.set_defaults(func=cmd_fbm)

    s = sub.add_parser("cover-fit", help="fit dim_theta of an inverted lattice from its cover cost")
    s.add_argument("--p", type=_number, required=True)
    s.add_argument("--d", type=_positive_int, default=1)
    s.add_argument("--theta", type=_number, required=True)
    s.add_argument("--s-step", type=_number, default=0.005)
    s.add_argument("--out")
    s.set_defaults(func=cmd_cover_fit)

    s = sub.add_parser("boxdim", help="box counts of a sequence set or inverted lattice")
    s.add_argument("--set", choices=("seq", "lattice"), required=True)
    s.add_argument("--p", type=_number, default=1.0)
    s.add_argument("--d", type=_positive_int, default=1)
    s.add_argument("--deltas", default="1e-2:1e-5", help="hi:lo (log-spaced) or a comma list")
    s.add_argument("--num", type=_positive_int, default=16)
    s.add_argument("--out", help="CSV path; the slope bracket then goes to stdout")
    s.set_defaults(func=cmd_boxdim)

    s = sub.add_parser("generic", help="random-translation ensemble experiment")
    s.add_argument("--d", type=_positive_int, default=2)
    s.add_argument("--maps", type=_positive_int, default=generic.DEFAULT_MAPS)
    s.add_argument("--samples", type=_positive_int, default=100_000)
    s.add_argument("--seeds", type=_positive_int, default=10, help="number of seeds")
    s.add_argument("--seed", type=_seed, default=0, help="first seed of the ensemble")
    s.add_argument("--deltas", help="hi:lo (halving) or a comma list; default from the sample budget")
    s.add_argument("--window", type=_number, default=1.0)
    s.add_argument("--slack", type=_number)
    s.add_argument("--depth", type=_positive_int, default=40)
    s.add_argument("--density-delta", type=_number)
    s.add_argument("--out")
    s.set_defaults(func=cmd_generic)

    s = sub.add_parser("plot", help="line chart of CSV columns against the first column")
    s.add_argument("--csv", nargs="+", required=True)
    s.add_argument("--svg", required=True)
    s.add_argument("--x-label", default="theta")
    s.add_argument("--y-label", default="dimension")
    s.add_argument("--title", default="")
    s.set_defaults(func=cmd_plot)
    return p


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        args.func(args)
    except COMPUTATION_ERRORS as exc:
        print(f"iifs-dim: error: {exc}", file=sys.stderr)
        return 1
    except (IifsError, ValueError) as exc:
        print(f"iifs-dim: {exc}", file=sys.stderr)
        return 2
    except argparse.ArgumentTypeError as exc:
        print(f"iifs-dim: {exc}", file=sys.stderr)
        return 2
    return 0


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
