"""Command-line front end: ``run``, ``check-tangency`` and ``meta``.

Exit codes: 0 success, 1 numerical failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from pathlib import Path

from . import analysis
from .chernoff import DEFAULT_TANGENCY_TIMES, check_tangency, get_operator
from .config import ExperimentConfig, load_config_file
from .errors import ChernoffLabError, ConfigError, FormatError, InsufficientDataError
from .functions import get_condition

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2

CURVE_COLUMNS = ("condition", "operator", "t", "n", "error")
SUMMARY_COLUMNS = ("condition", "operator", "slope", "intercept", "r2", "excluded_n")
ERROR_COLUMNS = ("condition", "operator", "n", "error_type", "message")

# reference line for the S-operator slopes against the smoothness exponent
REFERENCE_META_SLOPE = -0.684
REFERENCE_META_INTERCEPT = -0.4467

log = logging.getLogger("chernoff_lab")


def _num(x: float) -> str:
    return format(x, ".17g")


def _csv_list(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in _csv_list(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_config(args) -> ExperimentConfig:
    config = ExperimentConfig()
    if args.config:
        config = config.with_overrides(**load_config_file(args.config))
    return config.with_overrides(
        conditions=_csv_list(args.conditions) if args.conditions else None,
        operators=_csv_list(args.operators) if args.operators else None,
        t=args.t,
        n_max=args.n_max,
        grid_count=args.grid_count,
        output_dir=args.out,
        exclude=args.exclude,
    )


def write_outputs(config: ExperimentConfig, results) -> dict[str, list[Path]]:
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    written: dict[str, list[Path]] = {"curves": [], "figures": [], "summary": []}

    for pair in results:
        if pair.curve is None:
            continue
        path = out / f"curve_{get_condition(pair.condition).slug}_{pair.operator}.csv"
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CURVE_COLUMNS)
            for n, d in pair.curve.points:
                writer.writerow((pair.condition, pair.operator, _num(pair.curve.t), n, _num(d)))
        written["curves"].append(path)

    summary = out / "summary.csv"
    with summary.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_COLUMNS)
        for pair in results:
            if pair.fit is None:
                writer.writerow((pair.condition, pair.operator, "", "", "", ""))
                continue
            f = pair.fit
            excluded = ",".join(str(n) for n in sorted(f.excluded_n))
            writer.writerow((pair.condition, pair.operator, _num(f.slope), _num(f.intercept), _num(f.r2), excluded))
    errors = out / "summary_errors.csv"
    with errors.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ERROR_COLUMNS)
        for pair in results:
            if not pair.ok:
                n = "" if pair.failed_n is None else pair.failed_n
                writer.writerow((pair.condition, pair.operator, n, pair.error_type, pair.error))
    written["summary"] += [summary, errors]

    # figures are drawn last so a plotting problem cannot cost the CSVs
    from .plotting import plot_condition

    for condition in config.conditions:
        pairs = [p for p in results if p.condition == condition]
        if any(p.curve is not None for p in pairs):
            path = out / f"loglog_{get_condition(condition).slug}.svg"
            written["figures"].append(plot_condition(condition, pairs, path))
    return written


def cmd_run(args) -> int:
    try:
        config = build_config(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    results = analysis.run_experiment(config)
    write_outputs(config, results)

    print(f"{'condition':<14}{'op':<4}{'slope':>10}{'intercept':>11}{'r2':>8}  excluded")
    for pair in results:
        if pair.ok:
            f = pair.fit
            excl = ",".join(map(str, sorted(f.excluded_n))) or "-"
            print(f"{pair.condition:<14}{pair.operator:<4}{f.slope:>10.4f}{f.intercept:>11.4f}{f.r2:>8.4f}  {excl}")
        else:
            print(f"{pair.condition:<14}{pair.operator:<4}  FAILED: {pair.error}")
    print(f"outputs written to {config.output_dir}")
    return EXIT_OK if all(p.ok for p in results) else EXIT_NUMERIC


def cmd_check_tangency(args) -> int:
    try:
        op = get_operator(args.operator)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_USAGE
    if args.k not in (1, 2):
        print(f"error: order k must be 1 or 2, got {args.k}", file=sys.stderr)
        return EXIT_USAGE
    times = args.t_values or DEFAULT_TANGENCY_TIMES
    if len(times) < 2 or any(not t > 0 for t in times):
        print("error: need at least two positive t values", file=sys.stderr)
        return EXIT_USAGE
    report = check_tangency(op, args.k, times)
    print(f"operator {report.operator}, order k={report.k}")
    print(f"{'t':>10}  residual")
    for t, r in zip(report.times, report.residuals):
        print(f"{t:>10.1e}  {r:.6e}")
    verdict = "PASS" if report.passed else "FAIL"
    print(f"verdict: {verdict} (limiting residual {report.limit:.6g})")
    return EXIT_OK if report.passed else EXIT_NUMERIC


def read_summary(path: Path) -> list[tuple[str, str, float]]:
    """Rows ``(condition, operator, slope)`` of a summary CSV; blank slopes are skipped."""
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        for needed in ("condition", "operator", "slope"):
            if needed not in fields:
                raise FormatError(f"{path}: missing column {needed!r}")
        rows = []
        for lineno, row in enumerate(reader, 2):
            text = (row["slope"] or "").strip()
            if not text:
                continue
            try:
                slope = float(text)
            except ValueError:
                raise FormatError(f"{path}:{lineno}: slope {text!r} is not a number") from None
            rows.append((row["condition"], row["operator"], slope))
    return rows


def cmd_meta(args) -> int:
    try:
        rows = read_summary(args.summary)
    except OSError as exc:
        print(f"error: cannot read {args.summary}: {exc.strerror}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    points = analysis.meta_points(rows, operator=args.operator)
    excluded = args.exclude_alpha if args.exclude_alpha is not None else analysis.META_EXCLUDED
    try:
        fit = analysis.holder_meta_regression(points, excluded)
    except InsufficientDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    used = [(a, s) for a, s in sorted(points) if not any(math.isclose(a, e) for e in excluded)]
    print(f"{args.operator}-operator slope against smoothness exponent alpha")
    for a, s in used:
        print(f"  alpha={a:<6g} slope={s:.4f}")
    print(f"fit:       y = {fit.slope:.4f} x {fit.intercept:+.4f}   R^2 = {fit.r2:.4f}")
    print(f"reference: y = {REFERENCE_META_SLOPE} x {REFERENCE_META_INTERCEPT:+}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chernoff-lab",
        description="Chernoff approximations to the heat equation and their convergence rates.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="compute error curves, fits, CSVs and SVG charts")
    run.add_argument("--config", type=Path, help="key = value config file; flags override it")
    run.add_argument("--conditions", help="comma-separated initial condition names")
    run.add_argument("--operators", help="comma-separated operator names (G, S)")
    run.add_argument("--t", type=float, help="evolution time (default 0.5)")
    run.add_argument("--n-max", type=int, help="largest n (default 11)")
    run.add_argument("--grid-count", type=int, help="measurement grid size (default 1000)")
    run.add_argument("--out", type=Path, help="output directory (default ./results)")
    run.add_argument(
        "--exclude", action="append", metavar="COND:OP:n1,n2",
        help="n values left out of one pair's fit; repeatable, empty list clears the default",
    )
    run.set_defaults(func=cmd_run)

    tan = sub.add_parser("check-tangency", help="numerical Chernoff-tangency order check")
    tan.add_argument("operator", help="G or S")
    tan.add_argument("k", type=int, help="tangency order to test (1 or 2)")
    tan.add_argument("--t-values", type=_float_list, help="comma-separated t values (default 1e-2..1e-6)")
    tan.set_defaults(func=cmd_check_tangency)

    meta = sub.add_parser("meta", help="regress convergence slopes on the smoothness exponent")
    meta.add_argument("summary", type=Path, help="summary.csv written by 'run'")
    meta.add_argument("--operator", default="S", help="operator whose slopes are used (default S)")
    meta.add_argument(
        "--exclude-alpha", type=_float_list,
        help="exponents left out of the fit (default 2.5); pass '' to keep all",
    )
    meta.set_defaults(func=cmd_meta)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ChernoffLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
