"""
Command line front end.

    weightlab build --k 4 --depth 2 --out w4.measure.json
    weightlab eval hilbert --measure w4.measure.json --points points.csv
    weightlab eval maximal --measure w4.measure.json --points points.csv --grid dyadic
    weightlab cantor zeros --rmax 3 --tol 1e-8 --out zeros.json
    weightlab verify all --k 4 --p 2 --depth 2 --json report.json
    weightlab report report.json --out plotdata.csv

Exit codes: 0 pass, 1 check failure, 2 usage error, 3 resource cap.
"""
import sys
import json
import logging
import argparse
from fractions import Fraction
from typing import Optional, Sequence

from ._version import __version__
from .artifact import ArtifactFile, TREE_SUFFIX, dumps, read_points, to_csv
from .cantor import build_cantor_family
from .config import RunConfig
from .constant import CheckName, Closure, ExitCode, GridKind, SignRule, DEFAULT_SCALE_RANGE, TRANSLATED_SUM_K
from .errors import UsageError, WeightLabError
from .grids import grids_for
from .logger_setup import setup_logging
from .maximal import dyadic_maximal, linearize_maximal, maximal_exact
from .measure import PiecewiseMeasure, RationalInterval, as_fraction, fraction_str
from .report import emit_plotdata, reports_from_dict, reports_to_dict
from .transform import hilbert_exact
from .triadic import build_w_k
from .verify import run_suite

logger = logging.getLogger(__name__)

LOG_LEVELS = ("CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG")


def _number(value) -> str:
    if isinstance(value, Fraction):
        return fraction_str(value)
    return repr(float(value))


def _load_measure(path: str) -> PiecewiseMeasure:
    data = ArtifactFile(path).read_json()
    try:
        return PiecewiseMeasure.from_dict(data)
    except (KeyError, TypeError, ValueError) as e:
        raise UsageError(f"'{path}' is not a measure artifact: {e}")


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        ArtifactFile(out).write(text)


# NOTE: commands

def cmd_build(args) -> int:
    tree, w = build_w_k(args.k, args.depth, SignRule(args.sign_rule), Closure(args.closure))
    artifact = ArtifactFile(args.out)
    artifact.write_json(w.to_dict())
    artifact.sibling(TREE_SUFFIX).write_json(tree.to_dict())
    logger.info(f"k={args.k} depth={args.depth}: {len(w)} pieces, total mass {w.total_mass()}, "
                f"sha256 {artifact.hashSHA256}")
    return ExitCode.PASS.value


def cmd_eval_hilbert(args) -> int:
    measure = _load_measure(args.measure)
    rows = []
    for text in read_points(args.points):
        value = hilbert_exact(measure, Fraction(text))
        rows.append((text, _number(value.value), value.kind.value, _number(value.error_bound)))
    _emit(to_csv(("x", "value", "kind", "error_bound"), rows), args.out)
    return ExitCode.PASS.value


def cmd_eval_maximal(args) -> int:
    measure = _load_measure(args.measure)
    grids = grids_for(GridKind(args.grid), tuple(args.scale_range)) if args.grid else None
    header = ("x", "value") + (("grid_value", "grid_upper_bound") if grids else ())
    rows = []
    for text in read_points(args.points):
        x = Fraction(text)
        row = [text, _number(maximal_exact(measure, x))]
        if grids:
            result = dyadic_maximal(measure, x, grids)
            row += [_number(result.value), _number(result.upper_bound)]
        rows.append(row)
    _emit(to_csv(header, rows), args.out)

    if args.linearize is not None:
        if not grids:
            raise UsageError("--linearize needs --grid")
        Q = RationalInterval(as_fraction(args.linearize[0]), as_fraction(args.linearize[1]))
        # one map per grid family; the full grid writes the dyadic and the shifted map
        maps = [linearize_maximal(measure, Q, grid).to_dict() for grid in grids]
        ArtifactFile(args.linearize_out).write_json(maps)
    return ExitCode.PASS.value


def cmd_cantor_zeros(args) -> int:
    family = build_cantor_family(args.rmax, args.tol)
    _emit(dumps(family.to_dict()), args.out)
    return ExitCode.PASS.value


def config_from_args(args) -> RunConfig:
    return RunConfig(
        command="verify",
        k=tuple(args.k), p=tuple(args.p), epsilon=args.epsilon, depth=args.depth,
        r=tuple(args.r), T=args.T, R=args.R, K_max=args.K_max,
        sign_rule=SignRule(args.sign_rule),
        tol=args.tol, quad_tol=args.quad_tol, zero_tol=args.zero_tol,
        samples_per_interval=args.samples, max_residuals=args.max_residuals,
        piece_cap=args.piece_cap, eval_piece_cap=args.eval_piece_cap,
        random_q=args.random_q, q_per_level=args.q_per_level,
        scale_range=tuple(args.scale_range), seed=args.seed,
        json_out=args.json, out=args.plotdata,
        extra={"translated_K": args.translated_K,
               "checks": None if args.check == "all" else [args.check]},
    )


def _fail(error: WeightLabError) -> int:
    logger.error(f"{type(error).__name__}: {error}")
    sys.stderr.write(json.dumps(error.to_dict(), sort_keys=True) + "\n")
    return error.exit_code.value


def run(config: RunConfig) -> int:
    """Run the checks in ``config.extra["checks"]`` (every check when absent) and write the artifacts.

    Returns:
        0 when every report passes, 1 on a failed check, otherwise the exit
        code of the error that stopped the run.
    """
    checks = config.extra.get("checks") or [c.value for c in CheckName]
    try:
        names = [CheckName(c) for c in checks]
    except ValueError as e:
        return _fail(UsageError(str(e)))
    try:
        reports = run_suite(names, config)
    except WeightLabError as e:
        return _fail(e)
    data = reports_to_dict(reports)
    data["config"] = config.to_dict()
    if config.json_out is not None:
        ArtifactFile(config.json_out).write_json(data)
    else:
        sys.stdout.write(dumps(data))
    if config.out is not None:
        emit_plotdata(reports, config.out)
    for report in reports:
        logger.info(f"{report.check.value}: {'pass' if report.passed else 'FAIL'}")
    return ExitCode.PASS.value if data["pass"] else ExitCode.CHECK_FAILURE.value


def cmd_verify(args) -> int:
    return run(config_from_args(args))


def cmd_report(args) -> int:
    reports = []
    for path in args.reports:
        reports.extend(reports_from_dict(ArtifactFile(path).read_json()))
    _emit(emit_plotdata(reports), args.out)
    return ExitCode.PASS.value if all(r.passed for r in reports) else ExitCode.CHECK_FAILURE.value


# NOTE: argument parsing

def _add_verify_options(parser: argparse.ArgumentParser) -> None:
    defaults = RunConfig("verify")
    parser.add_argument("--k", type=int, nargs="+", default=list(defaults.k))
    parser.add_argument("--p", type=Fraction, nargs="+", default=list(defaults.p))
    parser.add_argument("--epsilon", type=Fraction, default=defaults.epsilon)
    parser.add_argument("--depth", type=int, default=defaults.depth)
    parser.add_argument("--r", type=int, nargs="+", default=list(defaults.r))
    parser.add_argument("--T", type=int, default=defaults.T)
    parser.add_argument("--R", type=int, default=defaults.R)
    parser.add_argument("--K-max", dest="K_max", type=int, default=defaults.K_max)
    parser.add_argument("--translated-K", dest="translated_K", type=int, default=TRANSLATED_SUM_K)
    parser.add_argument("--sign-rule", choices=[s.value for s in SignRule], default=defaults.sign_rule.value)
    parser.add_argument("--tol", type=float, default=defaults.tol)
    parser.add_argument("--quad-tol", type=float, default=defaults.quad_tol)
    parser.add_argument("--zero-tol", type=float, default=defaults.zero_tol)
    parser.add_argument("--samples", type=int, default=defaults.samples_per_interval,
                        help="exact sample points per residual interval")
    parser.add_argument("--max-residuals", type=int, default=defaults.max_residuals)
    parser.add_argument("--piece-cap", type=int, default=defaults.piece_cap,
                        help="pieces allowed in a measure that enters quadrature")
    parser.add_argument("--eval-piece-cap", type=int, default=defaults.eval_piece_cap)
    parser.add_argument("--random-q", type=int, default=defaults.random_q)
    parser.add_argument("--q-per-level", type=int, default=defaults.q_per_level)
    parser.add_argument("--scale-range", type=int, nargs=2, default=list(defaults.scale_range))
    parser.add_argument("--seed", type=int, default=defaults.seed)
    parser.add_argument("--json", help="report JSON path; stdout when omitted")
    parser.add_argument("--plotdata", help="plot data CSV path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weightlab", description="Exact weights and inequality checks "
                                                                   "for the Hilbert transform")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-file", help="write the log here instead of stderr")
    parser.add_argument("--log-level", choices=LOG_LEVELS, default="WARNING")
    commands = parser.add_subparsers(dest="command", required=True)

    build = commands.add_parser("build", help="construct w_k at a finite depth")
    build.add_argument("--k", type=int, required=True)
    build.add_argument("--depth", type=int, required=True)
    build.add_argument("--sign-rule", choices=[s.value for s in SignRule], default=SignRule.GREEDY.value)
    build.add_argument("--closure", choices=[c.value for c in Closure], default=Closure.STAGE.value)
    build.add_argument("--out", required=True, help="path ending in .measure.json")
    build.set_defaults(handler=cmd_build)

    evaluate = commands.add_parser("eval", help="evaluate an operator on a stored measure")
    operators = evaluate.add_subparsers(dest="operator", required=True)
    hilbert = operators.add_parser("hilbert")
    maximal = operators.add_parser("maximal")
    for sub in (hilbert, maximal):
        sub.add_argument("--measure", required=True)
        sub.add_argument("--points", required=True, help="CSV whose first column holds rationals")
        sub.add_argument("--out")
    hilbert.set_defaults(handler=cmd_eval_hilbert)
    maximal.add_argument("--grid", choices=[g.value for g in GridKind])
    maximal.add_argument("--scale-range", type=int, nargs=2, default=list(DEFAULT_SCALE_RANGE))
    maximal.add_argument("--linearize", nargs=2, metavar=("A", "B"), help="dump the linearization on [A, B)")
    maximal.add_argument("--linearize-out", default="linearization.json")
    maximal.set_defaults(handler=cmd_eval_maximal)

    cantor = commands.add_parser("cantor", help="Cantor measure utilities")
    cantor_commands = cantor.add_subparsers(dest="operator", required=True)
    zeros = cantor_commands.add_parser("zeros")
    zeros.add_argument("--rmax", type=int, required=True)
    zeros.add_argument("--tol", type=float, default=RunConfig("cantor").zero_tol)
    zeros.add_argument("--out")
    zeros.set_defaults(handler=cmd_cantor_zeros)

    verify = commands.add_parser("verify", help="run inequality checks")
    verify.add_argument("check", choices=["all"] + [c.value for c in CheckName])
    _add_verify_options(verify)
    verify.set_defaults(handler=cmd_verify)

    report = commands.add_parser("report", help="plot data from stored reports")
    report.add_argument("reports", nargs="+")
    report.add_argument("--out")
    report.set_defaults(handler=cmd_report)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_file, getattr(logging, args.log_level))
    try:
        return args.handler(args)
    except WeightLabError as e:
        return _fail(e)
