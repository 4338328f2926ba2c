"""
bigcpm command line
Subcommands: fit, simulate, bench, discretize, predict, compare
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, List, Optional, Sequence

import numpy as np
import pandas as pd
from dotenv import load_dotenv

from .. import __version__
from ..analysis.compare import ComparisonEngine, comparison_table
from ..analysis.inference import conditional_cdf_table, predict
from ..bench.harness import DESK_GRID, run_grid
from ..bench.scaling import (MEMORY_MIN_M, fit_fixed_exponent_model, fit_loglog_model,
                             write_loglog_tsv, write_models_json, write_records_csv)
from ..config import random_streams
from ..core.link import LinkFamily
from ..core.model import SOLVERS, FitOptions
from ..core.recorder import BenchRecorder
from ..core.serializer import ResultSerializer
from ..discretize.binning import bin_equal_quantile
from ..discretize.report import rounding_report, rounding_table
from ..discretize.rounding import RoundingMode, RoundingScheme, choose_rounding
from ..errors import (ArgumentError, CpmError, DegenerateOutcomeError, InestimableCoefficientError,
                      IngestError, InvalidDatasetError, ModelFitError, SeparationError,
                      SingularHessianError, UnconvergedSubsetError)
from ..simulate.scenarios import Residual, ScenarioSpec, Transform, simulate_dataset
from .runner import FLOAT_FORMAT, build_config, ingest_csv, load_fit, read_covariates, run

logger = logging.getLogger(__name__)

EXIT_UNEXPECTED = 1
EXIT_INPUT = 2
EXIT_FIT = 3
EXIT_OTHER = 4

INPUT_ERRORS = (ArgumentError, IngestError, InvalidDatasetError, DegenerateOutcomeError)
FIT_ERRORS = (SeparationError, SingularHessianError, UnconvergedSubsetError,
              InestimableCoefficientError, ModelFitError)


def _int_list(text: str) -> List[int]:
    try:
        return [int(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'") from None


def _float_list(text: str) -> List[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'") from None


def _add_data_arguments(parser: argparse.ArgumentParser, required: bool = True):
    parser.add_argument("--input", type=Path, required=required, help="CSV file with a header row")
    parser.add_argument("--outcome", required=required, help="Outcome column name")
    parser.add_argument("--predictors", help="Comma-separated predictor columns (default: all others)")


def _add_fit_arguments(parser: argparse.ArgumentParser, defaults: bool = True):
    """Fitting flags; with defaults=False everything is None so a config file can fill it"""
    parser.add_argument("--link", choices=[link.value for link in LinkFamily],
                        default="logit" if defaults else None)
    parser.add_argument("--seed", type=int, default=0 if defaults else None)
    parser.add_argument("--workers", type=int, help="Worker processes for subset fits (env BIGCPM_WORKERS)")
    parser.add_argument("--score-tol", type=float, default=None)
    parser.add_argument("--ll-tol", type=float, default=None)
    parser.add_argument("--max-iter", type=int, default=None)
    parser.add_argument("--solver", choices=SOLVERS, default=None)
    parser.add_argument("--allow-nonpositive", action="store_true", default=None,
                        help="Round non-positive outcomes by magnitude with the sign restored")


def _fit_options(args) -> FitOptions:
    values = {name: getattr(args, name) for name in ("score_tol", "ll_tol", "max_iter", "solver")
              if getattr(args, name, None) is not None}
    return FitOptions(**values)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bigcpm",
                                     description="Cumulative probability models for large datasets")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Warnings and errors only")
    commands = parser.add_subparsers(dest="command", required=True)

    fit = commands.add_parser("fit", help="Fit a CPM to a CSV file")
    fit.add_argument("--config", type=Path, help="key=value file; flags override its values")
    _add_data_arguments(fit, required=False)
    _add_fit_arguments(fit, defaults=False)
    fit.add_argument("--approach", help="whole, divide-combine, bin, round-decimal or round-sigdigit")
    fit.add_argument("--subsets", type=int, help="K for divide-combine")
    fit.add_argument("--target", type=int, help="Target distinct outcomes for bin and round-*")
    fit.add_argument("--output-dir", type=Path)
    fit.add_argument("--predict-at", type=Path, help="CSV of covariate rows to predict at")
    fit.add_argument("--report-edges", help="Comma-separated outcome region edges for a report")
    fit.set_defaults(handler=cmd_fit)

    simulate = commands.add_parser("simulate", help="Draw a dataset from a simulation scenario")
    simulate.add_argument("--n", type=int, required=True)
    simulate.add_argument("--p", type=int, default=10)
    simulate.add_argument("--transform", choices=[t.value for t in Transform], default="identity")
    simulate.add_argument("--residual", choices=[r.value for r in Residual], default="logistic")
    simulate.add_argument("--beta", type=_float_list, help="Comma-separated true coefficients")
    simulate.add_argument("--y0-shift", type=float, help="Shift for the log-shift transform")
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--output", type=Path, required=True, help="CSV to write (y first)")
    simulate.set_defaults(handler=cmd_simulate)

    bench = commands.add_parser("bench", help="Time and memory scaling benchmark")
    bench.add_argument("--ns", type=_int_list, default=DESK_GRID["Ns"])
    bench.add_argument("--ms", type=_int_list, default=DESK_GRID["Ms"])
    bench.add_argument("--ps", type=_int_list, default=DESK_GRID["ps"])
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--solver", choices=SOLVERS, default="banded")
    bench.add_argument("--memory-min-m", type=int,
                       help=f"Smallest M used by the memory model (default {MEMORY_MIN_M}, "
                            "or the grid median when the grid stays below it)")
    bench.add_argument("--no-isolate", action="store_true", help="Measure in this process")
    bench.add_argument("--db", type=Path, help="SQLite ledger (default: <output-dir>/bench.db)")
    bench.add_argument("--output-dir", type=Path, default=Path("bigcpm_bench"))
    bench.set_defaults(handler=cmd_bench)

    discretize = commands.add_parser("discretize", help="Bin or round an outcome column")
    _add_data_arguments(discretize)
    discretize.add_argument("--method", choices=["bin", "round-decimal", "round-sigdigit"],
                            default="round-sigdigit")
    discretize.add_argument("--target", type=int, required=True)
    discretize.add_argument("--seed", type=int, default=0)
    discretize.add_argument("--allow-nonpositive", action="store_true")
    discretize.add_argument("--output", type=Path, help="CSV with the original and discretized outcome")
    discretize.add_argument("--report-edges", type=_float_list)
    discretize.add_argument("--report-schemes",
                            help="Extra schemes for the report, e.g. sigdigit:2:1,decimal:1:5")
    discretize.add_argument("--report-output", type=Path, help="TSV for the report (default: stdout)")
    discretize.set_defaults(handler=cmd_discretize)

    pred = commands.add_parser("predict", help="Conditional mean and median from a saved fit")
    pred.add_argument("--fit", type=Path, required=True, help="fit.json written by 'fit'")
    pred.add_argument("--predict-at", type=Path, required=True)
    pred.add_argument("--output", type=Path, required=True)
    pred.add_argument("--cdf-output", type=Path, help="Long-format conditional CDF table")
    pred.set_defaults(handler=cmd_predict)

    compare = commands.add_parser("compare", help="Compare big-data approaches with the whole-data fit")
    _add_data_arguments(compare)
    _add_fit_arguments(compare)
    compare.add_argument("--subsets", type=int)
    compare.add_argument("--target", type=int)
    compare.add_argument("--seed-sweep", type=int, metavar="N", help="Repeat divide-combine over N seeds")
    compare.add_argument("--output", type=Path, help="CSV for the comparison table")
    compare.set_defaults(handler=cmd_compare)
    return parser


def cmd_fit(args) -> int:
    overrides = {
        "input": args.input, "outcome": args.outcome, "predictors": args.predictors,
        "link": args.link, "approach": args.approach, "subsets": args.subsets,
        "target": args.target, "seed": args.seed, "workers": args.workers,
        "output_dir": args.output_dir, "score_tol": args.score_tol, "ll_tol": args.ll_tol,
        "max_iter": args.max_iter, "solver": args.solver, "predict_at": args.predict_at,
        "report_edges": args.report_edges, "allow_nonpositive": args.allow_nonpositive,
    }
    artifacts = run(build_config(args.config, overrides))
    meta = artifacts.metadata
    print(f"[OK] {meta['approach']} fit: N={meta['N']}, p={meta['p']}, "
          f"M={meta['achieved_M']} (from {meta['original_M']}), converged={meta['converged']}")
    print(f"     results in {artifacts.output_dir}")
    return 0


def cmd_simulate(args) -> int:
    spec = ScenarioSpec(N=args.n, p=args.p, transform=args.transform, residual=args.residual,
                        beta_truth=args.beta, y0_shift=args.y0_shift, seed=args.seed)
    sim = simulate_dataset(spec)
    frame = pd.DataFrame(sim.data.X, columns=sim.data.names)
    frame.insert(0, "y", sim.data.y)
    args.output.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(args.output, index=False)

    truth = {
        "N": spec.N, "p": spec.p, "transform": spec.transform, "residual": spec.residual,
        "link": spec.link, "seed": spec.seed, "beta": sim.beta,
        "y0_shift": sim.alpha_truth.y0_shift, "names": sim.data.names,
    }
    truth_path = args.output.with_suffix(".truth.json")
    truth_path.write_text(ResultSerializer().serialize(truth) + "\n")
    print(f"[OK] wrote {spec.N} rows to {args.output} (truth in {truth_path.name})")
    return 0


def _memory_min_m(args) -> int:
    if args.memory_min_m is not None:
        return args.memory_min_m
    if max(args.ms) >= MEMORY_MIN_M:
        return MEMORY_MIN_M
    return int(np.median(args.ms))


def cmd_bench(args) -> int:
    args.output_dir.mkdir(parents=True, exist_ok=True)
    recorder = BenchRecorder(str(args.db or args.output_dir / "bench.db"))
    records = run_grid(args.ns, args.ms, args.ps, seed=args.seed, solver=args.solver,
                       isolate=not args.no_isolate, recorder=recorder)
    write_records_csv(records, args.output_dir / "records.csv")
    write_loglog_tsv(records, args.output_dir / "loglog.tsv")

    min_M = _memory_min_m(args)
    fits = {
        "time": lambda: fit_loglog_model(records, "time"),
        "memory": lambda: fit_loglog_model(records, "memory", min_M=min_M),
        "time_fixed": lambda: fit_fixed_exponent_model(records, "time", {"N": 1, "M": 1, "p": 1}),
        "memory_fixed": lambda: fit_fixed_exponent_model(records, "memory", {"M-1+p": 2}, min_M=min_M),
    }
    models = {}
    for name, fit in fits.items():
        try:
            models[name] = fit()
        except ModelFitError as exc:
            logger.warning("Skipping %s model: %s", name, exc)
    write_models_json(models, args.output_dir / "models.json")

    for name, model in models.items():
        terms = " * ".join(f"{k}^{v:.3f}" for k, v in model.exponents.items())
        print(f"[OK] {name}: {model.constant:.3e} * {terms}  (R^2={model.r_squared:.4f}, "
              f"n={model.n_records})")
    failed = sum(1 for r in records if r.status != "ok")
    if failed:
        logger.warning("%d of %d cells failed", failed, len(records))
    return 0


def _parse_schemes(text: Optional[str]) -> List[RoundingScheme]:
    """'mode:s[:t]' items separated by commas"""
    schemes = []
    for item in (text or "").split(","):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        if len(parts) not in (2, 3):
            raise ArgumentError(f"Scheme '{item}' is not mode:s[:t]")
        try:
            t = float(parts[2]) if len(parts) == 3 else 1.0
            schemes.append(RoundingScheme(RoundingMode.from_name(parts[0]), int(parts[1]), t))
        except ValueError as exc:
            raise ArgumentError(f"Scheme '{item}': {exc}") from None
    return schemes


def cmd_discretize(args) -> int:
    predictors = args.predictors.split(",") if args.predictors else None
    data = ingest_csv(args.input, args.outcome, predictors)
    if args.method == "bin":
        result = bin_equal_quantile(data.y, args.target, random_streams(args.seed)["binning"])
        values, label = result.y_b, f"bin M_b={result.M_b}"
        scheme = None
    else:
        mode = RoundingMode.DECIMAL if args.method == "round-decimal" else RoundingMode.SIGDIGIT
        scheme, values = choose_rounding(data.y, args.target, mode, args.allow_nonpositive)
        label = scheme.label
    achieved = int(np.unique(values).size)
    print(f"[OK] {label}: {np.unique(data.y).size} -> {achieved} distinct values (target {args.target})")

    if args.output is not None:
        pd.DataFrame({"y": data.y, "y_discretized": values}).to_csv(
            args.output, index=False, float_format="%.17g")
    if args.report_edges:
        extra = _parse_schemes(args.report_schemes)
        if extra:
            table = rounding_table(data.y, ([scheme] if scheme else []) + extra, args.report_edges)
        else:
            table = rounding_report(data.y, values, args.report_edges)
        if args.report_output is not None:
            table.to_csv(args.report_output, sep="\t", index=False, float_format=FLOAT_FORMAT)
        else:
            print(table.to_string(index=False))
    elif args.report_schemes:
        raise ArgumentError("--report-schemes needs --report-edges")
    return 0


def cmd_predict(args) -> int:
    fit = load_fit(args.fit)
    X0 = read_covariates(args.predict_at, fit.names)
    predict(fit, X0, fit.names).to_csv(args.output, index=False, float_format=FLOAT_FORMAT)
    if args.cdf_output is not None:
        conditional_cdf_table(fit, X0).to_csv(args.cdf_output, index=False, float_format=FLOAT_FORMAT)
    print(f"[OK] predictions for {X0.shape[0]} rows in {args.output}")
    return 0


def cmd_compare(args) -> int:
    if args.subsets is None and args.target is None:
        raise ArgumentError("compare needs --subsets and/or --target")
    predictors = args.predictors.split(",") if args.predictors else None
    data = ingest_csv(args.input, args.outcome, predictors)
    engine = ComparisonEngine(args.link, _fit_options(args), args.workers)
    comparison = engine.compare(data, args.subsets, args.target, args.seed, bool(args.allow_nonpositive))
    table = comparison_table(comparison)
    print(table.to_string(index=False))
    for line in comparison.recommendations:
        print(f"  - {line}")
    if args.output is not None:
        table.to_csv(args.output, index=False, float_format=FLOAT_FORMAT)

    if args.seed_sweep:
        if args.subsets is None:
            raise ArgumentError("--seed-sweep needs --subsets")
        sweep = engine.seed_sweep(data, args.subsets, range(args.seed, args.seed + args.seed_sweep))
        for name, spread, ratio in zip(data.names, sweep.spread, sweep.spread_to_se):
            print(f"  {name}: partition SD {spread:.4g} = {ratio:.3f} x SE")
    return 0


def configure_logging(verbose: bool = False, quiet: bool = False):
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format="[%(levelname)s] %(message)s", force=True)


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, INPUT_ERRORS):
        return EXIT_INPUT
    if isinstance(exc, FIT_ERRORS):
        return EXIT_FIT
    if isinstance(exc, CpmError):
        return EXIT_OTHER
    return EXIT_UNEXPECTED


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    handler: Callable = args.handler
    try:
        return handler(args)
    except CpmError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return exit_code_for(exc)
    except KeyboardInterrupt:
        logger.error("Interrupted")
        return 130
    except Exception as exc:
        logger.error("Unexpected error: %s", exc)
        logger.debug("Traceback", exc_info=True)
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())
