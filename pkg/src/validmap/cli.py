"""Command-line entry points.

``validmap run`` executes one configured campaign and writes a results CSV;
``validmap bench`` runs a suite of seeded repetitions and writes results,
summary, and plot-data files; ``validmap report`` prints aggregate scores
for an existing results CSV.

Exit codes: 0 on success, 2 for configuration/schema problems, 1 for runtime
failures. The default output directory is taken from ``$VALIDMAP_OUT`` when
set.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

from .acquisition import CampaignConfig
from .bench.functions import get_case
from .config import load_run_settings
from .exceptions import ConfigError, ValidmapError
from .experiments import (
    read_rows_csv,
    report_text,
    run_experiment,
    run_suite,
    suite_names,
    summarize,
    write_plot_json,
    write_rows_csv,
    write_summary_csv,
)

ENV_OUT_DIR = "VALIDMAP_OUT"


def _out_dir(explicit: str | None) -> Path:
    path = Path(explicit or os.environ.get(ENV_OUT_DIR) or ".")
    path.mkdir(parents=True, exist_ok=True)
    return path


def _cmd_run(args) -> int:
    settings = load_run_settings(args.config)
    if args.seed is not None:
        settings.seed = args.seed
    if args.strategy is not None:
        settings.strategy = args.strategy
    case = get_case(settings.case_id)
    config = CampaignConfig(
        xi=settings.xi if settings.xi is not None else case.xi,
        omega=settings.omega,
        n_init=settings.n_init,
        n_adapt_max=settings.n_adapt,
        candidate_override=settings.candidates,
        retrain_every_until=settings.retrain_every_until,
        retrain_every_after=settings.retrain_every_after,
        stop_alpha=settings.stop_alpha,
        stop_k=settings.stop_k,
        seed=settings.seed,
        strategy=settings.strategy,
        kernel=settings.kernel,
        restarts=settings.restarts,
    )
    tic = time.perf_counter()
    result = run_experiment(
        case,
        config,
        eval_every=settings.eval_every,
        conf_alpha=settings.conf_alpha,
        n_test=settings.test_points,
        sigma_e=settings.sigma_e,
    )
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
    else:
        out = _out_dir(settings.out_dir) / (
            f"run_{case.case_id}_{config.strategy}_s{config.seed}.csv"
        )
    write_rows_csv(out, result.rows)
    print(
        f"wrote {len(result.rows)} rows to {out} "
        f"({time.perf_counter() - tic:.1f}s)",
        file=sys.stderr,
    )
    return 0


def _cmd_bench(args) -> int:
    if args.suite not in suite_names():
        raise ConfigError(
            f"unknown suite {args.suite!r}; available: {', '.join(suite_names())}"
        )
    tic = time.perf_counter()
    rows = run_suite(
        args.suite,
        restarts=args.restarts,
        jobs=args.jobs,
        base_seed=args.seed,
        kernel=args.kernel,
        n_test=args.test_points,
        n_init=args.n_init,
        n_adapt=args.n_adapt,
    )
    out_dir = _out_dir(args.out_dir)
    rows_path = out_dir / f"bench_{args.suite}.csv"
    summary_path = out_dir / f"bench_{args.suite}_summary.csv"
    plot_path = out_dir / f"bench_{args.suite}_plot.json"
    write_rows_csv(rows_path, rows)
    summary = summarize(rows)
    write_summary_csv(summary_path, summary)
    write_plot_json(plot_path, args.suite, summary)
    print(
        f"wrote {rows_path}, {summary_path}, {plot_path} "
        f"({time.perf_counter() - tic:.1f}s)",
        file=sys.stderr,
    )
    return 0


def _cmd_report(args) -> int:
    rows = read_rows_csv(args.results)
    sys.stdout.write(report_text(rows))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="validmap",
        description="Learn locally valid regions of a model by active sampling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one configured campaign")
    run.add_argument("--config", required=True, help="path to a config file")
    run.add_argument("--seed", type=int, help="override the configured seed")
    run.add_argument(
        "--strategy",
        choices=("mis", "u", "u2", "random"),
        help="override the configured strategy",
    )
    run.add_argument("--out", help="results CSV path")
    run.set_defaults(func=_cmd_run)

    bench = sub.add_parser("bench", help="run a benchmark suite")
    bench.add_argument("--suite", required=True, help="suite name (case id)")
    bench.add_argument("--restarts", type=int, required=True,
                       help="seeded repetitions per strategy")
    bench.add_argument("--jobs", type=int, default=1,
                       help="parallel campaign processes")
    bench.add_argument("--seed", type=int, default=1, help="first seed")
    bench.add_argument("--kernel", choices=("full", "matern52"), default="full")
    bench.add_argument("--test-points", type=int, help="test-set size override")
    bench.add_argument("--n-init", type=int, help="initial design override")
    bench.add_argument("--n-adapt", type=int, help="adaptive budget override")
    bench.add_argument("--out-dir", help="output directory")
    bench.set_defaults(func=_cmd_bench)

    report = sub.add_parser("report", help="summarize a results CSV")
    report.add_argument("results", help="results CSV path")
    report.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValidmapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
