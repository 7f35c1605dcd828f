"""Seeded experiment execution and result handling.

One experiment = one campaign on a benchmark case, scored against noiseless
ground truth on a held-out quasi-uniform test set every few iterations. Each
observed sample produces one result row; rows serialize to a fixed-schema
CSV (RFC 4180, UTF-8). All randomness derives from the run seed through
named substreams, so a repeated run yields byte-identical output; the CSV
therefore carries a constant 0 in its ``wall_ms`` column and real timings go
to the logs instead.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .acquisition import CampaignConfig, run_campaign
from .bench.functions import BenchmarkCase, get_case
from .bench.metrics import confusion, metrics
from .design import lhs, substream
from .domain import ResidualOracle
from .exceptions import ConfigError, ParameterError
from .limitstate import valid_from_mean, valid_from_quantile

CSV_SCHEMA_VERSION = 1
CSV_COLUMNS = [
    "run_id",
    "seed",
    "strategy",
    "iteration",
    "n_samples",
    "precision",
    "recall",
    "f1",
    "precision_conf",
    "recall_conf",
    "f1_conf",
    "p_mis_est",
    "true_mis_rate",
    "wall_ms",
]

DEFAULT_EVAL_EVERY = 5
DEFAULT_CONF_ALPHA = 0.1


def default_test_count(d: int) -> int:
    """Ground-truth test-set size, ``min(25000 d, 250000)``."""
    return min(25000 * d, 250000)


@dataclass
class EvalRow:
    """One CSV row; metric fields are ``None`` on non-evaluation iterations."""

    run_id: str
    seed: int
    strategy: str
    iteration: int
    n_samples: int
    precision: float | None = None
    recall: float | None = None
    f1: float | None = None
    precision_conf: float | None = None
    recall_conf: float | None = None
    f1_conf: float | None = None
    p_mis_est: float | None = None
    true_mis_rate: float | None = None
    wall_ms: int = 0


@dataclass
class ExperimentResult:
    case_id: str
    config: CampaignConfig
    rows: list
    data: object
    model: object
    history: object
    elapsed_s: float


def make_oracle(
    case: BenchmarkCase, seed: int, sigma_e: float | None = None
) -> ResidualOracle:
    """Build the noisy residual oracle for a case, noise stream keyed to the
    run seed."""
    return ResidualOracle(
        domain=case.domain,
        noise_sd=case.sigma_e if sigma_e is None else sigma_e,
        error_fn=case.error_fn,
        rng=substream(seed, "noise"),
    )


def run_experiment(
    case: BenchmarkCase,
    config: CampaignConfig,
    run_id: str | None = None,
    eval_every: int = DEFAULT_EVAL_EVERY,
    conf_alpha: float = DEFAULT_CONF_ALPHA,
    n_test: int | None = None,
    sigma_e: float | None = None,
) -> ExperimentResult:
    """Run one scored campaign.

    The test set is a Latin hypercube of ``n_test`` points drawn from the
    run's test substream; the mean prediction and its ``1 - conf_alpha``
    confidence variant are scored against noiseless ground truth right after
    the initial fit and after every ``eval_every``-th adaptive sample.
    """
    if eval_every < 1:
        raise ParameterError("eval_every must be positive")
    d = case.dim
    oracle = make_oracle(case, config.seed, sigma_e)
    n_test = default_test_count(d) if n_test is None else n_test
    U_test = lhs(n_test, d, substream(config.seed, "test"))
    gt = config.xi - np.abs(oracle.true_error(U_test)) >= 0.0
    label = run_id or f"{case.case_id}:{config.strategy}:s{config.seed}"

    rows = []

    def observer(record, posterior):
        row = EvalRow(
            run_id=label,
            seed=config.seed,
            strategy=config.strategy,
            iteration=record.adaptive_iter,
            n_samples=record.index + 1,
            p_mis_est=record.p_mis if record.adaptive_iter > 0 else None,
        )
        due = posterior is not None and (
            record.adaptive_iter == 0 or record.adaptive_iter % eval_every == 0
        )
        if due:
            mean, sd = posterior(U_test)
            pred = valid_from_mean(mean, config.xi)
            counts = confusion(pred, gt)
            row.precision, row.recall, row.f1 = metrics(counts)
            row.true_mis_rate = counts.error_rate
            pred_c = valid_from_quantile(mean, sd, config.xi, conf_alpha)
            row.precision_conf, row.recall_conf, row.f1_conf = metrics(
                confusion(pred_c, gt)
            )
        rows.append(row)

    tic = time.perf_counter()
    result = run_campaign(oracle, config, observer=observer)
    elapsed = time.perf_counter() - tic
    return ExperimentResult(
        case_id=case.case_id,
        config=config,
        rows=rows,
        data=result.data,
        model=result.model,
        history=result.history,
        elapsed_s=elapsed,
    )


# ---------------------------------------------------------------------------
# CSV schema
# ---------------------------------------------------------------------------


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def write_rows_csv(path, rows) -> None:
    """Write rows under the fixed schema (header row = column names)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in rows:
            writer.writerow([_format(getattr(r, c)) for c in CSV_COLUMNS])


def read_rows_csv(path) -> list:
    """Read rows back, validating the header against the known schema."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_COLUMNS:
            raise ConfigError(
                f"{path}: header does not match results schema v{CSV_SCHEMA_VERSION}"
            )
        rows = []
        for values in reader:
            if len(values) != len(CSV_COLUMNS):
                raise ConfigError(f"{path}: row has {len(values)} fields")
            kw = dict(zip(CSV_COLUMNS, values))
            rows.append(
                EvalRow(
                    run_id=kw["run_id"],
                    seed=int(kw["seed"]),
                    strategy=kw["strategy"],
                    iteration=int(kw["iteration"]),
                    n_samples=int(kw["n_samples"]),
                    wall_ms=int(kw["wall_ms"]),
                    **{
                        c: (float(kw[c]) if kw[c] != "" else None)
                        for c in CSV_COLUMNS[5:13]
                    },
                )
            )
        return rows


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

NOISE_SUITE_PREFIX = "noise-"
NOISE_SUITE_RATIOS = (0.001, 0.05, 0.5)
SUITE_STRATEGIES = ("mis", "u", "random")


def suite_names() -> list:
    from .bench.functions import case_ids

    return case_ids() + [NOISE_SUITE_PREFIX + "styblinski-tang-2d"]


def _run_job(args) -> list:
    (case_id, strategy, seed, xi, sigma_e, kernel, n_init, n_adapt,
     eval_every, n_test, run_id) = args
    case = get_case(case_id)
    config = CampaignConfig(
        xi=case.xi if xi is None else xi,
        seed=seed,
        strategy=strategy,
        kernel=kernel,
        n_init=n_init,
        n_adapt_max=n_adapt,
    )
    result = run_experiment(
        case,
        config,
        run_id=run_id,
        eval_every=eval_every,
        n_test=n_test,
        sigma_e=sigma_e,
    )
    return result.rows


def run_suite(
    suite: str,
    restarts: int,
    jobs: int = 1,
    base_seed: int = 1,
    kernel: str = "full",
    eval_every: int = DEFAULT_EVAL_EVERY,
    n_test: int | None = None,
    n_init: int | None = None,
    n_adapt: int | None = None,
) -> list:
    """Run a named suite: ``restarts`` seeded repetitions of each strategy
    (or noise ratio), merged deterministically by (strategy, seed, row)."""
    if restarts < 1:
        raise ParameterError("restarts must be positive")
    job_args = []
    if suite.startswith(NOISE_SUITE_PREFIX):
        case_id = suite[len(NOISE_SUITE_PREFIX):]
        case = get_case(case_id)
        levels = noise_levels(case, NOISE_SUITE_RATIOS)
        for ratio, sigma in levels:
            for rep in range(restarts):
                seed = base_seed + rep
                run_id = f"{suite}:ns{ratio:g}:s{seed}"
                job_args.append(
                    (case_id, "mis", seed, None, sigma, kernel,
                     n_init, n_adapt, eval_every, n_test, run_id)
                )
    else:
        get_case(suite)  # validates the id
        for strategy in SUITE_STRATEGIES:
            for rep in range(restarts):
                seed = base_seed + rep
                run_id = f"{suite}:{strategy}:s{seed}"
                job_args.append(
                    (suite, strategy, seed, None, None, kernel,
                     n_init, n_adapt, eval_every, n_test, run_id)
                )

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_job, job_args))
    else:
        results = [_run_job(a) for a in job_args]
    rows = [row for chunk in results for row in chunk]
    rows.sort(key=lambda r: (r.run_id, r.n_samples))
    return rows


def summarize(rows) -> list:
    """Per-(strategy, n_samples) aggregates over evaluation rows.

    Returns dicts with median and 2.5/97.5 percentile bands of the F1 score
    plus median precision/recall, sorted for stable output.
    """
    groups = {}
    for r in rows:
        if r.f1 is None:
            continue
        groups.setdefault((r.strategy, r.n_samples), []).append(r)
    out = []
    for (strategy, n_samples), grp in sorted(groups.items()):
        f1s = np.array([g.f1 for g in grp])
        out.append(
            {
                "strategy": strategy,
                "n_samples": n_samples,
                "runs": len(grp),
                "f1_median": float(np.median(f1s)),
                "f1_lo": float(np.percentile(f1s, 2.5)),
                "f1_hi": float(np.percentile(f1s, 97.5)),
                "precision_median": float(
                    np.median([g.precision for g in grp])
                ),
                "recall_median": float(np.median([g.recall for g in grp])),
            }
        )
    return out


def write_summary_csv(path, summary) -> None:
    fields = [
        "strategy",
        "n_samples",
        "runs",
        "f1_median",
        "f1_lo",
        "f1_hi",
        "precision_median",
        "recall_median",
    ]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(fields)
        for item in summary:
            writer.writerow([_format(item[f]) for f in fields])


def write_plot_json(path, suite: str, summary) -> None:
    """Plot-ready data: per strategy a series of
    ``[n_samples, median F1, lo, hi]``."""
    series = {}
    for item in summary:
        series.setdefault(item["strategy"], []).append(
            [item["n_samples"], item["f1_median"], item["f1_lo"], item["f1_hi"]]
        )
    doc = {
        "suite": suite,
        "schema_version": CSV_SCHEMA_VERSION,
        "series": [
            {"strategy": s, "points": pts} for s, pts in sorted(series.items())
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Reporting
# ---------------------------------------------------------------------------


def report_text(rows) -> str:
    """Mean/final scores per strategy plus the stopping-statistic gap."""
    if not rows:
        return "no rows\n"
    lines = []
    strategies = sorted({r.strategy for r in rows})
    lines.append(
        f"{'strategy':<10} {'mean P':>8} {'mean R':>8} {'mean F1':>8} "
        f"{'final P':>8} {'final R':>8} {'final F1':>8}"
    )
    for strategy in strategies:
        evals = [r for r in rows if r.strategy == strategy and r.f1 is not None]
        if not evals:
            lines.append(f"{strategy:<10} (no evaluation rows)")
            continue
        finals = {}
        for r in evals:
            finals[r.run_id] = r  # rows are ordered; last eval wins
        mean = [
            float(np.mean([getattr(r, f) for r in evals]))
            for f in ("precision", "recall", "f1")
        ]
        final = [
            float(np.mean([getattr(r, f) for r in finals.values()]))
            for f in ("precision", "recall", "f1")
        ]
        lines.append(
            f"{strategy:<10} {mean[0]:8.4f} {mean[1]:8.4f} {mean[2]:8.4f} "
            f"{final[0]:8.4f} {final[1]:8.4f} {final[2]:8.4f}"
        )
    gaps = [
        r.p_mis_est - r.true_mis_rate
        for r in rows
        if r.p_mis_est is not None and r.true_mis_rate is not None
    ]
    if gaps:
        conservative = float(np.mean([g >= 0 for g in gaps]))
        lines.append(
            f"stopping statistic vs true misclassification rate: "
            f"mean gap {float(np.mean(gaps)):+.4f}, "
            f"conservative fraction {conservative:.3f}"
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Noise ablation
# ---------------------------------------------------------------------------

_SIGNAL_MC_SEED = 170_531
_SIGNAL_MC_SIZE = 10**6


def signal_level(case: BenchmarkCase, n: int = _SIGNAL_MC_SIZE) -> float:
    """Monte-Carlo estimate of ``E[f(X)]`` under uniform inputs (fixed seed
    for reproducible noise calibration)."""
    rng = np.random.default_rng(_SIGNAL_MC_SEED)
    X = case.domain.denormalize(rng.uniform(size=(n, case.dim)))
    return float(np.mean(case.fn(X)))


def noise_levels(case: BenchmarkCase, ratios) -> list:
    """Map noise-to-signal ratios ``sigma_e^2 / E[f(X)]^2`` to noise sds."""
    if any(r <= 0 for r in ratios):
        raise ParameterError("noise-to-signal ratios must be positive")
    signal = signal_level(case)
    return [(float(r), abs(signal) * float(np.sqrt(r))) for r in ratios]


def noise_study(
    case: BenchmarkCase,
    ratios,
    seeds,
    kernel: str = "full",
    eval_every: int = DEFAULT_EVAL_EVERY,
    n_test: int | None = None,
    jobs: int = 1,
) -> dict:
    """Campaign score traces under varying noise-to-signal ratios.

    Returns ``{ratio: {"sigma_e", "nt_ratio", "rows"}}`` where ``nt_ratio``
    is the companion noise-to-tolerance ratio ``sigma_e / xi``.
    """
    levels = noise_levels(case, ratios)
    job_args = []
    for ratio, sigma in levels:
        for seed in seeds:
            run_id = f"noise:{case.case_id}:ns{ratio:g}:s{seed}"
            job_args.append(
                (case.case_id, "mis", int(seed), None, sigma, kernel,
                 None, None, eval_every, n_test, run_id)
            )
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_job, job_args))
    else:
        chunks = [_run_job(a) for a in job_args]
    out = {}
    i = 0
    for ratio, sigma in levels:
        rows = []
        for _ in seeds:
            rows.extend(chunks[i])
            i += 1
        out[ratio] = {
            "sigma_e": sigma,
            "nt_ratio": sigma / case.xi,
            "rows": rows,
        }
    return out
