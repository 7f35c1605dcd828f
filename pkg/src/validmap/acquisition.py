"""Acquisition scores, candidate selection, and the active-learning loop.

The loop alternates: score a fresh uniform candidate set under the current
posterior, query the best candidate, append the noisy label, and refresh the
model (full MAP retrain on a schedule, otherwise a fixed-hyperparameter
update). The stopping statistic is the candidate average of the
misclassification probability at zero slack, recorded every iteration from
the posterior used for selection.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .design import candidates as draw_candidates
from .design import lhs, substream
from .domain import Dataset, ResidualOracle, ToleranceSpec
from .exceptions import ConsistencyError, ParameterError
from .gp import GpModel, fit, predict, update
from .kernels import KernelSpec
from .limitstate import folded_cdf_value, folded_mean_var

STRATEGIES = ("mis", "u", "u2", "random")

# Sample count after which full retraining switches to the sparse cadence.
RETRAIN_SWITCH_AT = 100

_SD_FLOOR_REL = 1e-12


def psi_mis_values(mu, sigma, xi: float, omega: float):
    """Misclassification probability of the sign of ``g`` with slack omega.

    Points whose posterior mean classifies them valid (``|mu| <= xi``) score
    ``P(G <= -omega)``; points classified invalid score ``1 - P(G <= omega)``.
    """
    mu = np.asarray(mu, dtype=float)
    inside = np.abs(mu) <= xi
    p_lo = folded_cdf_value(mu, sigma, xi, -omega)
    p_hi = 1.0 - folded_cdf_value(mu, sigma, xi, omega)
    return np.where(inside, p_lo, p_hi)


def psi_mis(model: GpModel, xi: float, omega: float, x):
    """Misclassification-probability score at unit-cube point(s)."""
    ToleranceSpec(xi, omega)
    mean, var = predict(model, np.atleast_2d(x))
    scores = psi_mis_values(mean, np.sqrt(var), xi, omega)
    return float(scores[0]) if np.asarray(x).ndim == 1 else scores


def psi_u_values(mu, sigma, xi: float):
    """Limit-state U-score ``-|mu_g| / sigma_g`` from the folded belief."""
    mean_g, var_g = folded_mean_var(mu, sigma, xi)
    sd_g = np.maximum(np.sqrt(var_g), _SD_FLOOR_REL * xi)
    return -np.abs(mean_g) / sd_g


def psi_u(model: GpModel, xi: float, x):
    """U-function score at unit-cube point(s)."""
    mean, var = predict(model, np.atleast_2d(x))
    scores = psi_u_values(mean, np.sqrt(var), xi)
    return float(scores[0]) if np.asarray(x).ndim == 1 else scores


def _u_score_plain(model: GpModel, X):
    mean, var = predict(model, X)
    sd = np.maximum(np.sqrt(var), _SD_FLOOR_REL * max(1.0, float(np.abs(mean).max())))
    return -np.abs(mean) / sd


def psi_u2(model_low: GpModel, model_up: GpModel, x):
    """Sum of two plain U-scores from GPs on the transformed labels
    ``xi - y`` and ``xi + y``; both models must share training inputs."""
    if not np.array_equal(model_low.data.inputs, model_up.data.inputs):
        raise ConsistencyError("the two U-function models observe different inputs")
    X = np.atleast_2d(x)
    scores = _u_score_plain(model_low, X) + _u_score_plain(model_up, X)
    return float(scores[0]) if np.asarray(x).ndim == 1 else scores


def stopping_pmis(model: GpModel, xi: float, cand) -> float:
    """Candidate-set mean of the zero-slack misclassification probability."""
    cand = np.atleast_2d(cand)
    if cand.shape[0] == 0:
        raise ParameterError("candidate set must be nonempty")
    return float(np.mean(psi_mis(model, xi, 0.0, cand)))


def select_next(strategy, models, cand, rng, *, xi=None, omega=0.0):
    """Pick the next query point from a candidate set.

    ``models`` is a GpModel for strategies "mis"/"u", a ``(low, up)`` pair
    for "u2", and ignored for "random". Ties resolve to the lowest candidate
    index; "random" draws uniformly from ``rng``.
    """
    cand = np.atleast_2d(cand)
    if cand.shape[0] == 0:
        raise ParameterError("candidate set must be nonempty")
    if strategy == "random":
        return cand[int(rng.integers(cand.shape[0]))]
    if strategy == "mis":
        return cand[int(np.argmax(psi_mis(models, xi, omega, cand)))]
    if strategy == "u":
        return cand[int(np.argmax(psi_u(models, xi, cand)))]
    if strategy == "u2":
        low, up = models
        return cand[int(np.argmax(psi_u2(low, up, cand)))]
    raise ParameterError(f"unknown strategy {strategy!r}")


@dataclass(frozen=True)
class CampaignConfig:
    """Settings for one active-learning campaign.

    ``None`` budgets resolve to the dimension defaults ``n_init = 10 d`` and
    ``n_adapt_max = 50 d``; ``omega=None`` resolves to ``0.2 xi``. Setting
    ``stop_alpha`` enables early stopping once the stopping statistic stays
    at or below it for ``stop_k`` consecutive iterations.
    """

    xi: float
    omega: float | None = None
    n_init: int | None = None
    n_adapt_max: int | None = None
    candidate_override: int | None = None
    retrain_every_until: int = 1
    retrain_every_after: int = 4
    stop_alpha: float | None = None
    stop_k: int = 3
    seed: int = 0
    strategy: str = "mis"
    kernel: str | KernelSpec = "full"
    restarts: int = 5

    def __post_init__(self):
        if not (self.xi > 0):
            raise ParameterError("xi must be positive")
        if self.omega is not None:
            ToleranceSpec(self.xi, self.omega)
        if self.n_init is not None and self.n_init < 2:
            raise ParameterError("n_init must be at least 2")
        if self.n_adapt_max is not None and self.n_adapt_max < 0:
            raise ParameterError("n_adapt_max must be nonnegative")
        if self.strategy not in STRATEGIES:
            raise ParameterError(f"unknown strategy {self.strategy!r}")
        if self.stop_alpha is not None and not (0.0 < self.stop_alpha < 1.0):
            raise ParameterError("stop_alpha must lie in (0, 1)")
        if self.stop_k < 1 or self.restarts < 1:
            raise ParameterError("stop_k and restarts must be positive")
        if self.retrain_every_until < 1 or self.retrain_every_after < 1:
            raise ParameterError("retraining cadences must be positive")

    def resolved_omega(self) -> float:
        return 0.2 * self.xi if self.omega is None else self.omega


@dataclass(frozen=True)
class IterationRecord:
    """One observed sample: design-phase records carry ``adaptive_iter=0``
    and no stopping statistic."""

    index: int
    adaptive_iter: int
    x: tuple
    label: float
    p_mis: float
    retrained: bool
    elapsed_s: float


@dataclass
class RunHistory:
    """Per-sample records of a campaign, in observation order."""

    records: list = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def n_adaptive(self) -> int:
        return sum(1 for r in self.records if r.adaptive_iter > 0)


@dataclass
class CampaignResult:
    data: Dataset
    model: GpModel
    history: RunHistory
    stopped_early: bool = False


def run_campaign(
    oracle: ResidualOracle,
    config: CampaignConfig,
    observer=None,
) -> CampaignResult:
    """Run one active-learning campaign against a residual oracle.

    The initial design is a Latin hypercube of ``n_init`` points; every
    adaptive iteration draws a fresh candidate set, records the stopping
    statistic from the posterior used for selection, queries the selected
    point, and refreshes the model (full retrain while at most
    ``RETRAIN_SWITCH_AT`` samples are observed, every
    ``retrain_every_after``-th iteration beyond that, fixed-hyperparameter
    update otherwise). The returned model's hyperparameters are learned on
    the full dataset.

    ``observer(record, posterior)`` is called after each record with a
    callable ``posterior(X) -> (mean, sd)`` over unit-cube points reflecting
    all data observed so far (``None`` while the initial design is still
    incomplete).
    """
    d = oracle.domain.dim
    n_init = 10 * d if config.n_init is None else config.n_init
    n_adapt = 50 * d if config.n_adapt_max is None else config.n_adapt_max
    if n_init < 2:
        raise ParameterError("initial design needs at least 2 points")
    omega = config.resolved_omega()
    xi = config.xi

    rng_init = substream(config.seed, "init")
    rng_cand = substream(config.seed, "candidates")
    rng_fit = substream(config.seed, "restarts")
    rng_sel = substream(config.seed, "select")

    fit_kwargs = dict(kernel=config.kernel, restarts=config.restarts, rng=rng_fit)

    history = RunHistory()
    tic = time.perf_counter()
    X0 = lhs(n_init, d, rng_init)
    y0 = oracle.observe_batch(X0)
    data = Dataset(X0, y0)
    init_elapsed = time.perf_counter() - tic

    is_u2 = config.strategy == "u2"
    if is_u2:
        low = fit(Dataset(X0, xi - y0), **fit_kwargs)
        up = fit(Dataset(X0, xi + y0), **fit_kwargs)
        model = None
    else:
        model = fit(data, **fit_kwargs)

    def posterior(X):
        X = np.atleast_2d(X)
        if is_u2:
            mean_t, var = predict(low, X)
            return xi - mean_t, np.sqrt(var)
        mean, var = predict(model, X)
        return mean, np.sqrt(var)

    for i in range(n_init):
        rec = IterationRecord(
            index=i,
            adaptive_iter=0,
            x=tuple(X0[i]),
            label=float(y0[i]),
            p_mis=float("nan"),
            retrained=(i == n_init - 1),
            elapsed_s=init_elapsed / n_init,
        )
        history.records.append(rec)
        if observer is not None:
            observer(rec, posterior if i == n_init - 1 else None)

    consec = 0
    stopped = False
    last_refresh_was_fit = True
    for t in range(1, n_adapt + 1):
        tic = time.perf_counter()
        C = draw_candidates(d, rng_cand, config.candidate_override)

        if is_u2:
            mean_lo, var_lo = predict(low, C)
            mean_up, var_up = predict(up, C)
            mu_c = xi - mean_lo
            sd_c = np.sqrt(var_lo)
            floor = _SD_FLOOR_REL * xi
            scores = -np.abs(mean_lo) / np.maximum(np.sqrt(var_lo), floor) - np.abs(
                mean_up
            ) / np.maximum(np.sqrt(var_up), floor)
        else:
            mu_c, var_c = predict(model, C)
            sd_c = np.sqrt(var_c)
            if config.strategy == "mis":
                scores = psi_mis_values(mu_c, sd_c, xi, omega)
            elif config.strategy == "u":
                scores = psi_u_values(mu_c, sd_c, xi)
            else:
                scores = None
        p_mis = float(np.mean(psi_mis_values(mu_c, sd_c, xi, 0.0)))

        if config.strategy == "random":
            idx = int(rng_sel.integers(C.shape[0]))
        else:
            idx = int(np.argmax(scores))
        x_star = C[idx]
        y_star = oracle.observe(x_star)
        data = data.append(x_star, y_star)

        n = data.n
        cadence = (
            config.retrain_every_until
            if n <= RETRAIN_SWITCH_AT
            else config.retrain_every_after
        )
        retrain = t % cadence == 0
        if is_u2:
            if retrain:
                low = fit(Dataset(data.inputs, xi - data.labels), **fit_kwargs,
                          warm_start=low.hyper)
                up = fit(Dataset(data.inputs, xi + data.labels), **fit_kwargs,
                         warm_start=up.hyper)
            else:
                low = update(low, (x_star, xi - y_star))
                up = update(up, (x_star, xi + y_star))
        else:
            if retrain:
                model = fit(data, **fit_kwargs, warm_start=model.hyper)
            else:
                model = update(model, (x_star, y_star))
        last_refresh_was_fit = retrain

        rec = IterationRecord(
            index=n_init + t - 1,
            adaptive_iter=t,
            x=tuple(x_star),
            label=float(y_star),
            p_mis=p_mis,
            retrained=retrain,
            elapsed_s=time.perf_counter() - tic,
        )
        history.records.append(rec)
        if observer is not None:
            observer(rec, posterior)

        if config.stop_alpha is not None:
            consec = consec + 1 if p_mis <= config.stop_alpha else 0
            if consec >= config.stop_k:
                stopped = True
                break

    # Final training pass: the returned model's hyperparameters are learned
    # on the complete dataset.
    if is_u2:
        model = fit(data, **fit_kwargs)
    elif not last_refresh_was_fit:
        model = fit(data, **fit_kwargs, warm_start=model.hyper)
    return CampaignResult(data=data, model=model, history=history, stopped_early=stopped)
