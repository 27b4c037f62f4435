"""Seeded replication experiments and CSV reporting.

Replicate ``r`` of sample size ``n`` draws its data from
``RandomStream(seed, r).substream(n, 0)`` and any estimator-internal
randomness from ``.substream(n, 1)``.  All estimators in an experiment thus
see the same samples, and results do not depend on evaluation order.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import integrate

from . import hn_estimators as hn
from .condexp import (
    DEFAULT_MAX_DRAWS,
    BallQuery,
    BivariateNormalSource,
    TrigSource,
    estimate_until_hits,
)
from .distributions import BivariateNormalParams, HalfNormalParams, RandomStream, sample_half_normal
from .errors import BesimcError, DomainError
from .mre_location import MreLocationConfig, mre_location

CSV_HEADER = (
    "experiment", "estimator", "n", "replications", "seed", "mean", "mse", "risk",
    "min", "q1", "median", "q3", "max", "failures",
)
EXPERIMENT_IDS = ("table1", "table2", "table3", "table4", "table5", "custom")
LOSS_KINDS = ("W1", "W2", "W1_prime", "W2_prime", "squared_error")
M_GRID = (10, 20, 30, 50, 100)


@dataclass(frozen=True)
class LossSpec:
    kind: str = "squared_error"

    def __post_init__(self):
        if self.kind not in LOSS_KINDS:
            raise DomainError(f"unknown loss {self.kind!r}; expected one of {LOSS_KINDS}")

    def __call__(self, values, true_params, target=None):
        x = np.asarray(values, dtype=np.float64)
        if self.kind == "squared_error":
            return (x - _truth(true_params, target)) ** 2
        xi, eta = true_params.xi, true_params.eta
        if self.kind in ("W1", "W1_prime"):
            return (x - eta) ** 2 / eta ** 2
        if self.kind == "W2":
            return (x - xi) ** 2 / eta ** 2
        return (x - xi) ** 2


def _truth(true_params, target):
    if isinstance(true_params, (int, float)):
        return float(true_params)
    if target == "location":
        return true_params.xi
    if target == "scale":
        return true_params.eta
    if target == "scale_sq":
        return true_params.eta ** 2
    raise DomainError(f"cannot resolve truth for target {target!r}")


def risk(values, loss, true_params, target=None):
    """Average loss over the replicate estimates."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise DomainError("risk needs at least one value")
    return math.fsum(loss(values, true_params, target)) / values.size


# ---------------------------------------------------------------------------
# estimator registry


@dataclass(frozen=True)
class EstimatorSpec:
    target: str
    default_loss: str
    func: object


def _est(target, loss):
    def wrap(func):
        return EstimatorSpec(target, loss, func)
    return wrap


ESTIMATORS = {
    "unbiased_location": _est("location", "W2")(lambda s, p, st, cfg: hn.unbiased_location(s)),
    "mle_location": _est("location", "W2")(lambda s, p, st, cfg: hn.mle_location(s)),
    "mre_location": _est("location", "W2")(lambda s, p, st, cfg: mre_location(s, cfg.mre, st)),
    "pitman_location": _est("location", "W2_prime")(
        lambda s, p, st, cfg: hn.pitman_location_known_scale(s, p.eta)),
    "unbiased_scale": _est("scale", "W1")(lambda s, p, st, cfg: hn.unbiased_scale(s)),
    "mle_scale": _est("scale", "W1")(lambda s, p, st, cfg: hn.mle_scale(s)),
    "mre_scale": _est("scale", "W1")(lambda s, p, st, cfg: hn.mre_scale(s)),
    "unbiased_scale_sq": _est("scale_sq", "squared_error")(lambda s, p, st, cfg: hn.unbiased_scale_sq(s)),
    "mre_scale_known_location": _est("scale", "W1_prime")(
        lambda s, p, st, cfg: hn.mre_scale_known_location(s, p.xi)),
    "mvue_scale_known_location": _est("scale", "W1_prime")(
        lambda s, p, st, cfg: hn.mvue_scale_known_location(s, p.xi)),
}


# ---------------------------------------------------------------------------
# configuration and reports


@dataclass(frozen=True)
class ExperimentConfig:
    experiment_id: str
    true_params: object
    sample_sizes: tuple
    replications: int
    seed: int
    estimators: tuple = ()
    loss: LossSpec | None = None
    epsilon: float = 0.1
    max_draws: int = DEFAULT_MAX_DRAWS
    mre: MreLocationConfig = field(default_factory=MreLocationConfig)

    def __post_init__(self):
        if self.experiment_id not in EXPERIMENT_IDS:
            raise DomainError(f"unknown experiment {self.experiment_id!r}")
        object.__setattr__(self, "sample_sizes", tuple(int(n) for n in self.sample_sizes))
        object.__setattr__(self, "estimators", tuple(self.estimators))
        if not self.sample_sizes:
            raise DomainError("sample_sizes must be nonempty")
        if int(self.replications) != self.replications or self.replications < 1:
            raise DomainError("replications must be a positive integer")
        RandomStream(self.seed)  # validates the seed range
        unknown = [e for e in self.estimators if e not in ESTIMATORS]
        if unknown:
            raise DomainError(f"unknown estimators: {', '.join(unknown)}")


@dataclass
class ReplicationReport:
    experiment: str
    estimator_id: str
    n: int
    replications: int
    seed: int
    truth: float
    values: np.ndarray
    mean: float
    mse: float
    risk: float
    quantiles: tuple
    failures: int = 0
    errors: list = field(default_factory=list)

    @property
    def variance(self):
        k = self.values.size
        return math.fsum((self.values - self.mean) ** 2) / k if k else math.nan

    @property
    def mean_std_error(self):
        k = self.values.size
        return math.sqrt(self.variance / (k - 1)) if k > 1 else math.nan

    @property
    def mse_std_error(self):
        k = self.values.size
        if k < 2:
            return math.nan
        sq = (self.values - self.truth) ** 2
        return float(np.std(sq, ddof=1)) / math.sqrt(k)


def summarize(experiment, estimator_id, n, replications, seed, truth, values,
              loss, true_params, target, errors=()):
    """Aggregate per-replicate estimates into a report (order independent)."""
    vals = np.sort(np.asarray(values, dtype=np.float64))
    k = vals.size
    if k:
        mean = math.fsum(vals) / k
        mse = math.fsum((vals - truth) ** 2) / k
        rsk = risk(vals, loss, true_params, target)
        quantiles = tuple(float(q) for q in np.quantile(vals, [0.0, 0.25, 0.5, 0.75, 1.0]))
    else:
        mean = mse = rsk = math.nan
        quantiles = (math.nan,) * 5
    return ReplicationReport(
        experiment, estimator_id, n, replications, seed, truth, vals,
        mean, mse, rsk, quantiles, len(errors), list(errors),
    )


def run_replications(config):
    """Run every (sample size, estimator) pair over seeded replications."""
    if not config.estimators:
        raise DomainError("no estimators configured")
    params = config.true_params
    if not isinstance(params, HalfNormalParams):
        raise DomainError("run_replications needs HalfNormalParams")
    reports = []
    for n in config.sample_sizes:
        values = {e: [] for e in config.estimators}
        errors = {e: [] for e in config.estimators}
        for r in range(config.replications):
            base = RandomStream(config.seed, r)
            sample = hn.Sample(sample_half_normal(params, base.substream(n, 0), n))
            aux = base.substream(n, 1)
            for e in config.estimators:
                try:
                    values[e].append(ESTIMATORS[e].func(sample, params, aux, config))
                except BesimcError as exc:
                    errors[e].append((r, type(exc).__name__))
        for e in config.estimators:
            spec = ESTIMATORS[e]
            loss = config.loss or LossSpec(spec.default_loss)
            reports.append(summarize(
                config.experiment_id, e, n, config.replications, config.seed,
                _truth(params, spec.target), values[e], loss, params, spec.target, errors[e],
            ))
    return reports


def trig_conditional_mean(u=0.5, rho=0.5):
    """E[sin(XY) | cos(X^2 + Y^2) = u] for a standard bivariate normal.

    Exact up to quadrature error: the level set is a union of circles
    ``X^2 + Y^2 = s_k`` and each contributes its angular average weighted by
    the density of ``X^2 + Y^2`` at ``s_k`` over ``|sin s_k|``.
    """
    if not -1.0 < u < 1.0:
        raise DomainError("u must lie in (-1, 1)")
    BivariateNormalParams(rho)
    q = 1.0 - rho * rho
    base = math.acos(u)
    num = den = 0.0
    k = 0
    while True:
        roots = [s for s in (2 * math.pi * k - base, 2 * math.pi * k + base) if s > 0]
        # radial density decays at least like exp(-s / (2 (1 + rho)))
        if roots and math.exp(-roots[0] / (2.0 * (1.0 + abs(rho)))) < 1e-18:
            break
        for s in roots:
            def dens(th, s=s):
                return math.exp(-0.5 * s * (1.0 - rho * math.sin(2 * th)) / q)
            jac = 1.0 / abs(math.sin(s))
            num += jac * integrate.quad(lambda th: math.sin(0.5 * s * math.sin(2 * th)) * dens(th),
                                        0.0, 2 * math.pi, limit=200, epsabs=1e-14)[0]
            den += jac * integrate.quad(dens, 0.0, 2 * math.pi, limit=200, epsabs=1e-14)[0]
        k += 1
    return num / den


_CONDEXP = {
    "table1": (BivariateNormalSource, 1.0, lambda rho: 0.5 * 1.0),
    "table2": (TrigSource, 0.5, lambda rho: trig_conditional_mean(0.5, rho)),
}


def run_condexp_experiment(config):
    """Window estimates of E(Y|X=1) (table1) or E(V|U=0.5) (table2).

    ``sample_sizes`` holds the target hit counts ``m``.  Underfilled
    replicates are counted as failures.
    """
    if config.experiment_id not in _CONDEXP:
        raise DomainError("run_condexp_experiment handles table1 and table2 only")
    params = config.true_params
    if not isinstance(params, BivariateNormalParams):
        raise DomainError("conditional expectation experiments need BivariateNormalParams")
    source_cls, center, truth_of = _CONDEXP[config.experiment_id]
    truth = truth_of(params.rho)
    query = BallQuery((center,), config.epsilon)
    loss = config.loss or LossSpec("squared_error")
    reports = []
    for m in config.sample_sizes:
        values, errors = [], []
        for r in range(config.replications):
            source = source_cls(RandomStream(config.seed, r).substream(m), params)
            try:
                values.append(estimate_until_hits(source, query, m, config.max_draws).value)
            except BesimcError as exc:
                errors.append((r, type(exc).__name__))
        reports.append(summarize(
            config.experiment_id, "window_mean", m, config.replications, config.seed,
            truth, values, loss, truth, None, errors,
        ))
    return reports


def run_experiment(config):
    if config.experiment_id in _CONDEXP:
        return run_condexp_experiment(config)
    return run_replications(config)


def table_config(which, seed, replications=None):
    """Preset configuration for one of the five reference tables."""
    hn10_4 = HalfNormalParams(10.0, 4.0)
    presets = {
        1: dict(experiment_id="table1", true_params=BivariateNormalParams(0.5),
                sample_sizes=M_GRID, replications=100),
        2: dict(experiment_id="table2", true_params=BivariateNormalParams(0.5),
                sample_sizes=M_GRID, replications=100),
        3: dict(experiment_id="table3", true_params=hn10_4, sample_sizes=(10, 20, 30, 50, 100),
                replications=100, estimators=("mre_location",)),
        4: dict(experiment_id="table4", true_params=hn10_4, sample_sizes=(100,), replications=100,
                estimators=("unbiased_location", "mle_location", "mre_location")),
        5: dict(experiment_id="table5", true_params=hn10_4, sample_sizes=(10, 20, 30),
                replications=10_000, estimators=("unbiased_scale", "mle_scale", "mre_scale")),
    }
    if which not in presets:
        raise DomainError(f"no table {which!r}; choose from 1-5")
    cfg = ExperimentConfig(seed=seed, **presets[which])
    if replications is not None:
        cfg = replace(cfg, replications=int(replications))
    return cfg


# ---------------------------------------------------------------------------
# output


def _fmt(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".10g")


def format_table(reports):
    if not reports:
        raise DomainError("no reports to emit")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rep in reports:
        writer.writerow([
            rep.experiment, rep.estimator_id, rep.n, rep.replications, rep.seed,
            _fmt(rep.mean), _fmt(rep.mse), _fmt(rep.risk), *(_fmt(q) for q in rep.quantiles),
            rep.failures,
        ])
    return buf.getvalue()


def emit_table(reports, destination):
    """Write reports as CSV to a path or a text stream."""
    text = format_table(reports)
    if hasattr(destination, "write"):
        destination.write(text)
        return
    try:
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write table: {exc.strerror}", str(destination)) from exc
