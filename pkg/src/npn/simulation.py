"""Monte Carlo harness for the estimator benchmarks.

Four experiment protocols, each sweeping one knob while everything else is
held at the defaults n = 100, D = 25:

1. sample size   - clean Gaussian data, n swept over a geometric grid.
2. marginals     - a strictly increasing transform applied to the first
                   ceil(alpha * D) columns; alpha swept over [0, 1].
3. outliers      - floor(beta * n) entries per column replaced by +/-5
                   atoms; beta swept.
4. strong dependence - D = 2 with correlation sigma swept toward 1.

Each trial draws a latent correlation matrix (experiments 1-3: a unit
normalized Wishart draw; experiment 4: the fixed 2x2 matrix), computes the
exact mutual information from it, samples Gaussian data, applies the
experiment's corruption, and runs every configured estimator on the same
data. Squared errors are aggregated per (sweep value, estimator).

Random streams are derived from (seed, trial, purpose) only. The sweep
value is deliberately excluded, so sweep points share their draws: the
outlier experiment at beta = 0 reproduces the clean pipeline bit for bit,
and the marginal experiment compares transformed and untransformed runs on
identical data.
"""

from __future__ import annotations

import dataclasses
import enum
import math

import numpy as np
from scipy.special import ndtr

from .errors import DegenerateDraw, DomainError, NotPositiveDefinite, NpnError
from .estimators import EstimatorConfig, EstimatorKind, estimate_mi, true_mi
from .matrix_core import as_symmetric
from .rank_stats import ensure_data_matrix

__all__ = [
    "MarginalTransform",
    "ExperimentId",
    "ExperimentSpec",
    "TrialRecord",
    "MseSummary",
    "sample_correlation_wishart",
    "sample_gaussian",
    "sample_bandable",
    "apply_marginal_transform",
    "inject_outliers",
    "run_experiment",
    "mse_aggregate",
]

_PURPOSE_SIGMA = 0
_PURPOSE_DATA = 1
_PURPOSE_OUTLIERS = 2

_WISHART_RETRIES = 100
_MIN_EIGENVALUE = 1e-10


class MarginalTransform(enum.Enum):
    """Strictly increasing maps applied columnwise in experiment 2."""

    IDENTITY = "identity"
    EXP = "exp"
    CUBIC = "cubic"
    TANH = "tanh"
    SIGMOID = "sigmoid"
    NORMCDF = "normcdf"

    def apply(self, x: np.ndarray) -> np.ndarray:
        if self is MarginalTransform.IDENTITY:
            return np.array(x, dtype=np.float64)
        if self is MarginalTransform.EXP:
            return np.exp(x)
        if self is MarginalTransform.CUBIC:
            return np.power(x, 3)
        if self is MarginalTransform.TANH:
            return np.tanh(x)
        if self is MarginalTransform.SIGMOID:
            return 1.0 / (1.0 + np.exp(-x))
        return ndtr(x)


class ExperimentId(enum.Enum):
    """The four benchmark protocols, numbered as on the command line."""

    SAMPLE_SIZE = 1
    MARGINALS = 2
    OUTLIERS = 3
    SIGMA = 4

    @property
    def sweep_param(self) -> str:
        return {
            ExperimentId.SAMPLE_SIZE: "n",
            ExperimentId.MARGINALS: "alpha",
            ExperimentId.OUTLIERS: "beta",
            ExperimentId.SIGMA: "sigma",
        }[self]


_DEFAULT_SWEEPS = {
    ExperimentId.SAMPLE_SIZE: (32.0, 64.0, 128.0, 256.0, 512.0, 1024.0),
    ExperimentId.MARGINALS: (0.0, 0.25, 0.5, 0.75, 1.0),
    ExperimentId.OUTLIERS: (0.0, 0.1, 0.2, 0.3),
    ExperimentId.SIGMA: (0.0, 0.3, 0.6, 0.9, 0.99, 0.999),
}


def _default_estimators(experiment: ExperimentId) -> tuple[EstimatorConfig, ...]:
    k = 20 if experiment is ExperimentId.OUTLIERS else 2
    return (
        EstimatorConfig(EstimatorKind.GAUSSIAN_PLUGIN),
        EstimatorConfig(EstimatorKind.GAUSS),
        EstimatorConfig(EstimatorKind.RHO),
        EstimatorConfig(EstimatorKind.TAU),
        EstimatorConfig(EstimatorKind.KNN, k=k),
    )


@dataclasses.dataclass(frozen=True)
class ExperimentSpec:
    """Complete, reproducible description of one benchmark run.

    Empty ``sweep`` or ``estimators`` select the experiment's defaults via
    :meth:`resolved`. The sigma experiment always runs at D = 2 regardless
    of ``d``.
    """

    experiment: ExperimentId
    trials: int = 200
    n: int = 100
    d: int = 25
    sweep: tuple[float, ...] = ()
    estimators: tuple[EstimatorConfig, ...] = ()
    transform: MarginalTransform = MarginalTransform.EXP
    seed: int = 0

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError(f"trials must be >= 1, got {self.trials}")
        if self.n < 2:
            raise DomainError(f"sample size must be >= 2, got {self.n}")
        if self.d < 1:
            raise DomainError(f"dimension must be >= 1, got {self.d}")
        if self.seed < 0:
            raise DomainError(f"seed must be a nonnegative integer, got {self.seed}")
        for v in self.sweep:
            self._check_sweep_value(v)

    def _check_sweep_value(self, v: float) -> None:
        if self.experiment is ExperimentId.SAMPLE_SIZE:
            if v != int(v) or v < 2:
                raise DomainError(f"sample-size sweep values must be integers >= 2, got {v}")
        elif self.experiment in (ExperimentId.MARGINALS, ExperimentId.OUTLIERS):
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"sweep fraction must lie in [0, 1], got {v}")
        else:
            if not -1.0 < v < 1.0:
                raise DomainError(f"sigma must lie in (-1, 1), got {v}")

    def resolved(self) -> "ExperimentSpec":
        """Fill in default sweep, estimators, and the D = 2 constraint."""
        changes: dict = {}
        if not self.sweep:
            changes["sweep"] = _DEFAULT_SWEEPS[self.experiment]
        if not self.estimators:
            changes["estimators"] = _default_estimators(self.experiment)
        if self.experiment is ExperimentId.SIGMA and self.d != 2:
            changes["d"] = 2
        return dataclasses.replace(self, **changes) if changes else self


@dataclasses.dataclass(frozen=True)
class TrialRecord:
    """Squared error of one estimator on one trial; inf marks a failed or
    diverged estimate."""

    sweep_value: float
    estimator: EstimatorKind
    squared_error: float
    trial: int


@dataclasses.dataclass(frozen=True)
class MseSummary:
    """Aggregate over the finite trials of one (sweep value, estimator) cell.

    ``mse`` and ``stderr`` are None when no trial was finite;
    ``finite_fraction`` is always defined.
    """

    sweep_value: float
    estimator: EstimatorKind
    mse: float | None
    stderr: float | None
    finite_fraction: float
    trials: int


def _stream(seed: int, trial: int, purpose: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=(seed, trial, purpose)))


def sample_correlation_wishart(d: int, rng: np.random.Generator) -> np.ndarray:
    """Random correlation matrix from a unit-normalized Wishart draw.

    Draws G with d x d independent standard normal entries, forms
    W = G G^T (a Wishart matrix with d degrees of freedom), and rescales to
    unit diagonal. Draws whose smallest eigenvalue falls below 1e-10 are
    rejected and resampled so that the implied mutual information stays
    finite.

    Raises
    ------
    DegenerateDraw
        If 100 consecutive draws are rejected.
    """
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    for _ in range(_WISHART_RETRIES):
        g = rng.standard_normal((d, d))
        w = g @ g.T
        scale = np.sqrt(np.diag(w))
        if np.any(scale == 0.0):
            continue
        corr = as_symmetric(w / np.outer(scale, scale))
        np.fill_diagonal(corr, 1.0)
        if np.linalg.eigvalsh(corr)[0] >= _MIN_EIGENVALUE:
            return corr
    raise DegenerateDraw(
        f"no well-conditioned Wishart correlation in {_WISHART_RETRIES} draws (D={d})"
    )


def sample_gaussian(s, n: int, rng: np.random.Generator) -> np.ndarray:
    """n i.i.d. rows from N(0, s) via the Cholesky factor of s."""
    mat = as_symmetric(s)
    if n < 1:
        raise DomainError(f"sample size must be >= 1, got {n}")
    try:
        chol = np.linalg.cholesky(mat)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"covariance is not positive definite: {exc}") from exc
    return rng.standard_normal((n, mat.shape[0])) @ chol.T


def sample_bandable(c: float, d: int, rng: np.random.Generator, boundary: bool = False) -> np.ndarray:
    """Random symmetric unit-diagonal matrix with ``|M[i,j]| <= c**|i-j|``.

    With ``boundary=True`` the entries equal the bound exactly (all
    positive), which is the extremal case for the Gershgorin eigenvalue
    bounds; otherwise each off-diagonal magnitude and sign is drawn
    uniformly under the bound.
    """
    if not 0.0 < c < 1.0:
        raise DomainError(f"bandable decay c must lie in (0, 1), got {c}")
    idx = np.arange(d)
    bound = np.power(c, np.abs(idx[:, None] - idx[None, :]))
    if boundary:
        m = bound.copy()
        np.fill_diagonal(m, 1.0)
        return m
    raw = rng.uniform(0.0, 1.0, (d, d)) * rng.choice((-1.0, 1.0), size=(d, d)) * bound
    upper = np.triu(raw, 1)
    return upper + upper.T + np.eye(d)


def apply_marginal_transform(x, alpha: float, transform: MarginalTransform) -> np.ndarray:
    """Apply ``transform`` to every column j with j < alpha * D (0-indexed).

    alpha = 0 leaves the matrix untouched and alpha = 1 transforms every
    column; the boundary uses strict inequality.
    """
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    m = ensure_data_matrix(x).copy()
    cols = np.arange(m.shape[1]) < alpha * m.shape[1]
    if np.any(cols):
        m[:, cols] = transform.apply(m[:, cols])
    return m


def inject_outliers(x, beta: float, rng: np.random.Generator) -> np.ndarray:
    """Replace floor(beta * n) entries per column with +/-5 atoms.

    Row subsets are drawn without replacement, independently per column,
    and each replaced entry is -5 or +5 with equal probability.
    """
    if not 0.0 <= beta <= 1.0:
        raise DomainError(f"beta must lie in [0, 1], got {beta}")
    m = ensure_data_matrix(x).copy()
    n, d = m.shape
    count = int(math.floor(beta * n + 1e-12))
    if count == 0:
        return m
    for j in range(d):
        rows = rng.choice(n, size=count, replace=False)
        m[rows, j] = rng.choice((-5.0, 5.0), size=count)
    return m


def _draw_trial_sigma(spec: ExperimentSpec, sweep_value: float, trial: int) -> np.ndarray:
    if spec.experiment is ExperimentId.SIGMA:
        return np.array([[1.0, sweep_value], [sweep_value, 1.0]])
    rng = _stream(spec.seed, trial, _PURPOSE_SIGMA)
    return sample_correlation_wishart(spec.d, rng)


def _draw_trial_data(spec: ExperimentSpec, sigma: np.ndarray, sweep_value: float, trial: int) -> np.ndarray:
    n = int(sweep_value) if spec.experiment is ExperimentId.SAMPLE_SIZE else spec.n
    rng = _stream(spec.seed, trial, _PURPOSE_DATA)
    x = sample_gaussian(sigma, n, rng)
    if spec.experiment is ExperimentId.MARGINALS:
        return apply_marginal_transform(x, sweep_value, spec.transform)
    if spec.experiment is ExperimentId.OUTLIERS:
        return inject_outliers(x, sweep_value, _stream(spec.seed, trial, _PURPOSE_OUTLIERS))
    return x


def run_experiment(spec: ExperimentSpec) -> list[MseSummary]:
    """Run one benchmark protocol and aggregate squared errors.

    Every configured estimator sees the same corrupted data within a
    trial; the squared error is measured against the exact mutual
    information of the latent correlation matrix the trial was generated
    from. Per-trial estimator failures are recorded as infinite errors
    rather than aborting the sweep, and the result is bit-reproducible for
    a fixed spec.
    """
    spec = spec.resolved()
    records: list[TrialRecord] = []
    for sweep_value in spec.sweep:
        for trial in range(spec.trials):
            try:
                sigma = _draw_trial_sigma(spec, sweep_value, trial)
                truth = true_mi(sigma)
                data = _draw_trial_data(spec, sigma, sweep_value, trial)
            except NpnError:
                for cfg in spec.estimators:
                    records.append(TrialRecord(sweep_value, cfg.kind, math.inf, trial))
                continue
            for cfg in spec.estimators:
                try:
                    est = estimate_mi(data, cfg)
                    err = math.inf if est.is_infinite else (est.value - truth) ** 2
                except NpnError:
                    err = math.inf
                records.append(TrialRecord(sweep_value, cfg.kind, err, trial))
    return mse_aggregate(records)


def mse_aggregate(records: list[TrialRecord]) -> list[MseSummary]:
    """Group records by (sweep value, estimator) and summarize.

    ``mse`` is the mean of the finite squared errors and ``stderr`` their
    sample standard deviation divided by sqrt(count) (zero for a single
    finite trial). A cell with no finite trial still yields a summary, with
    ``mse`` and ``stderr`` absent and ``finite_fraction`` zero. Group order
    follows first appearance in ``records``.
    """
    if not records:
        raise DomainError("mse_aggregate needs at least one record")
    groups: dict[tuple[float, EstimatorKind], list[float]] = {}
    for rec in records:
        groups.setdefault((rec.sweep_value, rec.estimator), []).append(rec.squared_error)
    out: list[MseSummary] = []
    for (sweep_value, estimator), errs in groups.items():
        finite = [e for e in errs if math.isfinite(e)]
        total = len(errs)
        if finite:
            arr = np.asarray(finite)
            mse = float(np.mean(arr))
            stderr = float(np.std(arr, ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
        else:
            mse = None
            stderr = None
        out.append(
            MseSummary(
                sweep_value=sweep_value,
                estimator=estimator,
                mse=mse,
                stderr=stderr,
                finite_fraction=len(finite) / total,
                trials=total,
            )
        )
    return out
