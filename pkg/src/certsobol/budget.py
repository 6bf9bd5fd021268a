"""Choice of the sample size ``N`` and the basis size ``n`` for a target precision.

The mean combined-interval length is modelled as::

    precision(N, n) = 2 q sigma / sqrt(N) + C / a^n

where the first term is the sampling part and the second the metamodel part.
The online cost of a sensitivity run is ``N * n^3`` (``N`` reduced solves with
dense ``n x n`` linear algebra), and :func:`optimize_budget` minimizes it
subject to ``precision(N, n) <= p``.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import minimize_scalar
from scipy.special import expit
from scipy.stats import norm

from .errors import ConfigError, FitFailed, InfeasibleRounding

logger = logging.getLogger(__name__)

MIN_SAMPLE_SIZE = 2
MAX_BASIS_SIZE = 10_000
_LOGIT_SPAN = 40.0
_SCAN_POINTS = 4001


def normal_quantile(alpha: float) -> float:
    """Standard gaussian ``1 - alpha/2`` quantile."""
    if not 0 < alpha < 1:
        raise ConfigError("alpha must lie in (0, 1)", alpha=alpha)
    return float(norm.ppf(1.0 - alpha / 2.0))


@dataclass(frozen=True)
class PrecisionModel:
    """Fitted constants of the precision model."""

    sigma: float
    c_meta: float
    a_meta: float
    q_alpha: float

    def __post_init__(self) -> None:
        if not self.sigma >= 0:
            raise ConfigError("sigma must be non-negative", sigma=self.sigma)
        if not self.c_meta > 0:
            raise ConfigError("C must be positive", c_meta=self.c_meta)
        if not self.a_meta > 1:
            raise ConfigError("a must exceed 1", a_meta=self.a_meta)
        if not self.q_alpha > 0:
            raise ConfigError("q_alpha must be positive", q_alpha=self.q_alpha)

    @classmethod
    def from_alpha(cls, sigma: float, c_meta: float, a_meta: float, alpha: float) -> "PrecisionModel":
        return cls(sigma=sigma, c_meta=c_meta, a_meta=a_meta, q_alpha=normal_quantile(alpha))

    def sampling_term(self, N: float) -> float:  # noqa: N803
        return 2.0 * self.q_alpha * self.sigma / math.sqrt(N)

    def metamodel_term(self, n: float) -> float:
        return self.c_meta * math.exp(-n * math.log(self.a_meta))

    def precision(self, N: float, n: float) -> float:  # noqa: N803
        return self.sampling_term(N) + self.metamodel_term(n)

    def to_record(self) -> Dict[str, float]:
        return {"sigma": self.sigma, "c_meta": self.c_meta, "a_meta": self.a_meta, "q_alpha": self.q_alpha}


@dataclass(frozen=True)
class BenchmarkRecords:
    """Outcome of a benchmark run.

    ``widths[j]`` is the mean sandwich width over the inputs at basis size ``n_values[j]``;
    ``ci_lengths[j]`` is the mean bootstrap interval length at zero radii for sample size
    ``sample_sizes[j]``.
    """

    n_values: NDArray[np.float64]
    widths: NDArray[np.float64]
    sample_sizes: NDArray[np.float64]
    ci_lengths: NDArray[np.float64]


@dataclass(frozen=True)
class ContinuousSolution:
    """Optimum of the relaxed problem, parametrized by the metamodel share ``m``."""

    m: float
    n: float
    N: float
    cost: float


@dataclass(frozen=True)
class BudgetSolution:
    n_star: int
    N_star: int
    achieved_precision: float
    cost: int
    continuous: Optional[ContinuousSolution] = None

    def to_record(self) -> Dict[str, float]:
        record: Dict[str, float] = {
            "n_star": self.n_star,
            "N_star": self.N_star,
            "achieved_precision": self.achieved_precision,
            "cost": self.cost,
        }
        if self.continuous is not None:
            record.update(
                continuous_m=self.continuous.m,
                continuous_n=self.continuous.n,
                continuous_N=self.continuous.N,
                continuous_cost=self.continuous.cost,
            )
        return record


def fit_precision_model(bench: BenchmarkRecords, alpha: float) -> PrecisionModel:
    """Fit ``C`` and ``a`` by least squares on ``log(width)`` versus ``n``, and ``sigma`` from interval lengths.

    :param bench: benchmark records with at least three distinct basis sizes and one sample size
    :type bench: BenchmarkRecords
    :param alpha: risk level
    :type alpha: float
    :rtype: PrecisionModel
    :raises ConfigError: if the records are too few
    :raises FitFailed: if the widths do not decay with ``n``
    """
    n_values = np.asarray(bench.n_values, dtype=np.float64)
    widths = np.asarray(bench.widths, dtype=np.float64)
    if len(np.unique(n_values)) < 3 or len(n_values) != len(widths):
        raise ConfigError("the fit needs sandwich widths for at least three distinct basis sizes")
    sample_sizes = np.asarray(bench.sample_sizes, dtype=np.float64)
    ci_lengths = np.asarray(bench.ci_lengths, dtype=np.float64)
    if len(sample_sizes) < 1 or len(sample_sizes) != len(ci_lengths):
        raise ConfigError("the fit needs at least one sampling interval length")
    if not np.all(widths > 0) or not np.all(np.isfinite(widths)):
        raise FitFailed("sandwich widths must be positive and finite")

    slope, intercept = np.polyfit(n_values, np.log(widths), 1)
    if slope >= 0:
        raise FitFailed("sandwich widths do not decay with the basis size", slope=float(slope))
    q_alpha = normal_quantile(alpha)
    sigma = float(np.mean(ci_lengths * np.sqrt(sample_sizes) / (2.0 * q_alpha)))
    model = PrecisionModel(sigma=sigma, c_meta=float(np.exp(intercept)), a_meta=float(np.exp(-slope)), q_alpha=q_alpha)
    logger.debug("fitted precision model %s", model)
    return model


def continuous_basis_size(model: PrecisionModel, m: float) -> float:
    """Basis size at which the metamodel term equals ``m`` (at least 1)."""
    return max(1.0, math.log(model.c_meta / m) / math.log(model.a_meta))


def continuous_sample_size(model: PrecisionModel, p: float, m: float) -> float:
    """Sample size at which the sampling term equals ``p - m`` (at least 2)."""
    return max(float(MIN_SAMPLE_SIZE), (2.0 * model.q_alpha * model.sigma / (p - m)) ** 2)


def _relaxed_cost(model: PrecisionModel, p: float, t: float) -> float:
    m = p * float(expit(t))
    if not 0 < m < p:
        return math.inf
    return continuous_sample_size(model, p, m) * continuous_basis_size(model, m) ** 3


def optimize_continuous(model: PrecisionModel, p: float) -> ContinuousSolution:
    """Minimize ``N(m) n(m)^3`` over the metamodel share ``m`` in ``(0, p)``.

    The share is searched as ``m = p * expit(t)``: a dense scan over ``t`` locates the
    basin, a bounded scalar search refines it.
    """
    grid = np.linspace(-_LOGIT_SPAN, _LOGIT_SPAN, _SCAN_POINTS)
    costs = np.array([_relaxed_cost(model, p, t) for t in grid])
    best = int(np.argmin(costs))
    lower = grid[max(best - 1, 0)]
    upper = grid[min(best + 1, len(grid) - 1)]
    result = minimize_scalar(
        lambda t: _relaxed_cost(model, p, t), bounds=(lower, upper), method="bounded", options={"xatol": 1e-10}
    )
    t_star = float(result.x) if result.fun <= costs[best] else float(grid[best])
    m = p * float(expit(t_star))
    n = continuous_basis_size(model, m)
    N = continuous_sample_size(model, p, m)  # noqa: N806
    return ContinuousSolution(m=m, n=n, N=N, cost=N * n**3)


def minimal_sample_size(model: PrecisionModel, p: float, n: int) -> Optional[int]:
    """Smallest integer ``N >= 2`` with ``precision(N, n) <= p``, or ``None`` if there is none."""
    meta = model.metamodel_term(n)
    if model.sigma == 0:
        return MIN_SAMPLE_SIZE if meta <= p else None
    slack = p - meta
    if not slack > 0:
        return None
    target = (2.0 * model.q_alpha * model.sigma / slack) ** 2
    if not math.isfinite(target):
        return None
    N = max(MIN_SAMPLE_SIZE, math.ceil(target))  # noqa: N806
    while model.precision(N, n) > p:
        N += 1  # noqa: N806
    return N


def optimize_budget(model: PrecisionModel, p: float, *, max_basis_size: int = MAX_BASIS_SIZE) -> BudgetSolution:
    """Cheapest integer ``(N*, n*)`` whose predicted precision does not exceed ``p``.

    The relaxed optimum is computed first and reported alongside. The integer
    solution comes from a scan over ``n`` starting at the smallest feasible basis
    size; for each ``n`` the smallest feasible ``N`` is exact, and the scan stops
    once ``max(2, (2 q sigma / p)^2) n^3`` exceeds the best cost found.

    :raises ConfigError: if ``p`` is not positive
    :raises InfeasibleRounding: if no basis size up to ``max_basis_size`` is feasible
    """
    if not p > 0:
        raise ConfigError("target precision must be positive", p=p)
    continuous = optimize_continuous(model, p)

    first = math.ceil(math.log(model.c_meta / p) / math.log(model.a_meta)) if model.c_meta > p else 1
    first = max(first, 1)
    if first > max_basis_size:
        raise InfeasibleRounding("no admissible basis size reaches the target precision", p=p, n_min=first)
    floor_n = max(float(MIN_SAMPLE_SIZE), (2.0 * model.q_alpha * model.sigma / p) ** 2)

    best: Optional[BudgetSolution] = None
    for n in range(first, max_basis_size + 1):
        if best is not None and floor_n * n**3 >= best.cost:
            break
        N = minimal_sample_size(model, p, n)  # noqa: N806
        if N is None:
            continue
        cost = N * n**3
        if best is None or cost < best.cost:
            best = BudgetSolution(n, N, model.precision(N, n), cost, continuous)
    if best is None:
        raise InfeasibleRounding("no admissible basis size reaches the target precision", p=p)
    logger.debug("budget for p=%g: N*=%d n*=%d", p, best.N_star, best.n_star)
    return best
