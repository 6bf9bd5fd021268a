"""First-order Sobol indices from certified metamodel outputs.

Pick-freeze estimation: two independent input samples ``X`` and ``X'`` are
drawn, the output is evaluated at ``X`` and at ``X'`` with coordinate ``i``
replaced by ``X_i``, and the estimator is the empirical correlation-like ratio
of :func:`estimate_sobol`.

With a certified metamodel the true outputs are only known to lie in boxes
``|y_k - y~_k| <= eps_k``; :func:`bound_sobol` encloses every estimator value
compatible with those boxes, and :func:`bootstrap_combined_ci` turns the
enclosures of bootstrap resamples into a confidence interval covering both the
sampling and the metamodel error.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from numpy.typing import NDArray
from typing_extensions import Protocol

from .errors import CertSobolError, ConfigError, DegenerateVariance, DenominatorStraddlesZero
from .interval import Interval, down, up
from .model_full import (
    DEFAULT_DIVERGENCE_CAP,
    FORCING,
    Discretization,
    ParameterPoint,
    output_functional,
    solve_full,
    space_time_output,
)
from .parallel import DEFAULT_CHUNK_SIZE, chunk_slices, thread_map
from .reduced_basis import DEFAULT_BOUND_CAP, OutputKind, ReducedBasis, output_with_bound_batch
from .rng import BOOTSTRAP_STREAM, DESIGN_STREAM, generator

logger = logging.getLogger(__name__)

DEGENERACY_TOL = 1e-14
MAX_UNBOUNDED_SHARE = 0.01
PAIRS_COLUMNS = ("k", "y_tilde", "y_tilde_prime", "eps", "eps_prime")


@dataclass(frozen=True)
class InputRange:
    """Uniform distribution of one input over ``[low, high]``."""

    name: str
    low: float
    high: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.low) and math.isfinite(self.high)):
            raise ConfigError("input range must be finite", name=self.name)
        if self.low > self.high:
            raise ConfigError("input range is reversed", name=self.name, low=self.low, high=self.high)

    def scale(self, unit: NDArray[np.float64]) -> NDArray[np.float64]:
        """Map draws from ``[0, 1)`` onto the range."""
        return self.low + (self.high - self.low) * unit


@dataclass(frozen=True)
class PickFreezeDesign:
    """Two independent samples and the (0-based) index of the frozen input."""

    x_samples: NDArray[np.float64]
    x_prime_samples: NDArray[np.float64]
    frozen_index: int
    seed: int

    def __post_init__(self) -> None:
        if self.x_samples.ndim != 2 or self.x_samples.shape != self.x_prime_samples.shape:
            raise ConfigError("design samples must be two arrays of equal shape (N, p)")
        if len(self.x_samples) < 2:
            raise ConfigError("sample size must be at least 2", N=len(self.x_samples))
        if not 0 <= self.frozen_index < self.n_inputs:
            raise ConfigError("frozen index out of range", index=self.frozen_index, inputs=self.n_inputs)

    @property
    def size(self) -> int:
        return len(self.x_samples)

    @property
    def n_inputs(self) -> int:
        return self.x_samples.shape[1]

    def substituted(self) -> NDArray[np.float64]:
        """``X'`` with its frozen coordinate taken from ``X``."""
        points = self.x_prime_samples.copy()
        points[:, self.frozen_index] = self.x_samples[:, self.frozen_index]
        return points

    def with_index(self, index: int) -> "PickFreezeDesign":
        return PickFreezeDesign(self.x_samples, self.x_prime_samples, index, self.seed)


@dataclass(frozen=True)
class CertifiedPairs:
    """Surrogate outputs at ``X`` and at the substituted points, with their radii."""

    y_tilde: NDArray[np.float64]
    y_tilde_prime: NDArray[np.float64]
    eps: NDArray[np.float64]
    eps_prime: NDArray[np.float64]

    def __post_init__(self) -> None:
        arrays = [np.asarray(getattr(self, name), dtype=np.float64) for name in PAIRS_COLUMNS[1:]]
        if any(a.ndim != 1 for a in arrays) or len({len(a) for a in arrays}) != 1:
            raise ConfigError("pair arrays must be one-dimensional and of equal length")
        if not (np.all(arrays[2] >= 0) and np.all(arrays[3] >= 0)):
            raise ConfigError("radii must be non-negative")
        for name, array in zip(PAIRS_COLUMNS[1:], arrays):
            object.__setattr__(self, name, array)

    def __len__(self) -> int:
        return len(self.y_tilde)

    def take(self, indices: NDArray[np.intp]) -> "CertifiedPairs":
        return CertifiedPairs(
            self.y_tilde[indices], self.y_tilde_prime[indices], self.eps[indices], self.eps_prime[indices]
        )

    def with_zero_radii(self) -> "CertifiedPairs":
        return CertifiedPairs(self.y_tilde, self.y_tilde_prime, np.zeros(len(self)), np.zeros(len(self)))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "k": np.arange(len(self)),
                "y_tilde": self.y_tilde,
                "y_tilde_prime": self.y_tilde_prime,
                "eps": self.eps,
                "eps_prime": self.eps_prime,
            }
        )

    @classmethod
    def from_frame(cls, frame: pd.DataFrame, source: str = "<frame>") -> "CertifiedPairs":
        """Pairs from a table with columns ``k,y_tilde,y_tilde_prime,eps,eps_prime``, ordered by ``k``.

        :raises ConfigError: on a wrong header, non-numeric cells or negative radii
        """
        if tuple(frame.columns) != PAIRS_COLUMNS:
            raise ConfigError("unexpected pairs header", source=source, header=",".join(map(str, frame.columns)))
        try:
            values = frame.to_numpy(dtype=np.float64)
        except (TypeError, ValueError):
            raise ConfigError("non-numeric cell in pairs table", source=source) from None
        values = values[np.argsort(values[:, 0], kind="stable")]
        try:
            return cls(values[:, 1], values[:, 2], values[:, 3], values[:, 4])
        except ConfigError as exc:
            raise exc.with_context(source=source) from None


@dataclass(frozen=True)
class IndexBounds:
    s_min: float
    s_max: float

    def __post_init__(self) -> None:
        if self.s_min > self.s_max:
            raise ValueError("lower index bound exceeds upper bound")

    @property
    def width(self) -> float:
        return self.s_max - self.s_min


@dataclass(frozen=True)
class CombinedCI:
    """Bootstrap interval ``[lo, hi]`` covering sampling and metamodel error.

    ``lo = -inf, hi = inf`` marks an unbounded interval (too many replications
    had a denominator enclosure containing zero).
    """

    lo: float
    hi: float
    alpha: float
    n_boot: int
    unbounded_replications: int = 0

    def __post_init__(self) -> None:
        if not self.lo <= self.hi:
            raise ValueError("confidence interval is reversed")
        if not 0 < self.alpha < 1:
            raise ConfigError("alpha must lie in (0, 1)", alpha=self.alpha)
        if self.n_boot < 2:
            raise ConfigError("at least two bootstrap replications are required", B=self.n_boot)

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.lo) or math.isinf(self.hi)

    @property
    def length(self) -> float:
        return self.hi - self.lo


class CertifiedEvaluator(Protocol):
    """Anything that maps input rows to surrogate outputs and certified radii."""

    def evaluate(self, points: NDArray[np.float64]) -> Tuple[NDArray[np.float64], NDArray[np.float64]]: ...


class ReducedEvaluator:
    """Batched reduced-basis outputs with their certified radii."""

    def __init__(
        self,
        rb: ReducedBasis,
        *,
        output: OutputKind = "final",
        forcing: float = FORCING,
        divergence_cap: float = DEFAULT_DIVERGENCE_CAP,
        bound_cap: float = DEFAULT_BOUND_CAP,
    ) -> None:
        self.rb = rb
        self.output = output
        self.forcing = forcing
        self.divergence_cap = divergence_cap
        self.bound_cap = bound_cap

    def evaluate(self, points: NDArray[np.float64]) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
        f_tilde, eps, _ = output_with_bound_batch(
            self.rb,
            points,
            output=self.output,
            forcing=self.forcing,
            divergence_cap=self.divergence_cap,
            bound_cap=self.bound_cap,
        )
        return f_tilde, eps


class FullEvaluator:
    """The full solver, one point at a time; radii are zero."""

    def __init__(
        self,
        disc: Discretization,
        *,
        output: OutputKind = "final",
        forcing: float = FORCING,
        divergence_cap: float = DEFAULT_DIVERGENCE_CAP,
    ) -> None:
        if output not in ("final", "space_time"):
            raise ConfigError("unknown output functional", output=output)
        self.disc = disc
        self.output = output
        self.forcing = forcing
        self.divergence_cap = divergence_cap

    def evaluate(self, points: NDArray[np.float64]) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
        functional = output_functional if self.output == "final" else space_time_output
        values = np.empty(len(points))
        for row, x in enumerate(points):
            try:
                traj = solve_full(
                    ParameterPoint.from_vector(x),
                    self.disc,
                    forcing=self.forcing,
                    divergence_cap=self.divergence_cap,
                )
            except CertSobolError as exc:
                raise exc.with_context(row=row) from None
            values[row] = functional(traj)
        return values, np.zeros(len(points))


class FunctionEvaluator:
    """Wrap a vectorized function ``f(points) -> outputs`` with a constant or computed radius."""

    def __init__(
        self,
        func: Callable[[NDArray[np.float64]], NDArray[np.float64]],
        radius: Union[float, Callable[[NDArray[np.float64]], NDArray[np.float64]]] = 0.0,
    ) -> None:
        self.func = func
        self.radius = radius

    def evaluate(self, points: NDArray[np.float64]) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
        values = np.asarray(self.func(points), dtype=np.float64)
        if callable(self.radius):
            radii = np.asarray(self.radius(points), dtype=np.float64)
        else:
            radii = np.full(len(points), float(self.radius))
        return values, radii


def generate_design(ranges: Sequence[InputRange], N: int, i: int, seed: int) -> PickFreezeDesign:  # noqa: N803
    """Draw ``X`` and ``X'`` i.i.d. uniform over the product of ``ranges``.

    The draws depend on ``seed`` only, not on ``i``, so the designs of all
    inputs share the same two samples.

    :param ranges: one uniform range per input
    :type ranges: Sequence[InputRange]
    :param N: sample size (at least 2)
    :type N: int
    :param i: 0-based index of the frozen input
    :type i: int
    :param seed: seed of the design stream
    :type seed: int
    :rtype: PickFreezeDesign
    """
    if not ranges:
        raise ConfigError("at least one input range is required")
    if N < 2:
        raise ConfigError("sample size must be at least 2", N=N)
    unit = generator(seed, DESIGN_STREAM).random((2, N, len(ranges)))
    samples = np.empty_like(unit)
    for j, rng_range in enumerate(ranges):
        samples[..., j] = rng_range.scale(unit[..., j])
    return PickFreezeDesign(samples[0], samples[1], i, seed)


def evaluate_points(
    points: NDArray[np.float64],
    model: CertifiedEvaluator,
    *,
    substituted: bool = False,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Outputs and radii at ``points``, evaluated in fixed chunks.

    :raises CertSobolError: evaluator errors, with ``sample_index`` and ``substituted`` in the context
    """

    def run(chunk: slice) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
        try:
            return model.evaluate(points[chunk])
        except CertSobolError as exc:
            row = exc.context.get("row")
            if row is not None:
                exc.with_context(sample_index=chunk.start + row, substituted=substituted)
            raise

    results = thread_map(run, chunk_slices(len(points), chunk_size), threads)
    values = np.concatenate([np.asarray(chunk_values, dtype=np.float64) for chunk_values, _ in results])
    radii = np.concatenate([np.asarray(chunk_radii, dtype=np.float64) for _, chunk_radii in results])
    return values, radii


def evaluate_pairs(
    design: PickFreezeDesign,
    model: CertifiedEvaluator,
    *,
    base: Optional[Tuple[NDArray[np.float64], NDArray[np.float64]]] = None,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> CertifiedPairs:
    """Evaluate the surrogate and its radius at ``X^k`` and at the substituted points.

    ``base`` holds outputs and radii already computed at ``X^k``; they are
    shared by the designs of all inputs, so ``p`` inputs need ``(p + 1) N`` calls.

    :raises CertSobolError: evaluator errors, with ``sample_index`` and ``substituted`` in the context
    """
    if base is None:
        base = evaluate_points(design.x_samples, model, threads=threads, chunk_size=chunk_size)
    y, eps = base
    y_prime, eps_prime = evaluate_points(
        design.substituted(), model, substituted=True, threads=threads, chunk_size=chunk_size
    )
    return CertifiedPairs(y, y_prime, eps, eps_prime)


def _mean(values: NDArray[np.float64]) -> float:
    """Correctly rounded mean, independent of the sample order."""
    return math.fsum(values.tolist()) / len(values)


def estimate_sobol(y: NDArray[np.float64], y_prime: NDArray[np.float64]) -> float:
    """Pick-freeze estimator ``(mean(y y') - mean(y) mean(y')) / (mean(y^2) - mean(y)^2)``.

    :raises DegenerateVariance: if the denominator magnitude is below ``1e-14 * mean(y^2)``
    """
    y = np.asarray(y, dtype=np.float64)
    y_prime = np.asarray(y_prime, dtype=np.float64)
    if y.shape != y_prime.shape or y.ndim != 1 or len(y) < 2:
        raise ValueError("estimate_sobol needs two one-dimensional samples of equal length >= 2")
    mean_y = _mean(y)
    mean_square = _mean(y * y)
    denominator = mean_square - mean_y * mean_y
    if not abs(denominator) > DEGENERACY_TOL * mean_square:
        raise DegenerateVariance("output variance is numerically zero", variance=float(denominator))
    numerator = _mean(y * y_prime) - mean_y * _mean(y_prime)
    return float(numerator / denominator)


def _enclose(values: NDArray[np.float64], radii: NDArray[np.float64], shift: float) -> Interval:
    centred = values - shift
    return Interval(down(down(centred) - radii), up(up(centred) + radii))


def bound_sobol(pairs: CertifiedPairs) -> IndexBounds:
    """Bounds on :func:`estimate_sobol` valid for every output compatible with the radii.

    Numerator and denominator are enclosed with outward-rounded interval
    arithmetic after shifting all outputs by the mean of ``y~`` (the estimator is
    invariant under a common shift).

    :raises DegenerateVariance: if the surrogate outputs themselves have no variance
    :raises DenominatorStraddlesZero: if the variance enclosure contains zero
    """
    estimate_sobol(pairs.y_tilde, pairs.y_tilde_prime)
    shift = _mean(pairs.y_tilde)
    y = _enclose(pairs.y_tilde, pairs.eps, shift)
    y_prime = _enclose(pairs.y_tilde_prime, pairs.eps_prime, shift)

    mean_y = y.mean()
    numerator = (y * y_prime).mean() - mean_y * y_prime.mean()
    denominator = y.square().mean() - mean_y.square()
    if denominator.lo <= 0.0:
        raise DenominatorStraddlesZero(
            "variance enclosure contains zero", lower=float(denominator.lo), upper=float(denominator.hi)
        )
    ratio = numerator / denominator
    return IndexBounds(float(ratio.lo), float(ratio.hi))


def quantile(values: NDArray[np.float64], q: float) -> float:
    """Lower order statistic of rank ``ceil(q * B)`` clamped to ``[1, B]`` (inverse empirical CDF)."""
    ordered = np.sort(np.asarray(values, dtype=np.float64))
    count = len(ordered)
    if count == 0:
        raise ValueError("quantile of an empty array")
    rank = min(max(math.ceil(q * count), 1), count)
    return float(ordered[rank - 1])


def bootstrap_replications(
    pairs: CertifiedPairs,
    B: int,  # noqa: N803
    seed: int,
    *,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Sandwich bounds of ``B`` resamples, each drawn from its own keyed stream.

    A replication whose variance enclosure contains zero (or whose resample has no
    variance at all) contributes ``(-inf, inf)``.
    """
    N = len(pairs)  # noqa: N806

    def run(chunk: slice) -> List[Tuple[float, float]]:
        bounds = []
        for b in range(chunk.start, chunk.stop):
            indices = generator(seed, BOOTSTRAP_STREAM, b).integers(0, N, size=N)
            try:
                resampled = bound_sobol(pairs.take(indices))
            except (DenominatorStraddlesZero, DegenerateVariance):
                bounds.append((-math.inf, math.inf))
            else:
                bounds.append((resampled.s_min, resampled.s_max))
        return bounds

    results = thread_map(run, chunk_slices(B, chunk_size), threads)
    flat = np.array([bound for chunk in results for bound in chunk], dtype=np.float64).reshape(B, 2)
    return flat[:, 0], flat[:, 1]


def bootstrap_combined_ci(
    pairs: CertifiedPairs,
    B: int,  # noqa: N803
    alpha: float,
    seed: int,
    *,
    threads: int = 1,
    max_unbounded_share: float = MAX_UNBOUNDED_SHARE,
) -> CombinedCI:
    """Combined confidence interval ``[q_{alpha/2}(S^m), q_{1-alpha/2}(S^M)]`` over ``B`` resamples.

    Each replication draws one index list with repetition and applies it jointly to
    all four arrays.

    :param pairs: certified pairs of the original sample
    :type pairs: CertifiedPairs
    :param B: number of bootstrap replications (at least 2)
    :type B: int
    :param alpha: risk level in ``(0, 1)``
    :type alpha: float
    :param seed: seed of the bootstrap stream
    :type seed: int
    :return: the interval, unbounded when more than ``max_unbounded_share`` of replications are
    :rtype: CombinedCI
    :raises DegenerateVariance: if the original surrogate outputs have no variance
    """
    if B < 2:
        raise ConfigError("at least two bootstrap replications are required", B=B)
    if not 0 < alpha < 1:
        raise ConfigError("alpha must lie in (0, 1)", alpha=alpha)
    estimate_sobol(pairs.y_tilde, pairs.y_tilde_prime)
    lower, upper = bootstrap_replications(pairs, B, seed, threads=threads)
    unbounded = int(np.sum(np.isinf(lower) | np.isinf(upper)))
    if unbounded:
        logger.debug("%d of %d bootstrap replications are unbounded", unbounded, B)
    if unbounded > max_unbounded_share * B:
        return CombinedCI(-math.inf, math.inf, alpha, B, unbounded)
    return CombinedCI(quantile(lower, alpha / 2), quantile(upper, 1 - alpha / 2), alpha, B, unbounded)


def try_bound_sobol(pairs: CertifiedPairs) -> Optional[IndexBounds]:
    """:func:`bound_sobol`, or ``None`` when the bounds are unbounded."""
    try:
        return bound_sobol(pairs)
    except DenominatorStraddlesZero:
        return None
