import itertools
import math
from typing import Tuple

import numpy as np
import pytest

from certsobol.errors import ConfigError, DegenerateVariance, DenominatorStraddlesZero, SolverDiverged
from certsobol.sobol import (
    CertifiedPairs,
    CombinedCI,
    FunctionEvaluator,
    InputRange,
    PickFreezeDesign,
    bootstrap_combined_ci,
    bootstrap_replications,
    bound_sobol,
    estimate_sobol,
    evaluate_pairs,
    evaluate_points,
    generate_design,
    quantile,
    try_bound_sobol,
)

UNIT_RANGES = [InputRange("x1", 0.0, 1.0), InputRange("x2", 0.0, 1.0)]


def linear_model(points: np.ndarray) -> np.ndarray:
    return points[:, 0] + 2.0 * points[:, 1]


def vectorized_estimate(y: np.ndarray, y_prime: np.ndarray) -> np.ndarray:
    mean_y = y.mean(axis=-1)
    numerator = (y * y_prime).mean(axis=-1) - mean_y * y_prime.mean(axis=-1)
    return numerator / ((y * y).mean(axis=-1) - mean_y * mean_y)


def random_pairs(N: int, seed: int, radius: float = 0.05) -> CertifiedPairs:
    rng = np.random.default_rng(seed)
    y = rng.normal(size=N)
    y_prime = 0.6 * y + 0.8 * rng.normal(size=N)
    return CertifiedPairs(y, y_prime, rng.uniform(0, radius, N), rng.uniform(0, radius, N))


def linear_pairs(N: int, seed: int, index: int = 0) -> CertifiedPairs:
    design = generate_design(UNIT_RANGES, N, index, seed)
    return evaluate_pairs(design, FunctionEvaluator(linear_model))


def test_input_range() -> None:
    assert InputRange("nu", 1.0, 20.0).scale(np.array([0.0, 0.5])).tolist() == [1.0, 10.5]
    with pytest.raises(ConfigError):
        InputRange("nu", 2.0, 1.0)
    with pytest.raises(ConfigError):
        InputRange("nu", 0.0, math.inf)


def test_generate_design() -> None:
    ranges = [InputRange("nu", 1.0, 20.0), InputRange("u0m", -0.3, 0.3)]
    design = generate_design(ranges, 50, 1, seed=7)
    assert design.size == 50
    assert design.n_inputs == 2
    assert np.all((design.x_samples[:, 0] >= 1.0) & (design.x_samples[:, 0] <= 20.0))
    assert np.all(np.abs(design.x_prime_samples[:, 1]) <= 0.3)

    substituted = design.substituted()
    assert np.array_equal(substituted[:, 1], design.x_samples[:, 1])
    assert np.array_equal(substituted[:, 0], design.x_prime_samples[:, 0])

    other = generate_design(ranges, 50, 0, seed=7)
    assert np.array_equal(other.x_samples, design.x_samples)
    assert np.array_equal(design.with_index(0).substituted(), other.substituted())
    assert not np.array_equal(generate_design(ranges, 50, 1, seed=8).x_samples, design.x_samples)


def test_generate_design_errors() -> None:
    with pytest.raises(ConfigError):
        generate_design(UNIT_RANGES, 1, 0, seed=0)
    with pytest.raises(ConfigError):
        generate_design([], 10, 0, seed=0)
    with pytest.raises(ConfigError):
        generate_design(UNIT_RANGES, 10, 2, seed=0)
    with pytest.raises(ConfigError):
        generate_design(UNIT_RANGES, 10, 0, seed=-1)
    with pytest.raises(ConfigError):
        PickFreezeDesign(np.zeros((4, 2)), np.zeros((4, 3)), 0, 0)


def test_analytic_indices() -> None:
    for index, expected in ((0, 0.2), (1, 0.8)):
        pairs = linear_pairs(100_000, seed=1, index=index)
        assert estimate_sobol(pairs.y_tilde, pairs.y_tilde_prime) == pytest.approx(expected, abs=0.02)


def test_estimate_is_shift_invariant() -> None:
    pairs = random_pairs(200, seed=4)
    base = estimate_sobol(pairs.y_tilde, pairs.y_tilde_prime)
    assert estimate_sobol(pairs.y_tilde + 100.0, pairs.y_tilde_prime + 100.0) == pytest.approx(base, rel=1e-9)


@pytest.mark.parametrize("scale", [-3.7, 1e3])
def test_estimate_is_scale_invariant(scale: float) -> None:
    pairs = random_pairs(500, seed=8)
    base = estimate_sobol(pairs.y_tilde, pairs.y_tilde_prime)
    scaled = estimate_sobol(scale * pairs.y_tilde, scale * pairs.y_tilde_prime)
    assert scaled == pytest.approx(base, rel=1e-12)


def test_estimate_and_bounds_ignore_sample_order() -> None:
    pairs = random_pairs(1000, seed=9, radius=0.02)
    shuffled = pairs.take(np.random.default_rng(1).permutation(len(pairs)))
    assert estimate_sobol(shuffled.y_tilde, shuffled.y_tilde_prime) == estimate_sobol(
        pairs.y_tilde, pairs.y_tilde_prime
    )
    assert bound_sobol(shuffled) == bound_sobol(pairs)


def test_degenerate_variance() -> None:
    with pytest.raises(DegenerateVariance):
        estimate_sobol(np.full(10, 3.0), np.arange(10.0))
    with pytest.raises(ValueError):
        estimate_sobol(np.zeros(3), np.zeros(4))


def test_bounds_collapse_without_radii() -> None:
    pairs = linear_pairs(500, seed=2).with_zero_radii()
    bounds = bound_sobol(pairs)
    estimate = estimate_sobol(pairs.y_tilde, pairs.y_tilde_prime)
    assert bounds.s_min <= estimate <= bounds.s_max
    assert bounds.width < 1e-10


def test_sandwich_random_perturbations() -> None:
    rng = np.random.default_rng(10)
    for seed in range(5):
        pairs = random_pairs(8, seed=seed, radius=0.02)
        bounds = bound_sobol(pairs)
        u = rng.uniform(-1.0, 1.0, size=(20_000, 2, 8))
        # half of the draws are pushed onto the faces of the box
        u[::2] = np.sign(u[::2])
        y = pairs.y_tilde + u[:, 0] * pairs.eps
        y_prime = pairs.y_tilde_prime + u[:, 1] * pairs.eps_prime
        estimates = vectorized_estimate(y, y_prime)
        assert np.all((bounds.s_min <= estimates) & (estimates <= bounds.s_max))


def test_sandwich_box_vertices() -> None:
    pairs = random_pairs(4, seed=3, radius=0.01)
    bounds = bound_sobol(pairs)
    signs = np.array(list(itertools.product((-1.0, 1.0), repeat=8)))
    assert len(signs) == 256
    y = pairs.y_tilde + signs[:, :4] * pairs.eps
    y_prime = pairs.y_tilde_prime + signs[:, 4:] * pairs.eps_prime
    estimates = vectorized_estimate(y, y_prime)
    assert np.all((bounds.s_min <= estimates) & (estimates <= bounds.s_max))

def test_bounds_widen_with_radii() -> None:
    pairs = random_pairs(200, seed=12, radius=0.02)
    previous = bound_sobol(pairs)
    for _ in range(3):
        pairs = CertifiedPairs(pairs.y_tilde, pairs.y_tilde_prime, 2.0 * pairs.eps, 2.0 * pairs.eps_prime)
        bounds = bound_sobol(pairs)
        assert bounds.s_min <= previous.s_min
        assert bounds.s_max >= previous.s_max
        previous = bounds



def test_bounds_straddling_denominator() -> None:
    pairs = random_pairs(20, seed=0, radius=10.0)
    with pytest.raises(DenominatorStraddlesZero) as exc_info:
        bound_sobol(pairs)
    assert exc_info.value.context["lower"] <= 0.0
    assert try_bound_sobol(pairs) is None


def test_quantile() -> None:
    values = np.arange(10.0, 0.0, -1.0)
    assert quantile(values, 0.25) == 3.0
    assert quantile(values, 0.0) == 1.0
    assert quantile(values, 1.0) == 10.0
    assert quantile(values, 0.975) == 10.0
    assert quantile(np.arange(1.0, 301.0), 0.025) == 8.0
    with pytest.raises(ValueError):
        quantile(np.array([]), 0.5)


def test_bootstrap_thread_independent() -> None:
    pairs = random_pairs(100, seed=1)
    serial = bootstrap_replications(pairs, 50, seed=9, threads=1)
    threaded = bootstrap_replications(pairs, 50, seed=9, threads=4, chunk_size=7)
    assert np.array_equal(serial[0], threaded[0])
    assert np.array_equal(serial[1], threaded[1])
    other = bootstrap_replications(pairs, 50, seed=10)
    assert not np.array_equal(serial[0], other[0])


def test_combined_ci() -> None:
    pairs = linear_pairs(2000, seed=5)
    ci = bootstrap_combined_ci(pairs, 300, 0.05, seed=5)
    assert ci.n_boot == 300
    assert ci.lo <= estimate_sobol(pairs.y_tilde, pairs.y_tilde_prime) <= ci.hi
    assert abs(0.5 * (ci.lo + ci.hi) - 0.2) < 0.1
    assert not ci.unbounded
    assert ci.length < 0.2

    wide = CertifiedPairs(pairs.y_tilde, pairs.y_tilde_prime, np.full(2000, 0.05), np.full(2000, 0.05))
    wide_ci = bootstrap_combined_ci(wide, 300, 0.05, seed=5)
    assert wide_ci.lo <= ci.lo
    assert wide_ci.hi >= ci.hi


def test_combined_ci_unbounded() -> None:
    pairs = random_pairs(20, seed=0, radius=10.0)
    ci = bootstrap_combined_ci(pairs, 50, 0.05, seed=0)
    assert ci.unbounded
    assert ci.lo == -math.inf and ci.hi == math.inf
    assert ci.unbounded_replications > 0


def test_combined_ci_errors() -> None:
    pairs = random_pairs(20, seed=0)
    with pytest.raises(ConfigError):
        bootstrap_combined_ci(pairs, 1, 0.05, seed=0)
    with pytest.raises(ConfigError):
        bootstrap_combined_ci(pairs, 10, 1.5, seed=0)
    with pytest.raises(ValueError):
        CombinedCI(1.0, 0.0, 0.05, 10)


@pytest.mark.slow
def test_combined_ci_coverage() -> None:
    covered = 0
    for seed in range(100):
        pairs = linear_pairs(500, seed=seed)
        ci = bootstrap_combined_ci(pairs, 300, 0.05, seed=seed)
        covered += ci.lo <= 0.2 <= ci.hi
    assert covered >= 90


class FailingEvaluator:
    def evaluate(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        if len(points) == 2:
            raise SolverDiverged("boom", row=1)
        return linear_model(points), np.zeros(len(points))


class CountingEvaluator:
    def __init__(self) -> None:
        self.calls = 0

    def evaluate(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        self.calls += len(points)
        return linear_model(points), np.full(len(points), 0.01)


def test_evaluate_pairs_error_context() -> None:
    design = generate_design(UNIT_RANGES, 10, 0, seed=0)
    with pytest.raises(SolverDiverged) as exc_info:
        evaluate_pairs(design, FailingEvaluator(), chunk_size=4)
    assert exc_info.value.context["sample_index"] == 9
    assert exc_info.value.context["substituted"] is False

    base = evaluate_points(design.x_samples, FunctionEvaluator(linear_model))
    with pytest.raises(SolverDiverged) as exc_info:
        evaluate_pairs(design, FailingEvaluator(), base=base, chunk_size=4)
    assert exc_info.value.context["sample_index"] == 9
    assert exc_info.value.context["substituted"] is True


def test_evaluate_pairs_reuses_base() -> None:
    design = generate_design(UNIT_RANGES, 50, 0, seed=6)
    model = CountingEvaluator()
    base = evaluate_points(design.x_samples, model)
    first = evaluate_pairs(design, model, base=base)
    second = evaluate_pairs(design.with_index(1), model, base=base)
    assert model.calls == 3 * 50
    assert np.array_equal(first.y_tilde, second.y_tilde)
    assert np.array_equal(second.eps, base[1])
    assert np.array_equal(first.y_tilde, evaluate_pairs(design, CountingEvaluator()).y_tilde)


def test_evaluate_pairs_thread_independent() -> None:
    design = generate_design(UNIT_RANGES, 1000, 1, seed=3)
    model = FunctionEvaluator(linear_model, radius=0.01)
    serial = evaluate_pairs(design, model, threads=1)
    threaded = evaluate_pairs(design, model, threads=4, chunk_size=100)
    assert np.array_equal(serial.y_tilde_prime, threaded.y_tilde_prime)
    assert np.all(serial.eps == 0.01)
    assert serial.y_tilde == pytest.approx(linear_model(design.x_samples))


def test_pairs_from_frame() -> None:
    pairs = random_pairs(30, seed=2)
    frame = pairs.to_frame()
    assert tuple(frame.columns) == ("k", "y_tilde", "y_tilde_prime", "eps", "eps_prime")
    shuffled = CertifiedPairs.from_frame(frame.iloc[::-1])
    assert np.array_equal(shuffled.y_tilde, pairs.y_tilde)
    assert np.array_equal(shuffled.eps_prime, pairs.eps_prime)

    with pytest.raises(ConfigError):
        CertifiedPairs.from_frame(frame[["k", "y_tilde", "y_tilde_prime"]])
    with pytest.raises(ConfigError):
        CertifiedPairs.from_frame(frame.assign(eps="wide"))
    with pytest.raises(ConfigError) as exc_info:
        CertifiedPairs.from_frame(frame.assign(eps=-1.0), "pairs_nu.csv")
    assert exc_info.value.context["source"] == "pairs_nu.csv"


def test_pairs_validation() -> None:
    with pytest.raises(ConfigError):
        CertifiedPairs(np.zeros(3), np.zeros(3), -np.ones(3), np.zeros(3))
    with pytest.raises(ConfigError):
        CertifiedPairs(np.zeros(3), np.zeros(2), np.zeros(3), np.zeros(3))
    pairs = random_pairs(5, seed=0)
    taken = pairs.take(np.array([0, 0, 4]))
    assert len(taken) == 3
    assert taken.y_tilde[1] == pairs.y_tilde[0]
