"""Experiment drivers behind the command-line commands.

Each driver takes a :class:`~certsobol.config.RunConfig` and returns tables
and records; nothing here prints or writes files except :func:`export_pairs`.
"""

import logging
import math
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .artifacts import read_table, write_table
from .budget import BenchmarkRecords
from .config import RunConfig
from .errors import CertSobolError, ConfigError, FitFailed
from .reduced_basis import ReducedBasis, SnapshotSet, build_basis, collect_snapshots
from .sobol import (
    CertifiedEvaluator,
    CertifiedPairs,
    CombinedCI,
    FullEvaluator,
    IndexBounds,
    ReducedEvaluator,
    bootstrap_combined_ci,
    estimate_sobol,
    evaluate_pairs,
    evaluate_points,
    generate_design,
    try_bound_sobol,
)

logger = logging.getLogger(__name__)

SENSITIVITY_COLUMNS = ("input", "N", "estimate", "s_min", "s_max", "ci_lo", "ci_hi", "ci_length", "unbounded")
CONVERGENCE_COLUMNS = ("n", "s_min", "s_max", "ci_lo", "ci_hi")


@dataclass(frozen=True)
class OfflineResult:
    basis: ReducedBasis
    snapshots: SnapshotSet
    wall_time: float


@dataclass(frozen=True)
class SensitivityResult:
    table: pd.DataFrame
    pairs: Dict[str, CertifiedPairs]
    wall_time: float

    @property
    def mean_ci_length(self) -> float:
        return float(self.table["ci_length"].mean())


@dataclass(frozen=True)
class ComparisonResult:
    reduced: SensitivityResult
    full: SensitivityResult

    @property
    def speedup(self) -> float:
        return self.full.wall_time / self.reduced.wall_time if self.reduced.wall_time > 0 else math.inf

    def table(self) -> pd.DataFrame:
        frames = []
        for label, result in (("reduced", self.reduced), ("full", self.full)):
            frame = result.table.copy()
            frame.insert(0, "pipeline", label)
            frames.append(frame)
        return pd.concat(frames, ignore_index=True)


def collect_training_snapshots(config: RunConfig) -> SnapshotSet:
    return collect_snapshots(
        config.training_points(), config.disc, divergence_cap=config.divergence_cap, threads=config.threads
    )


def run_offline(config: RunConfig, snapshots: Optional[SnapshotSet] = None) -> OfflineResult:
    """Collect snapshots (unless given) and build a basis of size ``config.n``."""
    start = time.perf_counter()
    if snapshots is None:
        snapshots = collect_training_snapshots(config)
    basis = build_basis(snapshots, config.n)
    wall_time = time.perf_counter() - start
    logger.info("offline phase: %d snapshots, %d modes, %.3f s", len(snapshots), basis.size, wall_time)
    return OfflineResult(basis=basis, snapshots=snapshots, wall_time=wall_time)


def spectrum_table(basis: ReducedBasis) -> pd.DataFrame:
    """POD eigenvalues with the captured energy share, one row per eigenvalue."""
    return pd.DataFrame(
        {
            "k": np.arange(1, len(basis.spectrum) + 1),
            "eigenvalue": basis.spectrum,
            "energy": basis.pod_energy(),
            "retained": np.arange(len(basis.spectrum)) < basis.size,
        }
    )


def reduced_evaluator(config: RunConfig, basis: ReducedBasis) -> ReducedEvaluator:
    if basis.disc != config.disc:
        raise ConfigError("basis discretization does not match the configuration", basis=basis.disc, config=config.disc)
    return ReducedEvaluator(
        basis, output=config.output, divergence_cap=config.divergence_cap, bound_cap=config.bound_cap
    )


def full_evaluator(config: RunConfig) -> FullEvaluator:
    return FullEvaluator(config.disc, output=config.output, divergence_cap=config.divergence_cap)


def evaluate_inputs(config: RunConfig, model: CertifiedEvaluator) -> Dict[str, CertifiedPairs]:
    """Certified pairs for every input, all from the same two samples.

    ``X`` is evaluated once and shared, so ``p`` inputs cost ``(p + 1) N`` model calls.
    """
    ranges = config.input_ranges()
    design = generate_design(ranges, config.N, 0, config.seed)
    base = evaluate_points(design.x_samples, model, threads=config.threads)
    pairs = {}
    for index, input_range in enumerate(ranges):
        try:
            pairs[input_range.name] = evaluate_pairs(
                design.with_index(index), model, base=base, threads=config.threads
            )
        except CertSobolError as exc:
            raise exc.with_context(input=input_range.name) from None
    return pairs


def index_row(name: str, pairs: CertifiedPairs, ci: CombinedCI, bounds: Optional[IndexBounds]) -> Dict[str, object]:
    s_min, s_max = (bounds.s_min, bounds.s_max) if bounds is not None else (-math.inf, math.inf)
    return {
        "input": name,
        "N": len(pairs),
        "estimate": estimate_sobol(pairs.y_tilde, pairs.y_tilde_prime),
        "s_min": s_min,
        "s_max": s_max,
        "ci_lo": ci.lo,
        "ci_hi": ci.hi,
        "ci_length": ci.length,
        "unbounded": bounds is None or ci.unbounded,
    }


def sensitivity_table(config: RunConfig, pairs: Mapping[str, CertifiedPairs]) -> pd.DataFrame:
    """Sandwich bounds and combined interval of every input.

    ``estimate`` is the pick-freeze estimate on the surrogate outputs. An input whose
    bounds are unbounded is kept as a row with infinite ends and ``unbounded = True``.
    """
    rows = []
    for name, input_pairs in pairs.items():
        bounds = try_bound_sobol(input_pairs)
        ci = bootstrap_combined_ci(input_pairs, config.B, config.alpha, config.seed, threads=config.threads)
        rows.append(index_row(name, input_pairs, ci, bounds))
    return pd.DataFrame(rows, columns=list(SENSITIVITY_COLUMNS))


def run_sensitivity(config: RunConfig, model: CertifiedEvaluator) -> SensitivityResult:
    """Evaluate all pairs with ``model``, then bound and bootstrap every index."""
    start = time.perf_counter()
    pairs = evaluate_inputs(config, model)
    table = sensitivity_table(config, pairs)
    wall_time = time.perf_counter() - start
    logger.info("sensitivity run with N=%d: %.3f s", config.N, wall_time)
    return SensitivityResult(table=table, pairs=pairs, wall_time=wall_time)


def sensitivity_from_pairs(config: RunConfig, pairs: Mapping[str, CertifiedPairs]) -> SensitivityResult:
    """Sandwich and bootstrap machinery on pairs produced elsewhere."""
    start = time.perf_counter()
    table = sensitivity_table(config, pairs)
    return SensitivityResult(table=table, pairs=dict(pairs), wall_time=time.perf_counter() - start)


def run_convergence(
    config: RunConfig, n_list: Sequence[int], snapshots: Optional[SnapshotSet] = None, input_index: int = 0
) -> pd.DataFrame:
    """Bounds and combined interval of one index for several basis sizes on a fixed design.

    :return: one row per basis size with columns ``n, s_min, s_max, ci_lo, ci_hi``
    """
    if snapshots is None:
        snapshots = collect_training_snapshots(config)
    ranges = config.input_ranges()
    design = generate_design(ranges, config.N, input_index, config.seed)
    rows = []
    for n in n_list:
        basis = build_basis(snapshots, n)
        pairs = evaluate_pairs(design, reduced_evaluator(config, basis), threads=config.threads)
        bounds = try_bound_sobol(pairs)
        ci = bootstrap_combined_ci(pairs, config.B, config.alpha, config.seed, threads=config.threads)
        s_min, s_max = (bounds.s_min, bounds.s_max) if bounds is not None else (-math.inf, math.inf)
        rows.append({"n": n, "s_min": s_min, "s_max": s_max, "ci_lo": ci.lo, "ci_hi": ci.hi})
        logger.debug("convergence n=%d: gap %.3g", n, s_max - s_min)
    return pd.DataFrame(rows, columns=list(CONVERGENCE_COLUMNS))


def run_benchmark(
    config: RunConfig, n_list: Sequence[int], snapshots: Optional[SnapshotSet] = None
) -> Tuple[BenchmarkRecords, pd.DataFrame]:
    """Sweep the basis size at fixed ``N`` and record what the precision model is fitted on.

    For every ``n`` the mean (over inputs) sandwich width is recorded; the sampling
    part is the mean combined-interval length of the largest basis with radii zeroed.

    :raises FitFailed: if fewer than three basis sizes give finite widths
    """
    if snapshots is None:
        snapshots = collect_training_snapshots(config)
    rows = []
    last_pairs: Dict[str, CertifiedPairs] = {}
    for n in sorted(set(n_list)):
        basis = build_basis(snapshots, n)
        last_pairs = evaluate_inputs(config, reduced_evaluator(config, basis))
        widths = []
        for input_pairs in last_pairs.values():
            bounds = try_bound_sobol(input_pairs)
            widths.append(bounds.width if bounds is not None else math.inf)
        rows.append({"n": n, "N": config.N, "mean_width": float(np.mean(widths))})

    lengths = [
        bootstrap_combined_ci(pairs.with_zero_radii(), config.B, config.alpha, config.seed, threads=config.threads).length
        for pairs in last_pairs.values()
    ]
    sampling_length = float(np.mean(lengths))
    table = pd.DataFrame(rows, columns=["n", "N", "mean_width"])
    table["sampling_ci_length"] = sampling_length

    finite = table[np.isfinite(table["mean_width"]) & (table["mean_width"] > 0)]
    if len(finite) < 3:
        raise FitFailed("fewer than three basis sizes gave finite sandwich widths", usable=len(finite))
    records = BenchmarkRecords(
        n_values=finite["n"].to_numpy(dtype=np.float64),
        widths=finite["mean_width"].to_numpy(dtype=np.float64),
        sample_sizes=np.array([float(config.N)]),
        ci_lengths=np.array([sampling_length]),
    )
    return records, table


def run_compare_full(config: RunConfig, basis: ReducedBasis) -> ComparisonResult:
    """Same design and seed through the reduced pipeline and through the full solver."""
    reduced = run_sensitivity(config, reduced_evaluator(config, basis))
    full = run_sensitivity(config, full_evaluator(config))
    logger.info("speedup of the reduced pipeline: %.2f", full.wall_time / max(reduced.wall_time, 1e-12))
    return ComparisonResult(reduced=reduced, full=full)


def export_pairs(pairs: Mapping[str, CertifiedPairs], directory: Path) -> List[Path]:
    """Write ``pairs_<input>.csv`` for every input."""
    paths = []
    for name, input_pairs in pairs.items():
        path = directory / f"pairs_{name}.csv"
        paths.append(write_table(path, input_pairs.to_frame()))
    return paths


def read_pairs(paths: Sequence[Path]) -> Dict[str, CertifiedPairs]:
    """Inverse of :func:`export_pairs`; the input name is taken from the file name."""
    return {path.stem[len("pairs_") :]: CertifiedPairs.from_frame(read_table(path), str(path)) for path in paths}
