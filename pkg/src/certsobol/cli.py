"""The ``certsobol`` command-line application.

Every command resolves the effective :class:`~certsobol.config.RunConfig`,
writes its artifacts into the run directory given by ``--out`` and records
versions and wall times in ``metadata.json``.
"""

import logging
import math
import sys
import time
from argparse import Namespace
from pathlib import Path
from typing import List, Optional, Sequence

import pandas as pd
from rich.table import Table

from .argument import Arg, float_pair, int_list, positive_float, positive_int
from .artifacts import list_pairs_files, prepare_run_dir, write_metadata, write_record, write_table
from .budget import PrecisionModel, fit_precision_model, optimize_budget
from .command import auto_argument
from .config import RunConfig, load_config
from .core import BaseApp
from .errors import ConfigError
from .experiments import (
    evaluate_inputs,
    export_pairs,
    full_evaluator,
    read_pairs,
    reduced_evaluator,
    run_benchmark,
    run_compare_full,
    run_convergence,
    run_offline,
    run_sensitivity,
    sensitivity_from_pairs,
    spectrum_table,
)
from .plotting import render_convergence_svg
from .reduced_basis import ReducedBasis
from .rng import MAX_SEED

logger = logging.getLogger(__name__)

BASIS_FILE = "basis.json"
DEFAULT_N_LIST = list(range(2, 9))
DEFAULT_P_TARGET = 0.02
INDEX_COLUMNS = ("estimate", "s_min", "s_max", "ci_lo", "ci_hi", "ci_length")


def seed_value(text: str) -> int:
    value = int(text)
    if not 0 <= value <= MAX_SEED:
        raise ValueError(text)
    return value


def _fmt(value: float) -> str:
    return f"{value:.6g}" if math.isfinite(value) else ("-inf" if value < 0 else "inf")


class App(BaseApp):
    """Certified global sensitivity analysis of the viscous Burgers model."""

    PROG = "certsobol"
    DESCRIPTION = "Certified Sobol indices through a reduced basis metamodel of the viscous Burgers equation."

    config: RunConfig = RunConfig()

    def common_options(
        self,
        *,
        config: Arg[Optional[str], "--config", {"metavar": "PATH", "help": "key = value configuration file"}] = None,  # noqa: F821,F722,B002
        seed: Arg[Optional[int], "--seed", {"type": seed_value, "metavar": "U64", "help": "random seed"}] = None,  # noqa: F821,F722,B002
        threads: Arg[Optional[int], "--threads", {"type": positive_int, "metavar": "K", "help": "worker threads"}] = None,  # noqa: F821,F722,B002
        out: Arg[Optional[str], "--out", {"metavar": "DIR", "help": "run directory"}] = None,  # noqa: F821,F722,B002
        nu_range: Arg[Optional[tuple], "--nu-range", {"type": float_pair, "metavar": "LO,HI"}] = None,  # noqa: F821,F722,B002
        u0m_range: Arg[Optional[tuple], "--u0m-range", {"type": float_pair, "metavar": "LO,HI"}] = None,  # noqa: F821,F722,B002
        output: Arg[Optional[str], "--output", {"choices": ("final", "space_time")}] = None,  # noqa: F821,F722,B002
        verbose: Arg[bool, "-v", "--verbose", {"help": "log debug messages"}] = False,  # noqa: F821,F722,B002
    ) -> None:
        """Options accepted by every command."""

    def configure(self, ns: Namespace) -> None:
        super().configure(ns)
        overrides = {key: getattr(ns, key) for key in ("seed", "threads", "out", "nu_range", "u0m_range", "output")}
        self.config = load_config(ns.config, overrides)
        logger.debug("effective configuration:\n%s", self.config.to_text())

    def load_basis(self, config: RunConfig, path: Optional[str]) -> ReducedBasis:
        """Read ``path`` if given, otherwise run the offline phase."""
        if path is not None:
            basis = ReducedBasis.load(path)
            logger.info("loaded basis of size %d from %s", basis.size, path)
            return basis
        return run_offline(config).basis

    def index_table(self, frame: pd.DataFrame, title: str) -> Table:
        table = Table(title=title, header_style="cmd.table.header")
        table.add_column("input")
        for column in INDEX_COLUMNS:
            table.add_column(column, justify="right")
        for row in frame.itertuples(index=False):
            values = [row.input] + [_fmt(getattr(row, column)) for column in INDEX_COLUMNS]
            table.add_row(*values, style="cmd.unbounded" if row.unbounded else "cmd.value")
        return table

    def report_timing(self, label: str, seconds: float) -> None:
        self.poutput(f"{label}: {seconds:.3f} s", style="cmd.timing")

    @auto_argument
    def do_offline(
        self,
        *,
        n: Arg[Optional[int], "--n", {"type": positive_int, "help": "reduced basis size"}] = None,  # noqa: F821,F722,B002
    ) -> None:
        """Collect training snapshots, build the POD basis and save it."""
        config = self.config.replace(n=n)
        run_dir = prepare_run_dir(config.out, config)
        result = run_offline(config)
        result.basis.save(run_dir / BASIS_FILE)
        spectrum = spectrum_table(result.basis)
        write_table(run_dir / "spectrum.csv", spectrum)

        table = Table(title="POD spectrum", header_style="cmd.table.header")
        for column in ("k", "eigenvalue", "energy"):
            table.add_column(column, justify="right")
        for row in spectrum.itertuples(index=False):
            table.add_row(str(row.k), _fmt(row.eigenvalue), _fmt(row.energy), style="cmd.value" if row.retained else "dim")
        self.poutput(table)
        self.report_timing("offline wall time", result.wall_time)
        extra = {"snapshots": len(result.snapshots), "rank": result.basis.rank}
        write_metadata(run_dir, "offline", config, {"offline": result.wall_time}, extra=extra)
        self.psuccess(f"basis of size {result.basis.size} written to {run_dir / BASIS_FILE}")

    @auto_argument
    def do_sensitivity(
        self,
        *,
        n: Arg[Optional[int], "--n", {"type": positive_int, "help": "reduced basis size"}] = None,  # noqa: F821,F722,B002
        N: Arg[Optional[int], "--N", {"type": positive_int, "help": "sample size"}] = None,  # noqa: F821,F722,B002,N803
        basis: Arg[Optional[str], "--basis", {"metavar": "PATH", "help": "saved basis (default: build one)"}] = None,  # noqa: F821,F722,B002
        pairs: Arg[Optional[str], "--pairs", {"metavar": "DIR", "help": "use pairs_*.csv files instead of a model"}] = None,  # noqa: F821,F722,B002
        full: Arg[bool, "--full", {"help": "evaluate the full model (zero radii)"}] = False,  # noqa: F821,F722,B002
    ) -> None:
        """Certified first-order indices with combined confidence intervals for every input."""
        if pairs is not None and (full or basis is not None):
            raise ConfigError("--pairs cannot be combined with --full or --basis")
        config = self.config.replace(n=n, N=N)
        run_dir = prepare_run_dir(config.out, config)
        if pairs is not None:
            result = sensitivity_from_pairs(config, read_pairs(list_pairs_files(pairs)))
        elif full:
            result = run_sensitivity(config, full_evaluator(config))
        else:
            result = run_sensitivity(config, reduced_evaluator(config, self.load_basis(config, basis)))

        write_table(run_dir / "sensitivity.csv", result.table)
        self.poutput(self.index_table(result.table, "first-order indices"))
        if result.table["unbounded"].any():
            self.pwarning("some indices are unbounded: the bounds on the variance reach zero")
        else:
            self.poutput(f"mean CI length: {_fmt(result.mean_ci_length)}")
        self.report_timing("online wall time", result.wall_time)
        write_metadata(run_dir, "sensitivity", config, {"online": result.wall_time})

    @auto_argument
    def do_convergence(
        self,
        *,
        n_list: Arg[Optional[List[int]], "--n-list", {"type": int_list, "help": "basis sizes, e.g. 2..10 or 2,4,6"}] = None,  # noqa: F821,F722,B002
        N: Arg[Optional[int], "--N", {"type": positive_int, "help": "sample size"}] = None,  # noqa: F821,F722,B002,N803
        no_svg: Arg[bool, "--no-svg", {"help": "do not render convergence.svg"}] = False,  # noqa: F821,F722,B002
    ) -> None:
        """Bounds and combined interval of the nu index for several basis sizes on one design."""
        config = self.config.replace(N=N)
        run_dir = prepare_run_dir(config.out, config)
        start = time.perf_counter()
        frame = run_convergence(config, n_list or DEFAULT_N_LIST)
        wall_time = time.perf_counter() - start
        write_table(run_dir / "convergence.csv", frame)
        if not no_svg and render_convergence_svg(frame, run_dir / "convergence.svg"):
            logger.info("chart written to %s", run_dir / "convergence.svg")

        table = Table(title="convergence of the nu index", header_style="cmd.table.header")
        for column in frame.columns:
            table.add_column(column, justify="right")
        for row in frame.itertuples(index=False):
            table.add_row(str(row.n), *(_fmt(value) for value in row[1:]))
        self.poutput(table)
        self.report_timing("wall time", wall_time)
        write_metadata(run_dir, "convergence", config, {"convergence": wall_time})

    @auto_argument
    def do_benchmark(
        self,
        *,
        n_list: Arg[Optional[List[int]], "--n-list", {"type": int_list, "help": "basis sizes of the sweep"}] = None,  # noqa: F821,F722,B002
        N: Arg[Optional[int], "--N", {"type": positive_int, "help": "sample size of the sweep"}] = None,  # noqa: F821,F722,B002,N803
        p_target: Arg[float, "--p-target", {"type": positive_float, "help": "target half-length"}] = DEFAULT_P_TARGET,  # noqa: F821,F722,B002
        c_meta: Arg[Optional[float], "--c-meta", {"type": positive_float, "help": "injected metamodel constant"}] = None,  # noqa: F821,F722,B002
        a_meta: Arg[Optional[float], "--a-meta", {"type": positive_float, "help": "injected decay rate"}] = None,  # noqa: F821,F722,B002
        sigma: Arg[Optional[float], "--sigma", {"type": float, "help": "injected sampling constant"}] = None,  # noqa: F821,F722,B002
    ) -> None:
        """Fit the precision model on a benchmark sweep and choose the cheapest (N, n)."""
        config = self.config.replace(N=N)
        run_dir = prepare_run_dir(config.out, config)
        injected = (c_meta, a_meta, sigma)
        wall_times = {}
        start = time.perf_counter()
        if all(value is not None for value in injected):
            model = PrecisionModel.from_alpha(sigma=sigma, c_meta=c_meta, a_meta=a_meta, alpha=config.alpha)
            logger.info("using the injected precision model")
        elif any(value is not None for value in injected):
            raise ConfigError("--c-meta, --a-meta and --sigma must be given together")
        else:
            records, frame = run_benchmark(config, n_list or DEFAULT_N_LIST)
            write_table(run_dir / "benchmark.csv", frame)
            model = fit_precision_model(records, config.alpha)
            wall_times["benchmark"] = time.perf_counter() - start
        write_record(run_dir / "precision_model.txt", model.to_record())

        solution = optimize_budget(model, p_target)
        write_record(run_dir / "budget.txt", {"p_target": p_target, **solution.to_record()})
        wall_times["total"] = time.perf_counter() - start

        self.poutput(
            f"precision model: sigma = {_fmt(model.sigma)}, C = {_fmt(model.c_meta)}, a = {_fmt(model.a_meta)}"
        )
        if solution.continuous is not None:
            self.poutput(f"continuous optimum: N = {_fmt(solution.continuous.N)}, n = {_fmt(solution.continuous.n)}")
        self.psuccess(
            f"N* = {solution.N_star}, n* = {solution.n_star} "
            f"(precision {_fmt(solution.achieved_precision)}, cost {_fmt(solution.cost)})"
        )
        write_metadata(run_dir, "benchmark", config, wall_times)

    @auto_argument("compare-full")
    def do_compare_full(
        self,
        *,
        n: Arg[Optional[int], "--n", {"type": positive_int, "help": "reduced basis size"}] = None,  # noqa: F821,F722,B002
        N: Arg[Optional[int], "--N", {"type": positive_int, "help": "sample size"}] = None,  # noqa: F821,F722,B002,N803
        basis: Arg[Optional[str], "--basis", {"metavar": "PATH", "help": "saved basis (default: build one)"}] = None,  # noqa: F821,F722,B002
    ) -> None:
        """Run one design through the reduced pipeline and through the full solver."""
        config = self.config.replace(n=n, N=N)
        run_dir = prepare_run_dir(config.out, config)
        comparison = run_compare_full(config, self.load_basis(config, basis))
        write_table(run_dir / "comparison.csv", comparison.table())

        self.poutput(self.index_table(comparison.reduced.table, "reduced pipeline"))
        self.poutput(self.index_table(comparison.full.table, "full model"))
        self.poutput(
            f"mean CI length: reduced {_fmt(comparison.reduced.mean_ci_length)}, full {_fmt(comparison.full.mean_ci_length)}"
        )
        self.report_timing("reduced wall time", comparison.reduced.wall_time)
        self.report_timing("full wall time", comparison.full.wall_time)
        self.psuccess(f"speedup: {comparison.speedup:.2f}")
        write_metadata(
            run_dir,
            "compare-full",
            config,
            {"reduced": comparison.reduced.wall_time, "full": comparison.full.wall_time},
            extra={"speedup": comparison.speedup},
        )

    @auto_argument("export-pairs")
    def do_export_pairs(
        self,
        *,
        n: Arg[Optional[int], "--n", {"type": positive_int, "help": "reduced basis size"}] = None,  # noqa: F821,F722,B002
        N: Arg[Optional[int], "--N", {"type": positive_int, "help": "sample size"}] = None,  # noqa: F821,F722,B002,N803
        basis: Arg[Optional[str], "--basis", {"metavar": "PATH", "help": "saved basis (default: build one)"}] = None,  # noqa: F821,F722,B002
    ) -> None:
        """Write the certified pairs of every input as pairs_<input>.csv."""
        config = self.config.replace(n=n, N=N)
        run_dir = prepare_run_dir(config.out, config)
        start = time.perf_counter()
        pairs = evaluate_inputs(config, reduced_evaluator(config, self.load_basis(config, basis)))
        paths = export_pairs(pairs, run_dir)
        wall_time = time.perf_counter() - start
        for path in paths:
            self.poutput(str(path), markup=False)
        write_metadata(run_dir, "export-pairs", config, {"export": wall_time})
        self.psuccess(f"{len(paths)} pairs files written to {Path(run_dir)}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    return App().run(argv if argv is not None else sys.argv[1:])
