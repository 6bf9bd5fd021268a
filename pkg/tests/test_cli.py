import json
from pathlib import Path
from typing import List

import pandas as pd
import pytest

from certsobol.artifacts import read_record, read_table
from certsobol.cli import App, main
from certsobol.config import load_config
from certsobol.experiments import CONVERGENCE_COLUMNS, SENSITIVITY_COLUMNS

SMALL = ["--N", "20", "--seed", "7"]


@pytest.fixture
def config_file(tmp_path: Path) -> Path:
    path = tmp_path / "small.txt"
    path.write_text("B = 50\nn = 5\n", encoding="utf-8")
    return path


def run(command: str, out: Path, config_file: Path, *args: str) -> int:
    argv: List[str] = [command, "--out", str(out), "--config", str(config_file), *args]
    return main(argv)


def test_help(capsys: pytest.CaptureFixture) -> None:
    assert main(["--help"]) == 0
    text = capsys.readouterr().out
    for name in ("offline", "sensitivity", "convergence", "benchmark", "compare-full", "export-pairs"):
        assert name in text


def test_app_commands() -> None:
    app = App()
    assert app.get_visible_commands() == [
        "benchmark",
        "compare-full",
        "convergence",
        "export-pairs",
        "offline",
        "sensitivity",
    ]


def test_offline(tmp_path: Path, config_file: Path) -> None:
    out = tmp_path / "offline"
    assert run("offline", out, config_file, "--n", "4") == 0
    assert (out / "basis.json").is_file()
    spectrum = read_table(out / "spectrum.csv")
    assert list(spectrum.columns) == ["k", "eigenvalue", "energy", "retained"]
    assert spectrum["retained"].sum() == 4
    assert load_config(out / "config.txt").n == 4
    metadata = json.loads((out / "metadata.json").read_text(encoding="utf-8"))
    assert metadata["command"] == "offline"
    assert metadata["snapshots"] == 150
    assert metadata["rank"] == 8
    assert set(metadata["versions"]) >= {"certsobol", "python", "numpy", "scipy", "pandas"}


def test_sensitivity(tmp_path: Path, config_file: Path) -> None:
    out = tmp_path / "sensitivity"
    assert run("sensitivity", out, config_file, *SMALL) == 0
    table = read_table(out / "sensitivity.csv")
    assert tuple(table.columns) == SENSITIVITY_COLUMNS
    assert list(table["input"]) == ["nu", "u0m"]
    assert (table["N"] == 20).all()
    assert (table["ci_lo"] <= table["ci_hi"]).all()
    config = load_config(out / "config.txt")
    assert (config.N, config.B, config.n, config.seed) == (20, 50, 5, 7)


def test_sensitivity_is_thread_independent(tmp_path: Path, config_file: Path) -> None:
    for threads in ("1", "4"):
        assert run("sensitivity", tmp_path / threads, config_file, *SMALL, "--threads", threads) == 0
    single = (tmp_path / "1" / "sensitivity.csv").read_bytes()
    assert single == (tmp_path / "4" / "sensitivity.csv").read_bytes()


def test_sensitivity_from_saved_basis(tmp_path: Path, config_file: Path) -> None:
    assert run("offline", tmp_path / "offline", config_file) == 0
    basis = str(tmp_path / "offline" / "basis.json")
    assert run("sensitivity", tmp_path / "loaded", config_file, *SMALL, "--basis", basis) == 0
    assert run("sensitivity", tmp_path / "built", config_file, *SMALL) == 0
    pd.testing.assert_frame_equal(
        read_table(tmp_path / "loaded" / "sensitivity.csv"), read_table(tmp_path / "built" / "sensitivity.csv")
    )


def test_export_pairs_round_trip(tmp_path: Path, config_file: Path) -> None:
    pairs_dir = tmp_path / "pairs"
    assert run("export-pairs", pairs_dir, config_file, *SMALL) == 0
    assert sorted(path.name for path in pairs_dir.glob("pairs_*.csv")) == ["pairs_nu.csv", "pairs_u0m.csv"]
    assert run("sensitivity", tmp_path / "from_pairs", config_file, *SMALL, "--pairs", str(pairs_dir)) == 0
    assert run("sensitivity", tmp_path / "from_model", config_file, *SMALL) == 0
    pd.testing.assert_frame_equal(
        read_table(tmp_path / "from_pairs" / "sensitivity.csv"),
        read_table(tmp_path / "from_model" / "sensitivity.csv"),
        check_exact=True,
    )

def test_offline_basis_is_reproducible(tmp_path: Path, config_file: Path) -> None:
    for name in ("first", "second"):
        assert run("offline", tmp_path / name, config_file) == 0
    assert (tmp_path / "first" / "basis.json").read_bytes() == (tmp_path / "second" / "basis.json").read_bytes()


@pytest.mark.parametrize(
    "command, args, outputs",
    [
        ("convergence", ["--n-list", "2..4", "--no-svg"], ["convergence.csv"]),
        ("benchmark", ["--n-list", "3..7", "--p-target", "0.1"], ["benchmark.csv", "budget.txt"]),
        ("export-pairs", [], ["pairs_nu.csv", "pairs_u0m.csv"]),
    ],
)
def test_outputs_are_thread_independent(
    tmp_path: Path, config_file: Path, command: str, args: List[str], outputs: List[str]
) -> None:
    for threads in ("1", "4"):
        assert run(command, tmp_path / threads, config_file, "--N", "600", *args, "--threads", threads) == 0
    for name in outputs:
        assert (tmp_path / "1" / name).read_bytes() == (tmp_path / "4" / name).read_bytes()



def test_full_sensitivity_has_zero_width_bounds(tmp_path: Path, config_file: Path) -> None:
    out = tmp_path / "full"
    assert run("sensitivity", out, config_file, "--N", "10", "--full") == 0
    table = read_table(out / "sensitivity.csv")
    bounded = table[~table["unbounded"]]
    assert ((bounded["s_max"] - bounded["s_min"]) < 1e-10).all()


def test_convergence(tmp_path: Path, config_file: Path) -> None:
    out = tmp_path / "convergence"
    assert run("convergence", out, config_file, *SMALL, "--n-list", "2,4,6", "--no-svg") == 0
    frame = read_table(out / "convergence.csv")
    assert tuple(frame.columns) == CONVERGENCE_COLUMNS
    assert list(frame["n"]) == [2, 4, 6]
    assert not (out / "convergence.svg").exists()


def test_convergence_chart(tmp_path: Path, config_file: Path) -> None:
    pytest.importorskip("matplotlib")
    out = tmp_path / "convergence"
    assert run("convergence", out, config_file, *SMALL, "--n-list", "3..5") == 0
    first = (out / "convergence.svg").read_bytes()
    assert run("convergence", out, config_file, *SMALL, "--n-list", "3..5") == 0
    assert (out / "convergence.svg").read_bytes() == first


def test_benchmark_with_injected_model(tmp_path: Path, config_file: Path) -> None:
    out = tmp_path / "benchmark"
    args = ["--c-meta", "0.5", "--a-meta", "2", "--sigma", "0.3", "--p-target", "0.05"]
    assert run("benchmark", out, config_file, *args) == 0
    assert not (out / "benchmark.csv").exists()
    model = read_record(out / "precision_model.txt")
    assert (model["c_meta"], model["a_meta"], model["sigma"]) == (0.5, 2.0, 0.3)
    budget = read_record(out / "budget.txt")
    assert budget["p_target"] == 0.05
    assert budget["n_star"] >= 1
    assert budget["achieved_precision"] <= 0.05
    assert budget["cost"] == budget["N_star"] * budget["n_star"] ** 3


def test_benchmark_sweep(tmp_path: Path, config_file: Path) -> None:
    out = tmp_path / "benchmark"
    assert run("benchmark", out, config_file, "--N", "50", "--n-list", "3..7", "--p-target", "0.1") == 0
    frame = read_table(out / "benchmark.csv")
    assert list(frame.columns) == ["n", "N", "mean_width", "sampling_ci_length"]
    assert list(frame["n"]) == [3, 4, 5, 6, 7]
    model = read_record(out / "precision_model.txt")
    assert model["a_meta"] > 1


def test_compare_full(tmp_path: Path, config_file: Path) -> None:
    out = tmp_path / "compare"
    assert run("compare-full", out, config_file, "--N", "10") == 0
    frame = read_table(out / "comparison.csv")
    assert list(frame["pipeline"]) == ["reduced", "reduced", "full", "full"]
    metadata = json.loads((out / "metadata.json").read_text(encoding="utf-8"))
    assert set(metadata["wall_times"]) == {"reduced", "full"}
    assert metadata["speedup"] > 0


@pytest.mark.parametrize(
    "args",
    [
        ["sensitivity", "--N", "0"],
        ["sensitivity", "--seed", "-1"],
        ["sensitivity", "--nu-range", "5,1"],
        ["sensitivity", "--full", "--pairs", "."],
        ["benchmark", "--c-meta", "1"],
        ["offline", "--config", "missing.txt"],
        ["frobnicate"],
    ],
)
def test_usage_errors(tmp_path: Path, args: List[str]) -> None:
    assert main([*args, "--out", str(tmp_path)]) == 2


def test_numerical_error_exit_code(tmp_path: Path, config_file: Path, capsys: pytest.CaptureFixture) -> None:
    assert run("offline", tmp_path, config_file, "--n", "999") == 3
    assert "RankDeficient" in capsys.readouterr().out


def test_infeasible_exit_code(tmp_path: Path, config_file: Path) -> None:
    args = ["--c-meta", "100", "--a-meta", "1.001", "--sigma", "0.1", "--p-target", "1e-9"]
    assert run("benchmark", tmp_path, config_file, *args) == 4


def test_missing_pairs_directory(tmp_path: Path, config_file: Path) -> None:
    empty = tmp_path / "empty"
    empty.mkdir()
    assert run("sensitivity", tmp_path / "out", config_file, "--pairs", str(empty)) == 2


@pytest.mark.slow
def test_reference_sensitivity_run(tmp_path: Path) -> None:
    out = tmp_path / "reference"
    assert main(["sensitivity", "--out", str(out), "--n", "8", "--N", "2000", "--threads", "4"]) == 0
    table = read_table(out / "sensitivity.csv").set_index("input")
    assert not table["unbounded"].any()
    assert table.loc["u0m", "estimate"] > table.loc["nu", "estimate"]
