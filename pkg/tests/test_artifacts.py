import json
from pathlib import Path

import pytest

from certsobol.artifacts import (
    list_pairs_files,
    prepare_run_dir,
    read_record,
    read_table,
    write_metadata,
    write_record,
    write_table,
)
from certsobol.config import RunConfig, load_config
from certsobol.errors import ConfigError


def test_prepare_run_dir(tmp_path: Path) -> None:
    config = RunConfig(N=42, seed=9)
    run_dir = prepare_run_dir(tmp_path / "a" / "b", config)
    assert run_dir.is_dir()
    assert load_config(run_dir / "config.txt") == config


def test_record_round_trip(tmp_path: Path) -> None:
    path = write_record(tmp_path / "record.txt", {"n_star": 11, "p": 0.1, "cost": 1.0 / 3.0})
    assert read_record(path) == {"n_star": 11.0, "p": 0.1, "cost": 1.0 / 3.0}


@pytest.mark.parametrize("text", ["n_star 11\n", "n_star = eleven\n"])
def test_read_record_errors(tmp_path: Path, text: str) -> None:
    path = tmp_path / "record.txt"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(ConfigError):
        read_record(path)
    with pytest.raises(ConfigError):
        read_record(tmp_path / "missing.txt")


def test_table_precision(tmp_path: Path) -> None:
    path = write_table(tmp_path / "table.csv", [{"n": 2, "value": 0.1 + 0.2}])
    frame = read_table(path)
    assert frame.loc[0, "value"] == 0.1 + 0.2
    with pytest.raises(ConfigError):
        read_table(tmp_path / "missing.csv")


def test_write_metadata(tmp_path: Path) -> None:
    path = write_metadata(tmp_path, "sensitivity", RunConfig(seed=5), {"online": 1.5}, extra={"speedup": 4.0})
    metadata = json.loads(path.read_text(encoding="utf-8"))
    assert metadata["command"] == "sensitivity"
    assert metadata["seed"] == 5
    assert metadata["wall_times"] == {"online": 1.5}
    assert metadata["speedup"] == 4.0
    assert metadata["finished_at"].endswith("Z")


def test_list_pairs_files(tmp_path: Path) -> None:
    with pytest.raises(ConfigError):
        list_pairs_files(tmp_path)
    for name in ("pairs_u0m.csv", "pairs_nu.csv", "other.csv"):
        (tmp_path / name).write_text("", encoding="utf-8")
    assert [path.name for path in list_pairs_files(tmp_path)] == ["pairs_nu.csv", "pairs_u0m.csv"]
