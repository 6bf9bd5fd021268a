"""Files written to a run directory.

A run directory holds the effective configuration (``config.txt``), result
tables (CSV), key-value records, an optional chart and ``metadata.json``.
Result files depend only on the configuration and seed; timestamps and wall
times are confined to the metadata.
"""

import json
import platform
import time
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd
import scipy

from .config import RunConfig
from .errors import ConfigError
from .version import __version__

CONFIG_FILE = "config.txt"
METADATA_FILE = "metadata.json"
FLOAT_FORMAT = "%.17g"

PathLike = Union[str, Path]


def prepare_run_dir(path: PathLike, config: RunConfig) -> Path:
    """Create ``path`` if needed and write the configuration snapshot into it."""
    run_dir = Path(path)
    try:
        run_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create run directory: {exc.strerror}", path=str(run_dir)) from None
    (run_dir / CONFIG_FILE).write_text(config.to_text(), encoding="utf-8")
    return run_dir


def write_table(path: PathLike, rows: Union[pd.DataFrame, Sequence[Mapping[str, Any]]]) -> Path:
    frame = rows if isinstance(rows, pd.DataFrame) else pd.DataFrame(list(rows))
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return Path(path)


def read_table(path: PathLike) -> pd.DataFrame:
    try:
        return pd.read_csv(path, float_precision="round_trip")
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read table: {exc}", path=str(path)) from exc


def write_record(path: PathLike, record: Mapping[str, Any]) -> Path:
    """Write ``key = value`` lines, floats in round-trip precision."""
    lines = []
    for key, value in record.items():
        if isinstance(value, (float, np.floating)):
            value = repr(float(value))
        lines.append(f"{key} = {value}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return Path(path)


def read_record(path: PathLike) -> Dict[str, float]:
    """Read a file written by :func:`write_record`; every value must be numeric."""
    record: Dict[str, float] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read record: {exc.strerror}", path=str(path)) from None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        try:
            if not sep:
                raise ValueError(line)
            record[key.strip()] = float(value)
        except ValueError:
            raise ConfigError("malformed record line", path=str(path), line=lineno) from None
    return record


def write_metadata(
    run_dir: Path,
    command: str,
    config: RunConfig,
    wall_times: Mapping[str, float],
    extra: Optional[Mapping[str, Any]] = None,
) -> Path:
    """Versions, seed, wall times and a UTC timestamp of the run."""
    metadata = {
        "command": command,
        "seed": config.seed,
        "threads": config.threads,
        "finished_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "wall_times": dict(wall_times),
        "versions": {
            "certsobol": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "pandas": pd.__version__,
        },
        **(extra or {}),
    }
    path = run_dir / METADATA_FILE
    path.write_text(json.dumps(metadata, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def list_pairs_files(directory: PathLike) -> List[Path]:
    """``pairs_<input>.csv`` files of a directory, sorted by name."""
    found = sorted(Path(directory).glob("pairs_*.csv"))
    if not found:
        raise ConfigError("no pairs_*.csv files found", path=str(directory))
    return found
