"""Run configuration.

Configuration files are flat ``key = value`` text; ``#`` starts a comment.
Effective values are resolved as defaults, then the file, then command-line
overrides. Every key of :class:`RunConfig` may appear in a file.
"""

import dataclasses
import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple, Union

from .errors import ConfigError
from .model_full import Discretization, ParameterPoint
from .reduced_basis import OUTPUT_KINDS, training_grid
from .rng import check_seed
from .sobol import InputRange


@dataclass(frozen=True)
class RunConfig:
    """All knobs of an experiment; the defaults reproduce the reference Burgers setup.

    :raises ConfigError: on any invalid value
    """

    n_space: int = 60
    dt: float = 0.01
    t_final: float = 0.05
    nu_range: Tuple[float, float] = (1.0, 20.0)
    u0m_range: Tuple[float, float] = (-0.3, 0.3)
    training_nu: int = 5
    training_u0m: int = 5
    n: int = 8
    N: int = 300
    B: int = 300
    alpha: float = 0.05
    seed: int = 0
    threads: int = 1
    out: str = "runs"
    output: str = "final"
    divergence_cap: float = 1e6
    bound_cap: float = 1e3

    def __post_init__(self) -> None:
        Discretization(n_space=self.n_space, dt=self.dt, t_final=self.t_final)
        if not 0 < self.nu_range[0] <= self.nu_range[1]:
            raise ConfigError("nu_range must be positive and ordered", nu_range=self.nu_range)
        if not self.u0m_range[0] <= self.u0m_range[1]:
            raise ConfigError("u0m_range must be ordered", u0m_range=self.u0m_range)
        for name in ("training_nu", "training_u0m", "n", "threads"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be at least 1", **{name: getattr(self, name)})
        if self.N < 2:
            raise ConfigError("N must be at least 2", N=self.N)
        if self.B < 2:
            raise ConfigError("B must be at least 2", B=self.B)
        if not 0 < self.alpha < 1:
            raise ConfigError("alpha must lie in (0, 1)", alpha=self.alpha)
        check_seed(self.seed)
        if self.output not in OUTPUT_KINDS:
            raise ConfigError("unknown output functional", output=self.output, choices=OUTPUT_KINDS)
        for name in ("divergence_cap", "bound_cap"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ConfigError(f"{name} must be positive and finite", **{name: value})

    @property
    def disc(self) -> Discretization:
        return Discretization(n_space=self.n_space, dt=self.dt, t_final=self.t_final)

    def input_ranges(self) -> List[InputRange]:
        return [InputRange("nu", *self.nu_range), InputRange("u0m", *self.u0m_range)]

    def training_points(self) -> List[ParameterPoint]:
        return training_grid(self.nu_range, self.u0m_range, self.training_nu, self.training_u0m)

    def replace(self, **overrides: Any) -> "RunConfig":
        """Copy with the non-``None`` overrides applied."""
        changes = {key: value for key, value in overrides.items() if value is not None}
        unknown = set(changes) - _FIELD_NAMES
        if unknown:
            raise ConfigError("unknown configuration keys", keys=sorted(unknown))
        return dataclasses.replace(self, **changes)

    def to_text(self) -> str:
        """Render as a configuration file that :func:`parse_config` reads back."""
        lines = []
        for field in fields(self):
            value = getattr(self, field.name)
            if isinstance(value, tuple):
                value = ", ".join(repr(float(v)) for v in value)
            elif isinstance(value, float):
                value = repr(value)
            lines.append(f"{field.name} = {value}")
        return "\n".join(lines) + "\n"


def _parse_int(text: str) -> int:
    return int(text)


def _parse_float(text: str) -> float:
    return float(text)


def _parse_pair(text: str) -> Tuple[float, float]:
    low, high = (float(part) for part in text.split(","))
    return low, high


_PARSERS: Dict[type, Callable[[str], Any]] = {int: _parse_int, float: _parse_float, str: str}
_FIELD_NAMES = {field.name for field in fields(RunConfig)}


def _converter(name: str) -> Callable[[str], Any]:
    default = getattr(RunConfig, name)
    if isinstance(default, tuple):
        return _parse_pair
    return _PARSERS[type(default)]


def parse_config(text: str, source: str = "<string>") -> Dict[str, Any]:
    """Parse ``key = value`` lines into typed values.

    :param text: configuration text
    :type text: str
    :param source: name used in error messages
    :type source: str
    :return: the keys present in the text with converted values
    :rtype: Dict[str, Any]
    :raises ConfigError: on syntax errors, unknown or repeated keys and unparsable values
    """
    values: Dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError("expected 'key = value'", source=source, line=lineno)
        if key not in _FIELD_NAMES:
            raise ConfigError("unknown configuration key", source=source, line=lineno, key=key)
        if key in values:
            raise ConfigError("repeated configuration key", source=source, line=lineno, key=key)
        try:
            values[key] = _converter(key)(value)
        except ValueError:
            raise ConfigError("invalid value", source=source, line=lineno, key=key, value=value) from None
    return values


def load_config(path: Optional[Union[str, Path]] = None, overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    """Resolve the effective configuration: defaults, then ``path``, then ``overrides``.

    ``None`` values in ``overrides`` mean "not given" and are ignored.
    """
    config = RunConfig()
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read configuration file: {exc.strerror}", path=str(path)) from None
        config = config.replace(**parse_config(text, str(path)))
    if overrides:
        config = config.replace(**overrides)
    return config
