import math
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from certsobol.errors import ConfigError, SolverDiverged
from certsobol.model_full import (
    Discretization,
    ParameterPoint,
    Trajectory,
    boundary_values,
    initial_condition,
    l2_norm,
    output_functional,
    output_operator_norm,
    solve_full,
    space_time_output,
    time_weights,
)


def test_discretization_defaults() -> None:
    disc = Discretization()
    assert disc.n_space == 60
    assert disc.n_steps == 5
    assert disc.h == pytest.approx(1 / 60)
    assert disc.grid[[0, -1]].tolist() == [0.0, 1.0]
    assert disc.times[-1] == pytest.approx(0.05)
    assert disc.quadrature_weights.sum() == pytest.approx(1.0)


@pytest.mark.parametrize(
    "kwargs",
    [{"n_space": 1}, {"dt": 0.0}, {"t_final": -1.0}, {"dt": 0.03, "t_final": 0.05}],
)
def test_discretization_invalid(kwargs: dict) -> None:
    with pytest.raises(ConfigError):
        Discretization(**kwargs)


def test_parameter_point() -> None:
    point = ParameterPoint(nu=2.0, u0m=-0.3)
    assert point.theta == pytest.approx(0.09)
    assert ParameterPoint.from_vector(point.as_vector()) == point
    with pytest.raises(ConfigError):
        ParameterPoint(nu=0.0, u0m=0.1)


def test_initial_condition_matches_boundary() -> None:
    disc = Discretization()
    params = ParameterPoint(nu=3.0, u0m=0.2)
    u0 = initial_condition(params, disc)
    b0, b1 = boundary_values(params)
    assert u0[0] == b0 == pytest.approx(0.04)
    assert u0[-1] == b1 == pytest.approx(0.04 + 5 * math.sin(0.5))


def test_solve_full_keeps_boundary_values() -> None:
    disc = Discretization()
    params = ParameterPoint(nu=1.0, u0m=-0.25)
    traj = solve_full(params, disc)
    b0, b1 = boundary_values(params)
    assert traj.states.shape == (6, 61)
    assert len(traj) == 6
    assert np.all(traj.states[:, 0] == b0)
    assert np.all(traj.states[:, -1] == b1)
    assert np.all(np.isfinite(traj.states))


def test_solve_full_deterministic() -> None:
    disc = Discretization()
    params = ParameterPoint(nu=7.5, u0m=0.1)
    assert np.array_equal(solve_full(params, disc).states, solve_full(params, disc).states)


def test_large_viscosity_gives_linear_profile() -> None:
    disc = Discretization()
    params = ParameterPoint(nu=1e9, u0m=0.3)
    b0, b1 = boundary_values(params)
    final = solve_full(params, disc).final
    assert final == pytest.approx(b0 + (b1 - b0) * disc.grid, abs=1e-6)


def test_divergence_cap() -> None:
    disc = Discretization()
    with pytest.raises(SolverDiverged) as exc_info:
        solve_full(ParameterPoint(nu=1.0, u0m=0.0), disc, divergence_cap=1.0)
    assert exc_info.value.context["step"] == 1
    assert exc_info.value.exit_code == 3


def test_output_functionals() -> None:
    disc = Discretization()
    states = np.full((disc.n_steps + 1, disc.n_space + 1), 2.0)
    traj = Trajectory(states=states, disc=disc, params=ParameterPoint(nu=1.0, u0m=0.0))
    assert output_functional(traj) == pytest.approx(2.0 * 61 / 60)
    assert space_time_output(traj) == pytest.approx(2.0 * disc.t_final)
    assert time_weights(disc).sum() == pytest.approx(disc.t_final)


def test_output_operator_norm() -> None:
    disc = Discretization()
    assert output_operator_norm(disc) == pytest.approx(math.sqrt(59 / 60))
    # the norm is attained by the interior constant field
    field = np.ones(61)
    field[[0, -1]] = 0.0
    assert abs(field.sum() / 60) == pytest.approx(output_operator_norm(disc) * l2_norm(field))


def test_l2_norm() -> None:
    assert l2_norm(np.ones(61)) == pytest.approx(1.0)
    assert l2_norm(np.zeros(11)) == 0.0


def test_trajectory_csv(tmp_path: Path) -> None:
    disc = Discretization()
    traj = solve_full(ParameterPoint(nu=4.0, u0m=0.1), disc)
    path = tmp_path / "traj.csv"
    traj.write_csv(path)
    frame = pd.read_csv(path)
    assert list(frame.columns[:2]) == ["t", "u0"]
    assert frame.shape == (6, 62)
    assert frame["t"].to_numpy() == pytest.approx(disc.times)
    assert frame.iloc[:, 1:].to_numpy() == pytest.approx(traj.states)


def test_output_is_even_in_boundary_offset() -> None:
    disc = Discretization()
    for nu in (1.0, 7.5, 20.0):
        plus = output_functional(solve_full(ParameterPoint(nu=nu, u0m=0.2), disc))
        minus = output_functional(solve_full(ParameterPoint(nu=nu, u0m=-0.2), disc))
        assert plus == minus


def test_time_step_self_convergence() -> None:
    params = ParameterPoint(nu=1.0, u0m=0.25)
    finals = [solve_full(params, Discretization(dt=dt)).final for dt in (0.0025, 0.00125, 0.000625)]
    coarse = np.max(np.abs(finals[0] - finals[1]))
    fine = np.max(np.abs(finals[1] - finals[2]))
    assert 1.5 <= coarse / fine <= 2.5
