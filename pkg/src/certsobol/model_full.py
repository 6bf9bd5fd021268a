"""Reference finite-difference solver for the parametrized viscous Burgers problem.

The problem solved on ``[0, 1] x [0, T]`` is::

    u_t + (u^2 / 2)_x - nu * u_xx = 1
    u(0, x) = u0m^2 + 5 sin(0.5 x)
    u(t, 0) = u0m^2,  u(t, 1) = u0m^2 + 5 sin(0.5)

Time stepping is semi-implicit: backward Euler for the diffusion, explicit
centred conservative convection and explicit forcing. Space is discretized
with second-order centred differences on a uniform grid of ``n_space``
intervals, Dirichlet values are imposed strongly.
"""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import ClassVar, Tuple, Union

import numpy as np
import pandas as pd
from numpy.typing import NDArray
from scipy.linalg import solve_banded

from .errors import ConfigError, SolverDiverged

SpatialState = NDArray[np.float64]

FORCING = 1.0
SINE_AMPLITUDE = 5.0
SINE_FREQUENCY = 0.5
DEFAULT_DIVERGENCE_CAP = 1e6
STEP_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ParameterPoint:
    """Uncertain inputs ``X = (nu, u0m)`` of the Burgers model."""

    INPUT_NAMES: ClassVar[Tuple[str, str]] = ("nu", "u0m")

    nu: float
    u0m: float

    def __post_init__(self) -> None:
        if not self.nu > 0:
            raise ConfigError("viscosity must be positive", nu=self.nu)

    @property
    def theta(self) -> float:
        """Constant boundary offset ``u0m^2``."""
        return self.u0m * self.u0m

    @classmethod
    def from_vector(cls, x: NDArray[np.float64]) -> "ParameterPoint":
        return cls(nu=float(x[0]), u0m=float(x[1]))

    def as_vector(self) -> NDArray[np.float64]:
        return np.array([self.nu, self.u0m])


@dataclass(frozen=True)
class Discretization:
    """Uniform space-time grid.

    :param n_space: number of spatial intervals (the grid has ``n_space + 1`` nodes)
    :type n_space: int
    :param dt: time step
    :type dt: float
    :param t_final: time horizon, an integer multiple of ``dt``
    :type t_final: float
    :raises ConfigError: if the grid is too coarse or ``t_final / dt`` is not an integer
    """

    n_space: int = 60
    dt: float = 0.01
    t_final: float = 0.05
    n_steps: int = field(init=False)

    def __post_init__(self) -> None:
        if self.n_space < 2:
            raise ConfigError("n_space must be at least 2", n_space=self.n_space)
        if not self.dt > 0:
            raise ConfigError("dt must be positive", dt=self.dt)
        if self.t_final < 0:
            raise ConfigError("t_final must be non-negative", t_final=self.t_final)
        ratio = self.t_final / self.dt
        steps = round(ratio)
        if abs(ratio - steps) > STEP_TOLERANCE:
            raise ConfigError("t_final must be an integer multiple of dt", t_final=self.t_final, dt=self.dt)
        object.__setattr__(self, "n_steps", int(steps))

    @property
    def h(self) -> float:
        return 1.0 / self.n_space

    @property
    def grid(self) -> NDArray[np.float64]:
        return np.linspace(0.0, 1.0, self.n_space + 1)

    @property
    def times(self) -> NDArray[np.float64]:
        return self.dt * np.arange(self.n_steps + 1)

    @property
    def quadrature_weights(self) -> NDArray[np.float64]:
        """Trapezoidal weights of the uniform grid."""
        weights = np.full(self.n_space + 1, self.h)
        weights[[0, -1]] *= 0.5
        return weights


@dataclass(frozen=True)
class Trajectory:
    """States ``u(t_k, .)`` for ``k = 0..K`` stored row-wise."""

    states: NDArray[np.float64]
    disc: Discretization
    params: ParameterPoint

    @property
    def final(self) -> SpatialState:
        return self.states[-1]

    def __len__(self) -> int:
        return len(self.states)

    def to_frame(self) -> pd.DataFrame:
        columns = [f"u{i}" for i in range(self.disc.n_space + 1)]
        frame = pd.DataFrame(self.states, columns=columns)
        frame.insert(0, "t", self.disc.times)
        return frame

    def write_csv(self, path: Union[str, Path]) -> None:
        self.to_frame().to_csv(path, index=False)


def boundary_values(params: ParameterPoint) -> Tuple[float, float]:
    """Dirichlet data compatible with the initial condition."""
    b0 = params.theta
    return b0, b0 + SINE_AMPLITUDE * math.sin(SINE_FREQUENCY)


def lift_profile(disc: Discretization) -> SpatialState:
    """The ``u0m = 0`` initial condition ``5 sin(0.5 x)``, exact at both endpoints."""
    profile = SINE_AMPLITUDE * np.sin(SINE_FREQUENCY * disc.grid)
    profile[0] = 0.0
    profile[-1] = SINE_AMPLITUDE * math.sin(SINE_FREQUENCY)
    return profile


def initial_condition(params: ParameterPoint, disc: Discretization) -> SpatialState:
    return params.theta + lift_profile(disc)


def _implicit_banded(nu: float, disc: Discretization) -> NDArray[np.float64]:
    r = disc.dt * nu / disc.h**2
    m = disc.n_space - 1
    ab = np.empty((3, m))
    ab[0, :] = -r
    ab[1, :] = 1.0 + 2.0 * r
    ab[2, :] = -r
    return ab


def check_state(state: SpatialState, divergence_cap: float = DEFAULT_DIVERGENCE_CAP) -> None:
    """Raise :class:`SolverDiverged` on non-finite or oversized nodal values."""
    if not np.all(np.isfinite(state)):
        raise SolverDiverged("non-finite nodal value")
    peak = float(np.max(np.abs(state)))
    if peak > divergence_cap:
        raise SolverDiverged("nodal value exceeds the divergence cap", peak=peak, cap=divergence_cap)


def step(
    state: SpatialState,
    params: ParameterPoint,
    disc: Discretization,
    *,
    forcing: float = FORCING,
    divergence_cap: float = DEFAULT_DIVERGENCE_CAP,
) -> SpatialState:
    """Advance one time step.

    :param state: state at ``t`` satisfying the boundary conditions
    :type state: SpatialState
    :param params: model parameters
    :type params: ParameterPoint
    :param disc: discretization
    :type disc: Discretization
    :param forcing: constant right-hand side
    :type forcing: float
    :param divergence_cap: largest admissible nodal magnitude
    :type divergence_cap: float
    :return: state at ``t + dt`` with the boundary nodes re-imposed
    :rtype: SpatialState
    :raises SolverDiverged: if the new state is non-finite or exceeds the cap
    """
    h, dt = disc.h, disc.dt
    b0, b1 = boundary_values(params)
    r = dt * params.nu / h**2

    flux = 0.5 * state * state
    convection = (flux[2:] - flux[:-2]) / (2.0 * h)
    rhs = state[1:-1] + dt * (forcing - convection)
    rhs[0] += r * b0
    rhs[-1] += r * b1

    new_state = np.empty_like(state)
    new_state[0] = b0
    new_state[-1] = b1
    new_state[1:-1] = solve_banded((1, 1), _implicit_banded(params.nu, disc), rhs)
    check_state(new_state, divergence_cap)
    return new_state


def solve_full(
    params: ParameterPoint,
    disc: Discretization,
    *,
    forcing: float = FORCING,
    divergence_cap: float = DEFAULT_DIVERGENCE_CAP,
) -> Trajectory:
    """Iterate :func:`step` from the initial condition up to ``t_final``.

    :raises SolverDiverged: with the offending step index in its context
    """
    states = np.empty((disc.n_steps + 1, disc.n_space + 1))
    states[0] = initial_condition(params, disc)
    for k in range(disc.n_steps):
        try:
            states[k + 1] = step(states[k], params, disc, forcing=forcing, divergence_cap=divergence_cap)
        except SolverDiverged as exc:
            raise exc.with_context(step=k + 1, nu=params.nu, u0m=params.u0m) from None
    return Trajectory(states=states, disc=disc, params=params)


def output_functional(traj: Trajectory) -> float:
    """``(1/n_space) * sum_i u(T, x_i)``; the divisor is the number of intervals."""
    return float(np.sum(traj.final) / traj.disc.n_space)


def time_weights(disc: Discretization) -> NDArray[np.float64]:
    """Trapezoidal weights over ``t_0..t_K``."""
    if disc.n_steps == 0:
        return np.zeros(1)
    weights = np.full(disc.n_steps + 1, disc.dt)
    weights[[0, -1]] *= 0.5
    return weights


def space_time_output(traj: Trajectory) -> float:
    """Trapezoidal approximation of the space-time integral of ``u``."""
    disc = traj.disc
    spatial = traj.states @ disc.quadrature_weights
    return float(time_weights(disc) @ spatial)


def output_operator_norm(disc: Discretization) -> float:
    """Discrete L2 operator norm of the output functional on fields vanishing at the boundary.

    On such fields ``(1/n_space) * sum(u)`` coincides with the trapezoidal integral, so the
    same constant also bounds the spatial integral used by the space-time output.
    """
    return math.sqrt((disc.n_space - 1) / disc.n_space)


def l2_norm(state: SpatialState) -> float:
    """Trapezoidal discrete L2 norm on the uniform grid of ``len(state)`` nodes."""
    h = 1.0 / (len(state) - 1)
    squares = state * state
    return math.sqrt(h * (np.sum(squares) - 0.5 * (squares[0] + squares[-1])))
