"""Reduced-basis metamodel of the Burgers solver with certified error bounds.

Offline, full trajectories at training parameters are compressed by POD into
``n`` orthonormal modes and every operator of the semi-implicit scheme is
projected onto them. Online, the projected scheme is advanced with ``n x n``
solves and a state error bound ``eps_u`` is accumulated from the norm of the
full-scheme residual of the reduced iterate. The derivation of the bound is
written out in ``docs/error_bound.md``.

A reduced state reads ``u = u0m^2 + g + sum_j a_j phi_j`` where ``g`` is the
lift (the ``u0m = 0`` initial condition) and the modes vanish on the boundary.
The constant ``u0m^2`` is annihilated by both difference operators, so the
initial condition is represented exactly with ``a = 0``.
"""

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import NDArray

from .errors import BasisFormatError, BoundBlowup, ConfigError, RankDeficient, SolverDiverged
from .model_full import (
    DEFAULT_DIVERGENCE_CAP,
    FORCING,
    Discretization,
    ParameterPoint,
    SpatialState,
    lift_profile,
    output_operator_norm,
    solve_full,
    time_weights,
)
from .parallel import thread_map

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
EIGEN_RELATIVE_TOL = 1e-12
ORTHONORMALITY_TOL = 1e-10
DEFAULT_BOUND_CAP = 1e3

OutputKind = Literal["final", "space_time"]
OUTPUT_KINDS: Tuple[str, ...] = ("final", "space_time")

_OPERATOR_FIELDS = (
    "diffusion",
    "lift_diffusion",
    "lift_convection",
    "shift_convection",
    "shift_coupling",
    "lift_coupling",
    "quadratic",
    "forcing_load",
    "residual_factor",
)


def significant_rank(spectrum: NDArray[np.float64]) -> int:
    """Number of Gram eigenvalues above ``EIGEN_RELATIVE_TOL`` times the largest."""
    largest = spectrum[0] if len(spectrum) else 0.0
    return int(np.sum(spectrum > EIGEN_RELATIVE_TOL * largest)) if largest > 0 else 0


@dataclass(frozen=True)
class SnapshotSet:
    """Every time-step state of the full trajectories at the training points.

    ``owners[s]`` is the index in ``parameters`` of the trajectory state ``s`` belongs to.
    """

    parameters: Tuple[ParameterPoint, ...]
    states: NDArray[np.float64]
    owners: NDArray[np.int64]
    disc: Discretization

    def __len__(self) -> int:
        return len(self.states)

    @property
    def thetas(self) -> NDArray[np.float64]:
        return np.array([self.parameters[i].theta for i in self.owners])


@dataclass(frozen=True)
class ReducedBasis:
    """POD modes, lift and every projected operator needed online.

    Projected operators use the discrete L2 inner product ``<v, w> = h * sum(v_i w_i)``
    over the interior nodes (the modes vanish on the boundary):

    * ``diffusion[i, j] = <phi_i, D2 phi_j>``
    * ``lift_diffusion[i] = <phi_i, D2 g>``
    * ``lift_convection[i] = <phi_i, D1(g^2) / 2>``
    * ``shift_convection[i] = <phi_i, D1 g>``
    * ``shift_coupling[i, j] = <phi_i, D1 phi_j>``
    * ``lift_coupling[i, j] = <phi_i, D1(g phi_j)>``
    * ``quadratic[i, j, l] = <phi_i, D1(phi_j phi_l) / 2>``
    * ``forcing_load[i] = <phi_i, 1>``

    ``residual_factor`` is the triangular QR factor of the residual vectors, scaled so
    that the L2 norm of the residual is the Euclidean norm of ``residual_factor @ coefficients``.
    """

    disc: Discretization
    modes: NDArray[np.float64]
    lift: NDArray[np.float64]
    spectrum: NDArray[np.float64]
    diffusion: NDArray[np.float64]
    lift_diffusion: NDArray[np.float64]
    lift_convection: NDArray[np.float64]
    shift_convection: NDArray[np.float64]
    shift_coupling: NDArray[np.float64]
    lift_coupling: NDArray[np.float64]
    quadratic: NDArray[np.float64]
    forcing_load: NDArray[np.float64]
    residual_factor: NDArray[np.float64]

    @property
    def size(self) -> int:
        return len(self.modes)

    @property
    def rank(self) -> int:
        """Largest basis size the snapshots behind this basis support."""
        return significant_rank(self.spectrum)

    @property
    def mode_sup(self) -> NDArray[np.float64]:
        return np.max(np.abs(self.modes), axis=1)

    @property
    def lift_sup(self) -> float:
        return float(np.max(np.abs(self.lift)))

    def pod_energy(self) -> NDArray[np.float64]:
        """Cumulative share of snapshot energy captured by the first ``k`` POD modes."""
        positive = np.clip(self.spectrum, 0.0, None)
        return np.cumsum(positive) / np.sum(positive)

    def save(self, path: Union[str, Path]) -> None:
        """Write the basis as a JSON document (identical bytes for identical bases)."""
        document: Dict[str, Any] = {
            "format_version": FORMAT_VERSION,
            "disc": {"n_space": self.disc.n_space, "dt": self.disc.dt, "t_final": self.disc.t_final},
            "spectrum": self.spectrum.tolist(),
            "modes": self.modes.tolist(),
            "lift": self.lift.tolist(),
        }
        for name in _OPERATOR_FIELDS:
            document[name] = getattr(self, name).tolist()
        Path(path).write_text(json.dumps(document, separators=(",", ":")) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ReducedBasis":
        """Read a basis written by :meth:`save` and check its modes.

        :raises BasisFormatError: on an unknown format version, missing fields or
            modes that are not orthonormal and boundary-vanishing
        """
        try:
            document = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise BasisFormatError(f"cannot read basis file: {exc}", path=str(path)) from exc
        version = document.get("format_version")
        if version != FORMAT_VERSION:
            raise BasisFormatError("unsupported basis format version", path=str(path), version=version)
        try:
            disc = Discretization(**document["disc"])
            arrays = {
                name: np.asarray(document[name], dtype=np.float64)
                for name in ("spectrum", "modes", "lift") + _OPERATOR_FIELDS
            }
        except (KeyError, TypeError) as exc:
            raise BasisFormatError(f"malformed basis file: {exc}", path=str(path)) from exc
        rb = cls(disc=disc, **arrays)
        validate_basis(rb)
        return rb


@dataclass(frozen=True)
class ReducedTrajectory:
    """Reduced coefficients at ``t_0..t_K`` (shape ``(K + 1, n)``)."""

    coeffs: NDArray[np.float64]
    params: ParameterPoint


@dataclass(frozen=True)
class CertifiedOutput:
    f_tilde: float
    eps: float
    eps_u_series: NDArray[np.float64]


def training_grid(
    nu_range: Tuple[float, float],
    u0m_range: Tuple[float, float],
    n_nu: int = 5,
    n_u0m: int = 5,
) -> List[ParameterPoint]:
    """Tensor grid, geometric in ``nu`` and uniform in ``u0m``."""
    if n_nu < 1 or n_u0m < 1:
        raise ConfigError("training grid needs at least one point per axis", n_nu=n_nu, n_u0m=n_u0m)
    nus = np.geomspace(nu_range[0], nu_range[1], n_nu)
    u0ms = np.linspace(u0m_range[0], u0m_range[1], n_u0m)
    return [ParameterPoint(nu=float(nu), u0m=float(u0m)) for nu in nus for u0m in u0ms]


def collect_snapshots(
    training: Sequence[ParameterPoint],
    disc: Discretization,
    *,
    divergence_cap: float = DEFAULT_DIVERGENCE_CAP,
    threads: int = 1,
) -> SnapshotSet:
    """Run the full solver at each training point and keep every time-step state.

    :raises ConfigError: if the training set is empty
    :raises SolverDiverged: tagged with the failing training point
    """
    training = tuple(training)
    if not training:
        raise ConfigError("training set is empty")

    def run(point: ParameterPoint) -> NDArray[np.float64]:
        try:
            return solve_full(point, disc, divergence_cap=divergence_cap).states
        except SolverDiverged as exc:
            raise exc.with_context(training_point=(point.nu, point.u0m)) from None

    trajectories = thread_map(run, training, threads)
    states = np.concatenate(trajectories, axis=0)
    owners = np.repeat(np.arange(len(training)), disc.n_steps + 1)
    logger.debug("collected %d snapshots from %d training points", len(states), len(training))
    return SnapshotSet(parameters=training, states=states, owners=owners, disc=disc)


def _second_difference(v: NDArray[np.float64], h: float) -> NDArray[np.float64]:
    return (v[..., :-2] - 2.0 * v[..., 1:-1] + v[..., 2:]) / (h * h)


def _first_difference(v: NDArray[np.float64], h: float) -> NDArray[np.float64]:
    return (v[..., 2:] - v[..., :-2]) / (2.0 * h)


def _orthonormalize(interior: NDArray[np.float64], h: float) -> NDArray[np.float64]:
    """Orthonormalize columns in the ``h``-weighted inner product, keeping their orientation."""
    scaled = math.sqrt(h) * interior
    for _ in range(2):
        q, r = np.linalg.qr(scaled)
        signs = np.where(np.diag(r) < 0, -1.0, 1.0)
        scaled = q * signs
    return scaled / math.sqrt(h)


def _quadratic_pairs(n: int) -> Tuple[NDArray[np.intp], NDArray[np.intp]]:
    return np.triu_indices(n)


def _residual_vectors(
    modes: NDArray[np.float64], lift: NDArray[np.float64], h: float
) -> NDArray[np.float64]:
    """Columns of the affine expansion of the interior residual (see :func:`_residual_coefficients`)."""
    n = len(modes)
    interior = modes[:, 1:-1]
    rows, cols = _quadratic_pairs(n)
    pair_weight = np.where(rows == cols, 0.5, 1.0)
    quadratic = pair_weight[:, None] * _first_difference(modes[rows] * modes[cols], h)
    columns = [
        interior,
        -_second_difference(modes, h),
        -_second_difference(lift, h)[None, :],
        0.5 * _first_difference(lift * lift, h)[None, :],
        _first_difference(lift, h)[None, :],
        _first_difference(modes, h),
        _first_difference(lift * modes, h),
        quadratic,
        -np.ones((1, interior.shape[1])),
    ]
    return np.concatenate(columns, axis=0).T


def _residual_coefficients(
    a_old: NDArray[np.float64],
    a_new: NDArray[np.float64],
    nu: NDArray[np.float64],
    theta: NDArray[np.float64],
    forcing: float,
    dt: float,
) -> NDArray[np.float64]:
    m, n = a_old.shape
    rows, cols = _quadratic_pairs(n)
    ones = np.ones((m, 1))
    return np.concatenate(
        [
            (a_new - a_old) / dt,
            nu[:, None] * a_new,
            nu[:, None],
            ones,
            theta[:, None],
            theta[:, None] * a_old,
            a_old,
            a_old[:, rows] * a_old[:, cols],
            forcing * ones,
        ],
        axis=1,
    )


def build_basis(snapshots: SnapshotSet, n: int) -> ReducedBasis:
    """POD of the lifted snapshots and offline projection of the scheme.

    :param snapshots: snapshot set from :func:`collect_snapshots`
    :type snapshots: SnapshotSet
    :param n: number of modes to retain
    :type n: int
    :return: the reduced basis with all projected operators
    :rtype: ReducedBasis
    :raises RankDeficient: if fewer than ``n`` Gram eigenvalues exceed ``1e-12`` times the largest
    """
    if n < 1:
        raise ConfigError("basis size must be at least 1", n=n)
    if n > len(snapshots):
        raise RankDeficient("basis size exceeds the number of snapshots", n=n, snapshots=len(snapshots))
    disc = snapshots.disc
    h = disc.h
    lift = lift_profile(disc)

    fluctuations = (snapshots.states - snapshots.thetas[:, None] - lift)[:, 1:-1]
    gram = h * fluctuations @ fluctuations.T
    eigenvalues, eigenvectors = np.linalg.eigh(gram)
    eigenvalues, eigenvectors = eigenvalues[::-1], eigenvectors[:, ::-1]
    available = significant_rank(eigenvalues)
    if available < n:
        raise RankDeficient("snapshot Gram matrix has too few significant eigenvalues", n=n, available=available)

    interior = fluctuations.T @ eigenvectors[:, :n] / np.sqrt(eigenvalues[:n])
    interior = _orthonormalize(interior, h)
    peaks = np.argmax(np.abs(interior), axis=0)
    interior = interior * np.sign(interior[peaks, np.arange(n)])

    modes = np.zeros((n, disc.n_space + 1))
    modes[:, 1:-1] = interior.T
    logger.debug("built %d modes, captured energy %.12g", n, np.sum(eigenvalues[:n]) / np.sum(eigenvalues.clip(0)))
    return _assemble(disc, modes, lift, eigenvalues)


def _assemble(
    disc: Discretization, modes: NDArray[np.float64], lift: NDArray[np.float64], spectrum: NDArray[np.float64]
) -> ReducedBasis:
    h = disc.h
    interior = modes[:, 1:-1]

    def project(vectors: NDArray[np.float64]) -> NDArray[np.float64]:
        return h * (vectors @ interior.T).T

    pairs = 0.5 * _first_difference(modes[:, None, :] * modes[None, :, :], h)
    residual = _residual_vectors(modes, lift, h)
    _, factor = np.linalg.qr(residual)
    return ReducedBasis(
        disc=disc,
        modes=modes,
        lift=lift,
        spectrum=spectrum,
        diffusion=project(_second_difference(modes, h)),
        lift_diffusion=project(_second_difference(lift, h)),
        lift_convection=project(0.5 * _first_difference(lift * lift, h)),
        shift_convection=project(_first_difference(lift, h)),
        shift_coupling=project(_first_difference(modes, h)),
        lift_coupling=project(_first_difference(lift * modes, h)),
        quadratic=h * np.einsum("ix,jlx->ijl", interior, pairs),
        forcing_load=h * interior.sum(axis=1),
        residual_factor=math.sqrt(h) * factor,
    )


def validate_basis(rb: ReducedBasis, tol: float = ORTHONORMALITY_TOL) -> None:
    """Check orthonormality and boundary vanishing of the modes.

    :raises BasisFormatError: if a check fails or array shapes are inconsistent
    """
    n = rb.size
    nodes = rb.disc.n_space + 1
    if rb.modes.ndim != 2 or rb.modes.shape[1] != nodes or rb.lift.shape != (nodes,) or n < 1:
        raise BasisFormatError("mode array shape does not match the grid", shape=rb.modes.shape, nodes=nodes)
    if rb.quadratic.shape != (n, n, n) or rb.diffusion.shape != (n, n):
        raise BasisFormatError("projected operator shapes do not match the basis size", n=n)
    if np.any(rb.modes[:, [0, -1]] != 0.0):
        raise BasisFormatError("modes do not vanish on the boundary")
    gram = rb.disc.h * rb.modes[:, 1:-1] @ rb.modes[:, 1:-1].T
    deviation = float(np.max(np.abs(gram - np.eye(n))))
    if deviation > tol:
        raise BasisFormatError("modes are not orthonormal", deviation=deviation)


def reconstruct(
    rb: ReducedBasis, coeffs: NDArray[np.float64], params: Optional[ParameterPoint] = None
) -> SpatialState:
    """Map reduced coefficients back to nodal values.

    :param coeffs: one coefficient vector, or a stack of them (one per row)
    :param params: supplies the constant offset ``u0m^2``; ``None`` means ``u0m = 0``
    :return: ``lift + u0m^2 + sum_j coeffs_j * mode_j``
    """
    theta = params.theta if params is not None else 0.0
    return (rb.lift + theta) + np.asarray(coeffs) @ rb.modes


def project(rb: ReducedBasis, state: SpatialState, params: Optional[ParameterPoint] = None) -> NDArray[np.float64]:
    """Coefficients of the orthogonal projection of ``state`` onto the affine reduced space."""
    theta = params.theta if params is not None else 0.0
    fluctuation = (np.asarray(state) - theta - rb.lift)[..., 1:-1]
    return rb.disc.h * fluctuation @ rb.modes[:, 1:-1].T


def solve_reduced_batch(
    rb: ReducedBasis,
    nu: NDArray[np.float64],
    theta: NDArray[np.float64],
    *,
    forcing: float = FORCING,
    divergence_cap: float = DEFAULT_DIVERGENCE_CAP,
) -> NDArray[np.float64]:
    """Advance the Galerkin-projected scheme for many parameter points at once.

    :param nu: viscosities, shape ``(m,)``
    :param theta: offsets ``u0m^2``, shape ``(m,)``
    :return: coefficients of shape ``(m, K + 1, n)``
    :raises SolverDiverged: with the row index of the first diverging point
    """
    nu = np.asarray(nu, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    disc = rb.disc
    m, n = len(nu), rb.size
    dt = disc.dt
    coeffs = np.zeros((m, disc.n_steps + 1, n))
    implicit = np.eye(n) - dt * nu[:, None, None] * rb.diffusion
    mode_sup = rb.mode_sup
    for k in range(disc.n_steps):
        a = coeffs[:, k]
        quadratic = np.einsum("ijl,mj,ml->mi", rb.quadratic, a, a)
        explicit = (
            nu[:, None] * rb.lift_diffusion
            - rb.lift_convection
            - theta[:, None] * rb.shift_convection
            - theta[:, None] * (a @ rb.shift_coupling.T)
            - a @ rb.lift_coupling.T
            - quadratic
            + forcing * rb.forcing_load
        )
        coeffs[:, k + 1] = np.linalg.solve(implicit, (a + dt * explicit)[..., None])[..., 0]
        sup = theta + rb.lift_sup + np.abs(coeffs[:, k + 1]) @ mode_sup
        bad = ~np.isfinite(sup) | (sup > divergence_cap)
        if np.any(bad):
            row = int(np.argmax(bad))
            raise SolverDiverged("reduced solution diverged", step=k + 1, row=row, nu=float(nu[row]))
    return coeffs


def solve_reduced(
    rb: ReducedBasis,
    params: ParameterPoint,
    *,
    forcing: float = FORCING,
    divergence_cap: float = DEFAULT_DIVERGENCE_CAP,
) -> ReducedTrajectory:
    """Galerkin projection of the full semi-implicit scheme onto the reduced space."""
    coeffs = solve_reduced_batch(
        rb, np.array([params.nu]), np.array([params.theta]), forcing=forcing, divergence_cap=divergence_cap
    )
    return ReducedTrajectory(coeffs=coeffs[0], params=params)


def coercivity(nu: NDArray[np.float64], disc: Discretization) -> NDArray[np.float64]:
    """Smallest eigenvalue of the implicit operator ``I - dt * nu * D2`` on interior nodes."""
    h = disc.h
    kappa_min = 4.0 / h**2 * math.sin(math.pi * h / 2.0) ** 2
    return 1.0 + disc.dt * np.asarray(nu) * kappa_min


def convection_gain(nu: NDArray[np.float64], disc: Discretization) -> NDArray[np.float64]:
    """Bound on the norm of ``(I - dt * nu * D2)^{-1} D1`` on fields vanishing at the boundary.

    It is the largest ``sqrt(kappa_j) / (1 + dt * nu * kappa_j)`` over the Dirichlet
    Laplacian eigenvalues ``kappa_j``; the function is unimodal in ``kappa``, so only
    the two eigenvalues around ``1 / (dt * nu)`` need to be evaluated.
    """
    nu = np.asarray(nu, dtype=np.float64)
    h = disc.h
    c = disc.dt * nu
    peak = 2.0 / (math.pi * h) * np.arcsin(np.minimum(1.0, h / (2.0 * np.sqrt(c))))
    best = np.zeros_like(c)
    for index in (np.floor(peak), np.ceil(peak)):
        j = np.clip(index, 1, disc.n_space - 1)
        kappa = 4.0 / h**2 * np.sin(j * math.pi * h / 2.0) ** 2
        best = np.maximum(best, np.sqrt(kappa) / (1.0 + c * kappa))
    return best


def error_bound_batch(
    rb: ReducedBasis,
    coeffs: NDArray[np.float64],
    nu: NDArray[np.float64],
    theta: NDArray[np.float64],
    *,
    forcing: float = FORCING,
    bound_cap: float = DEFAULT_BOUND_CAP,
) -> NDArray[np.float64]:
    """Certified L2 state error bounds for a batch of reduced trajectories.

    Recursion per step ``k`` (see ``docs/error_bound.md``)::

        eps[k+1] = max(eps[k], eps[k] / sigma + dt * lam[k] * eps[k] + dt * |R[k]| / sigma)
        lam[k]   = gamma / 2 * (2 * sup|u~[k]| + sqrt(n_space) * eps[k])

    :return: bounds of shape ``(m, K + 1)``, non-decreasing along each row
    :raises BoundBlowup: if a bound exceeds ``bound_cap``
    """
    nu = np.asarray(nu, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    disc = rb.disc
    dt = disc.dt
    m = len(nu)
    sigma = coercivity(nu, disc)
    gamma = convection_gain(nu, disc)
    root_n = math.sqrt(disc.n_space)
    mode_sup = rb.mode_sup
    series = np.zeros((m, disc.n_steps + 1))
    eps = np.zeros(m)
    for k in range(disc.n_steps):
        a_old, a_new = coeffs[:, k], coeffs[:, k + 1]
        residual = np.linalg.norm(
            _residual_coefficients(a_old, a_new, nu, theta, forcing, dt) @ rb.residual_factor.T, axis=1
        )
        sup = theta + rb.lift_sup + np.abs(a_old) @ mode_sup
        lam = 0.5 * gamma * (2.0 * sup + root_n * eps)
        eps = np.maximum(eps, eps / sigma + dt * lam * eps + dt * residual / sigma)
        series[:, k + 1] = eps
        bad = ~np.isfinite(eps) | (eps > bound_cap)
        if np.any(bad):
            row = int(np.argmax(bad))
            raise BoundBlowup("state error bound exceeds its cap", step=k + 1, row=row, bound=float(eps[row]))
    return series


def error_bound_series(
    rb: ReducedBasis,
    params: ParameterPoint,
    reduced_traj: ReducedTrajectory,
    *,
    forcing: float = FORCING,
    bound_cap: float = DEFAULT_BOUND_CAP,
) -> NDArray[np.float64]:
    """Bounds ``eps_u(X, t_k)`` on ``||u(t_k) - reconstruct(a(t_k))||`` for every step, without any full solve."""
    return error_bound_batch(
        rb,
        reduced_traj.coeffs[None],
        np.array([params.nu]),
        np.array([params.theta]),
        forcing=forcing,
        bound_cap=bound_cap,
    )[0]


def output_with_bound_batch(
    rb: ReducedBasis,
    points: NDArray[np.float64],
    *,
    output: OutputKind = "final",
    forcing: float = FORCING,
    divergence_cap: float = DEFAULT_DIVERGENCE_CAP,
    bound_cap: float = DEFAULT_BOUND_CAP,
) -> Tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
    """Surrogate outputs and certified radii for rows ``(nu, u0m)`` of ``points``.

    :return: ``(f_tilde, eps, eps_u_series)`` with shapes ``(m,)``, ``(m,)``, ``(m, K + 1)``
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    nu, theta = points[:, 0], points[:, 1] * points[:, 1]
    if np.any(~(nu > 0)):
        raise ConfigError("viscosity must be positive", row=int(np.argmax(~(nu > 0))))
    disc = rb.disc
    coeffs = solve_reduced_batch(rb, nu, theta, forcing=forcing, divergence_cap=divergence_cap)
    series = error_bound_batch(rb, coeffs, nu, theta, forcing=forcing, bound_cap=bound_cap)
    norm = output_operator_norm(disc)
    if output == "final":
        total = theta * (disc.n_space + 1) + np.sum(rb.lift) + coeffs[:, -1] @ rb.modes.sum(axis=1)
        return total / disc.n_space, norm * series[:, -1], series
    if output == "space_time":
        weights = disc.quadrature_weights
        spatial = theta[:, None] + float(rb.lift @ weights) + coeffs @ (rb.modes @ weights)
        tw = time_weights(disc)
        return spatial @ tw, norm * (series @ tw), series
    raise ConfigError("unknown output functional", output=output)


def output_with_bound(
    rb: ReducedBasis,
    params: ParameterPoint,
    *,
    output: OutputKind = "final",
    forcing: float = FORCING,
    divergence_cap: float = DEFAULT_DIVERGENCE_CAP,
    bound_cap: float = DEFAULT_BOUND_CAP,
) -> CertifiedOutput:
    """Surrogate output ``f~(X)`` with radius ``eps(X) >= |f(X) - f~(X)|``."""
    f_tilde, eps, series = output_with_bound_batch(
        rb,
        params.as_vector()[None],
        output=output,
        forcing=forcing,
        divergence_cap=divergence_cap,
        bound_cap=bound_cap,
    )
    return CertifiedOutput(f_tilde=float(f_tilde[0]), eps=float(eps[0]), eps_u_series=series[0])
