"""Outer optimizers for polynomial ridge approximation.

fit_gauss_newton drives the variable-projection Gauss-Newton iteration
over the Grassmann manifold: at each step the inner polynomial fit is
re-solved, the residual Jacobian assembled, the Gauss-Newton direction
obtained from a thin SVD of the flattened Jacobian, safeguarded to be a
descent direction, and the step taken along a geodesic with Armijo
backtracking.  fit_alternating is the baseline that alternates between
solving for the polynomial and running steepest descent on the subspace
with the polynomial frozen; both share the geodesic line-search code so
comparisons measure the algorithms, not the implementations.
"""

import time
from dataclasses import dataclass

import numpy as np

from .basis import AffineMap, enumerate_indices, poly_table
from .grassmann import geodesic_from_svd, principal_angles, random_subspace, tangent_project
from .varpro import (
    ProjectedProblem,
    VarproState,
    flatten_jacobian,
    gradient,
    jacobian,
    solve_coefficients,
    unvec,
)
from .vandermonde import build_design, build_design_derivative

STATUS_CONVERGED_RESIDUAL = "converged_residual"
STATUS_CONVERGED_GRADIENT = "converged_gradient"
STATUS_CONVERGED_SUBSPACE = "converged_subspace"
STATUS_MAX_ITERATIONS = "max_iterations"
STATUS_LINE_SEARCH_FAILURE = "line_search_failure"

CONVERGED_STATUSES = (
    STATUS_CONVERGED_RESIDUAL,
    STATUS_CONVERGED_GRADIENT,
    STATUS_CONVERGED_SUBSPACE,
)


@dataclass
class SolverConfig:
    """Knobs shared by both outer optimizers.

    tol_residual_change is relative to ||f||; tol_grad of None resolves
    to 1e-10 * (1 + ||f||) at fit time.  tol_subspace bounds the
    smallest canonical angle of an accepted update.  target_residual,
    when set, stops the iteration once the normalized residual falls
    below it (used by the timing study).
    """

    gamma: float = 0.5
    beta: float = 1e-6
    max_iter: int = 200
    max_backtracks: int = 40
    tol_residual_change: float = 1e-12
    tol_grad: float | None = None
    tol_subspace: float = 1e-9
    seed: int | None = None
    restarts: int = 1
    target_residual: float | None = None

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")
        if not 0 < self.beta < 1:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")
        if self.max_iter < 1 or self.max_backtracks < 1 or self.restarts < 1:
            raise ValueError("max_iter, max_backtracks and restarts must be positive")


@dataclass
class IterationRecord:
    """One accepted outer iteration.

    residual_norm is the value after the step; grad_norm the gradient
    norm where the step was computed; angle_moved the largest canonical
    angle between the iterates.
    """

    residual_norm: float
    grad_norm: float
    step_t: float
    fell_back_to_gradient: bool
    angle_moved: float


@dataclass
class FitReport:
    iterations: list
    status: str
    wall_time: float
    initial_residual_norm: float
    restart_index: int = 0

    @property
    def residual_norms(self) -> np.ndarray:
        """Residual trace including the pre-iteration value."""
        return np.array([self.initial_residual_norm] + [it.residual_norm for it in self.iterations])


@dataclass
class RidgeModel:
    """Fitted ridge approximation g(U^T x) = sum_j c_j psi_j(eta(U^T x))."""

    family: str
    U: np.ndarray
    affine: AffineMap
    coefficients: np.ndarray
    degree: int
    training_residual_norm: float

    @property
    def m(self) -> int:
        return self.U.shape[0]

    @property
    def n(self) -> int:
        return self.U.shape[1]

    @property
    def p(self) -> int:
        return self.degree

    def predict(self, points) -> np.ndarray:
        return evaluate_model(self, points)


def evaluate_model(model: RidgeModel, points) -> np.ndarray:
    """Evaluate the fitted ridge approximation at rows of points."""
    X = np.atleast_2d(np.asarray(points, dtype=float))
    if X.shape[1] != model.m:
        raise ValueError(f"points have width {X.shape[1]}, model expects {model.m}")
    if X.shape[0] == 0:
        return np.zeros(0)
    idx = enumerate_indices(model.n, model.degree)
    V = build_design(X, model.U, idx, model.family, model.affine).values
    return V @ model.coefficients


def evaluate_profile(model: RidgeModel, projections) -> np.ndarray:
    """Evaluate the polynomial profile g at raw projected coordinates y,
    applying the model's stored normalization."""
    Y = np.atleast_2d(np.asarray(projections, dtype=float))
    if Y.shape[1] != model.n:
        raise ValueError(f"projections have width {Y.shape[1]}, model expects {model.n}")
    idx = enumerate_indices(model.n, model.degree)
    T = poly_table(model.family, model.degree, model.affine.apply(Y))
    out = np.ones((Y.shape[0], len(idx)))
    for q in range(model.n):
        out *= T[:, q, idx.indices[:, q]]
    return out @ model.coefficients


def gauss_newton_step(problem: ProjectedProblem, state: VarproState, jac: np.ndarray) -> np.ndarray:
    """Gauss-Newton direction vec D = -(vec J)^+ r from the thin SVD of
    the flattened Jacobian.

    At most m*n - n^2 singular triplets are retained (the flattened
    Jacobian has an n^2-dimensional nullspace) and singular values below
    1e-12 of the largest are dropped; the resulting direction is tangent
    to U without explicit projection.  All singular values negligible
    yields a zero step, which the caller treats as a cue to fall back to
    the gradient.
    """
    m, n = state.U.shape
    Jmat = flatten_jacobian(jac)
    Y, sigma, Zt = np.linalg.svd(Jmat, full_matrices=False)
    cap = m * n - n * n
    if cap <= 0 or sigma[0] == 0.0:
        return np.zeros((m, n))
    keep = sigma > 1e-12 * sigma[0]
    keep[cap:] = False
    if not keep.any():
        return np.zeros((m, n))
    coeff = (Y.T @ state.residual)[keep] / sigma[keep]
    return unvec(-(Zt[keep].T @ coeff), m, n)


def _check_feasible(problem: ProjectedProblem, n: int):
    if not 1 <= n <= problem.dim:
        raise ValueError(f"need 1 <= n <= m={problem.dim}, got n={n}")
    if problem.degree == 1 and n != 1:
        raise ValueError(
            "a degree-1 polynomial on any subspace collapses to a one-dimensional "
            "ridge function; use n=1 when degree=1"
        )


def _armijo_geodesic(U, delta, slope, base_norm, residual_at, config):
    """Backtrack along the geodesic from U with direction delta until
    ||r+|| <= ||r|| + slope * beta * t.  residual_at(U_trial) returns
    (norm, payload).  The SVD of delta is computed once for all trials.
    """
    svd_delta = np.linalg.svd(delta, full_matrices=False)
    t = 1.0
    for _ in range(config.max_backtracks):
        U_trial = geodesic_from_svd(U, svd_delta, t)
        trial_norm, payload = residual_at(U_trial)
        if trial_norm <= base_norm + slope * config.beta * t:
            return True, t, U_trial, payload, svd_delta[1]
        t *= config.gamma
    return False, t, U, None, svd_delta[1]


def _finalize(problem, state, records, status, start, restart_index, initial_norm):
    model = RidgeModel(
        family=problem.family,
        U=state.U,
        affine=state.design.affine,
        coefficients=state.coefficients,
        degree=problem.degree,
        training_residual_norm=state.residual_norm,
    )
    report = FitReport(
        iterations=records,
        status=status,
        wall_time=time.perf_counter() - start,
        initial_residual_norm=initial_norm,
        restart_index=restart_index,
    )
    return model, report


def _fit_gauss_newton_single(problem, n, config, U0, restart_index):
    start = time.perf_counter()
    f_norm = np.linalg.norm(problem.values)
    tol_grad = config.tol_grad if config.tol_grad is not None else 1e-10 * (1 + f_norm)
    U = U0
    state = solve_coefficients(problem, U)
    initial_norm = state.residual_norm
    records = []
    status = STATUS_MAX_ITERATIONS
    for _ in range(config.max_iter):
        if config.target_residual is not None and state.residual_norm <= config.target_residual * f_norm:
            status = STATUS_CONVERGED_RESIDUAL
            break
        jac = jacobian(problem, state)
        G = gradient(jac, state.residual)
        g_norm = float(np.linalg.norm(G))
        if g_norm <= tol_grad:
            status = STATUS_CONVERGED_GRADIENT
            break
        delta = gauss_newton_step(problem, state, jac)
        slope = float(np.sum(G * delta))
        fell_back = slope >= 0
        if fell_back:
            delta = -G
            slope = -g_norm ** 2
        prev_norm = state.residual_norm

        def residual_at(U_trial):
            trial = solve_coefficients(problem, U_trial)
            return trial.residual_norm, trial

        ok, t, U, trial_state, sig = _armijo_geodesic(
            U, delta, slope, prev_norm, residual_at, config
        )
        if not ok:
            status = STATUS_LINE_SEARCH_FAILURE
            break
        state = trial_state
        records.append(
            IterationRecord(
                residual_norm=state.residual_norm,
                grad_norm=g_norm,
                step_t=t,
                fell_back_to_gradient=fell_back,
                angle_moved=float(sig[0] * t),
            )
        )
        if abs(prev_norm - state.residual_norm) <= config.tol_residual_change * f_norm:
            status = STATUS_CONVERGED_RESIDUAL
            break
        if float(sig[-1] * t) <= config.tol_subspace:
            status = STATUS_CONVERGED_SUBSPACE
            break
    return _finalize(problem, state, records, status, start, restart_index, initial_norm)


def _run_restarts(problem, n, config, initial_subspace, single_fit):
    seeds = np.random.SeedSequence(config.seed).spawn(config.restarts)
    best = None
    for ridx in range(config.restarts):
        if ridx == 0 and initial_subspace is not None:
            U0 = np.asarray(initial_subspace, dtype=float)
            if U0.shape != (problem.dim, n):
                raise ValueError(f"initial subspace must have shape ({problem.dim}, {n})")
        else:
            U0 = random_subspace(problem.dim, n, np.random.default_rng(seeds[ridx]))
        model, report = single_fit(problem, n, config, U0, ridx)
        if best is None or model.training_residual_norm < best[0].training_residual_norm:
            best = (model, report)
    return best


def fit_gauss_newton(problem: ProjectedProblem, n: int, config: SolverConfig | None = None,
                     initial_subspace=None):
    """Fit a degree-p ridge model on an n-dimensional subspace by
    variable-projection Gauss-Newton over the Grassmann manifold.

    Returns (RidgeModel, FitReport).  With restarts > 1 the restart with
    the smallest training residual wins (ties keep the lowest index);
    each restart draws its own initial subspace from a seed split off
    the master seed, so a fixed (seed, config, data) triple reproduces
    the trace exactly.
    """
    config = config if config is not None else SolverConfig()
    _check_feasible(problem, n)
    return _run_restarts(problem, n, config, initial_subspace, _fit_gauss_newton_single)


def _fixed_polynomial_gradient(problem, U, index_set, affine, c, resid):
    """Euclidean gradient of 1/2 ||f - V(U) c||^2 with c and affine frozen."""
    X = problem.points
    dV = build_design_derivative(X, U, index_set, problem.family, affine)
    m, n = U.shape
    G = np.empty((m, n))
    for ell in range(n):
        A = affine.d[ell] * X * (dV.partial_block(ell) @ c)[:, None]
        G[:, ell] = -(A.T @ resid)
    return G


def _fit_alternating_single(problem, n, config, U0, restart_index, inner_steps):
    start = time.perf_counter()
    f = problem.values
    f_norm = np.linalg.norm(f)
    tol_grad = config.tol_grad if config.tol_grad is not None else 1e-10 * (1 + f_norm)
    U = U0
    state = solve_coefficients(problem, U)
    initial_norm = state.residual_norm
    records = []
    status = STATUS_MAX_ITERATIONS
    for _ in range(config.max_iter):
        if config.target_residual is not None and state.residual_norm <= config.target_residual * f_norm:
            status = STATUS_CONVERGED_RESIDUAL
            break
        c = state.coefficients
        affine = state.design.affine
        index_set = state.design.index_set
        U_prev = U
        prev_norm = state.residual_norm

        # inner: steepest descent on the subspace with the polynomial frozen
        resid = state.residual
        first_grad_norm = None
        moved = False
        last_t = 0.0
        for _ in range(inner_steps):
            G = tangent_project(
                U, _fixed_polynomial_gradient(problem, U, index_set, affine, c, resid)
            )
            g_norm = float(np.linalg.norm(G))
            if first_grad_norm is None:
                first_grad_norm = g_norm
            if g_norm <= tol_grad:
                break
            base_norm = float(np.linalg.norm(resid))

            def residual_at(U_trial):
                V = build_design(problem.points, U_trial, index_set, problem.family, affine).values
                r_trial = f - V @ c
                return float(np.linalg.norm(r_trial)), r_trial

            ok, last_t, U, resid, _ = _armijo_geodesic(
                U, -G, -g_norm ** 2, base_norm, residual_at, config
            )
            if not ok:
                break
            moved = True

        # the first inner gradient at c = c(U) equals the variable-projection gradient
        if first_grad_norm is not None and first_grad_norm <= tol_grad:
            status = STATUS_CONVERGED_GRADIENT
            break
        if not moved:
            status = STATUS_LINE_SEARCH_FAILURE
            break

        state = solve_coefficients(problem, U)
        angles = principal_angles(U_prev, U)
        records.append(
            IterationRecord(
                residual_norm=state.residual_norm,
                grad_norm=first_grad_norm,
                step_t=last_t,
                fell_back_to_gradient=False,
                angle_moved=float(angles[-1]),
            )
        )
        if abs(prev_norm - state.residual_norm) <= config.tol_residual_change * f_norm:
            status = STATUS_CONVERGED_RESIDUAL
            break
        if float(angles[0]) <= config.tol_subspace:
            status = STATUS_CONVERGED_SUBSPACE
            break
    return _finalize(problem, state, records, status, start, restart_index, initial_norm)


def fit_alternating(problem: ProjectedProblem, n: int, config: SolverConfig | None = None,
                    inner_steps: int = 100, initial_subspace=None):
    """Baseline fit that alternates c <- V(U)^+ f with inner_steps
    geodesic steepest-descent iterations on U at frozen c.

    Shares termination criteria, line search, and report format with
    fit_gauss_newton; one entry of the report corresponds to one outer
    alternation.
    """
    config = config if config is not None else SolverConfig()
    _check_feasible(problem, n)
    if inner_steps < 1:
        raise ValueError("inner_steps must be positive")

    def single(problem_, n_, config_, U0, ridx):
        return _fit_alternating_single(problem_, n_, config_, U0, ridx, inner_steps)

    return _run_restarts(problem, n, config, initial_subspace, single)
