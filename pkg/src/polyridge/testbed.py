"""Synthetic quantities of interest and desk-scale experiment drivers.

The test functions are low-dimensional ridge (or near-ridge) functions
on hypercubes with known structure, used to study convergence rate,
wall-clock cost, global-minimizer recovery, basis conditioning, and
sample-efficiency of subspace recovery.  Experiments emit tabular
records suitable for CSV output; every row carries the master seed so a
result file pins down its own re-run.
"""

import csv
import io
import time
from dataclasses import dataclass, field

import numpy as np

from .basis import AffineMap, enumerate_indices, fit_affine_map
from .grassmann import random_subspace, subspace_angle
from .solver import SolverConfig, fit_alternating, fit_gauss_newton
from .vandermonde import build_design, condition_number
from .varpro import ProjectedProblem

EXPERIMENTS = ("convergence", "timing", "global_min", "conditioning", "subspace_recovery")


@dataclass(frozen=True)
class TestFunction:
    """A deterministic scalar function on a hypercube.

    evaluator maps a (K, dim) array to K values.  true_subspace, when
    the ridge structure is known analytically, is an orthonormal basis
    of it.
    """

    __test__ = False  # keep pytest from collecting this as a test class

    name: str
    dim: int
    evaluator: object
    bounds: tuple = (-1.0, 1.0)
    true_subspace: np.ndarray | None = None
    params: dict = field(default_factory=dict)

    def __call__(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.dim:
            raise ValueError(f"{self.name} expects width {self.dim}, got {X.shape[1]}")
        return self.evaluator(X)

    def sample(self, count: int, rng) -> tuple:
        """Draw `count` uniform points on the domain and evaluate."""
        lo, hi = self.bounds
        X = rng.uniform(lo, hi, size=(count, self.dim))
        return X, self(X)


def _span(*columns) -> np.ndarray:
    return np.linalg.qr(np.column_stack(columns))[0]


def cubic_ridge(m: int = 10) -> TestFunction:
    """f(x) = (e_1^T x)^2 + (1^T x / 10)^3 + 1 on [-1, 1]^m, an exact
    cubic ridge on the two-dimensional span of e_1 and the ones vector."""
    ones = np.ones(m)
    e1 = np.eye(m)[:, 0]

    def f(X):
        return X[:, 0] ** 2 + (X @ ones / 10.0) ** 3 + 1.0

    return TestFunction(
        name=f"cubic_ridge_{m}d",
        dim=m,
        evaluator=f,
        true_subspace=_span(e1, ones),
        params={"n": 2, "p": 3},
    )


def poly_sum_ridge(n: int, p: int, m: int = 10) -> TestFunction:
    """f(x) = (1^T x)^p + sum_{j<n} (e_j^T x)^{p-1} on [-1, 1]^m: an
    exact degree-p ridge on an n-dimensional subspace."""
    if not 1 <= n <= m:
        raise ValueError(f"need 1 <= n <= m, got n={n}")
    ones = np.ones(m)

    def f(X):
        out = (X @ ones) ** p
        for j in range(n - 1):
            out = out + X[:, j] ** (p - 1)
        return out

    cols = [ones] + [np.eye(m)[:, j] for j in range(n - 1)]
    return TestFunction(
        name=f"poly_sum_n{n}_p{p}",
        dim=m,
        evaluator=f,
        true_subspace=_span(*cols),
        params={"n": n, "p": p},
    )


def quadratic_sum_ridge(n: int, m: int = 10) -> TestFunction:
    """f(x) = sum_{j<=n} (e_j^T x)^2 on [-1, 1]^m: a quadratic ridge on
    the first n coordinates, used for the global-minimizer study."""
    if not 1 <= n <= m:
        raise ValueError(f"need 1 <= n <= m, got n={n}")

    def f(X):
        return (X[:, :n] ** 2).sum(axis=1)

    return TestFunction(
        name=f"quadratic_sum_n{n}",
        dim=m,
        evaluator=f,
        true_subspace=np.eye(m)[:, :n].copy(),
        params={"n": n, "p": 2},
    )


def sinusoidal_ridge(m: int = 100, alpha: float = 0.02, beta: int = 1) -> TestFunction:
    """f(x) = (1^T x)^2 / 2 + alpha * sum_j cos(beta pi x_j) on [-1, 1]^m.

    The oscillations break exact one-dimensional ridge structure while
    keeping the dominant direction at the normalized ones vector."""

    def f(X):
        return 0.5 * (X.sum(axis=1)) ** 2 + alpha * np.cos(beta * np.pi * X).sum(axis=1)

    return TestFunction(
        name=f"sinusoidal_ridge_{m}d",
        dim=m,
        evaluator=f,
        true_subspace=(np.ones((m, 1)) / np.sqrt(m)),
        params={"n": 1, "alpha": alpha, "beta": beta},
    )


def toy_absolute_ridge(m: int = 100, direction_seed: int = 20170516) -> TestFunction:
    """f(x) = |u^T x| + 0.1 (sin(1000 x_2) + 1) with u drawn uniformly
    on the unit sphere; the sine term acts as deterministic noise."""
    rng = np.random.default_rng(direction_seed)
    u = rng.standard_normal(m)
    u /= np.linalg.norm(u)

    def f(X):
        return np.abs(X @ u) + 0.1 * (np.sin(1000 * X[:, 1]) + 1.0)

    return TestFunction(
        name=f"absolute_ridge_{m}d",
        dim=m,
        evaluator=f,
        true_subspace=u.reshape(-1, 1).copy(),
        params={"n": 1},
    )


def builtin_functions() -> list:
    """The synthetic study functions, at their standard parameters."""
    return [
        cubic_ridge(),
        poly_sum_ridge(1, 3),
        poly_sum_ridge(2, 3),
        quadratic_sum_ridge(1),
        quadratic_sum_ridge(2),
        quadratic_sum_ridge(3),
        sinusoidal_ridge(),
        toy_absolute_ridge(),
    ]


def active_subspace_closed_form(m: int, alpha: float, beta: int):
    """Average outer product of gradients for the sinusoidal ridge:
    C = 1 1^T + (alpha beta pi)^2 I, with leading eigenvector 1/sqrt(m)
    and eigenvalues m + (alpha beta pi)^2 and (alpha beta pi)^2."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if m < 1:
        raise ValueError("m must be positive")
    s = (alpha * beta * np.pi) ** 2
    C = np.ones((m, m)) + s * np.eye(m)
    return C, np.ones((m, 1)) / np.sqrt(m)


def active_subspace_monte_carlo(fn: TestFunction, num_points: int, fd_step: float = 1e-6,
                                rng_seed=None) -> np.ndarray:
    """One-dimensional active-subspace estimate from finite-difference
    gradients at uniform random points.

    Uses num_points * (dim + 1) function evaluations: one-sided
    differences (f(x + h e_j) - f(x)) / h, averaged as an outer-product
    matrix whose leading eigenvector is returned as an (m, 1) basis.
    """
    if num_points < 1:
        raise ValueError("need at least one sample point")
    if fd_step <= 0:
        raise ValueError("fd_step must be positive")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    m = fn.dim
    X, base = fn.sample(num_points, rng)
    grads = np.empty((num_points, m))
    for j in range(m):
        shifted = X.copy()
        shifted[:, j] += fd_step
        grads[:, j] = (fn(shifted) - base) / fd_step
    C_hat = grads.T @ grads / num_points
    _, vecs = np.linalg.eigh(C_hat)
    return vecs[:, -1:].copy()


@dataclass
class ExperimentResult:
    """Long-format records from one experiment run."""

    name: str
    seed: int
    columns: list
    rows: list

    def to_records(self) -> list:
        return [dict(zip(self.columns, row)) for row in self.rows]

    def write_csv(self, fileobj):
        writer = csv.writer(fileobj, lineterminator="\n")
        writer.writerow(self.columns)
        writer.writerows(self.rows)

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def run_experiment(name: str, config: dict | None = None) -> ExperimentResult:
    """Regenerate one of the named desk-scale studies.

    config overrides the per-experiment defaults (replicates, sample
    counts, seeds, ...); unknown names raise with the list of valid ones.
    """
    if name not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {name!r}; valid names: {', '.join(EXPERIMENTS)}")
    runner = {
        "convergence": _experiment_convergence,
        "timing": _experiment_timing,
        "global_min": _experiment_global_min,
        "conditioning": _experiment_conditioning,
        "subspace_recovery": _experiment_subspace_recovery,
    }[name]
    return runner(config or {})


def _options(config, defaults):
    unknown = set(config) - set(defaults)
    if unknown:
        raise ValueError(f"unknown experiment options: {sorted(unknown)}")
    return {**defaults, **config}


def _experiment_convergence(config):
    opts = _options(
        config,
        {
            "seed": 0,
            "replicates": 10,
            "samples": 1000,
            "noise": 0.0,
            "solvers": ("gauss_newton", "alternating"),
            "max_outer": 60,
            "inner_steps": 100,
        },
    )
    fn = cubic_ridge()
    n, p = fn.params["n"], fn.params["p"]
    seeds = np.random.SeedSequence(opts["seed"]).spawn(opts["replicates"])
    rows = []
    for rep in range(opts["replicates"]):
        rng = np.random.default_rng(seeds[rep])
        X, f = fn.sample(opts["samples"], rng)
        if opts["noise"] > 0:
            f = f + opts["noise"] * rng.standard_normal(len(f))
        problem = ProjectedProblem(points=X, values=f, degree=p)
        f_norm = np.linalg.norm(f)
        cfg = SolverConfig(seed=rep, max_iter=opts["max_outer"])
        for solver in opts["solvers"]:
            if solver == "gauss_newton":
                _, report = fit_gauss_newton(problem, n, cfg)
            elif solver == "alternating":
                _, report = fit_alternating(problem, n, cfg, inner_steps=opts["inner_steps"])
            else:
                raise ValueError(f"unknown solver {solver!r}")
            for it, norm in enumerate(report.residual_norms):
                rows.append((solver, rep, it, norm / f_norm, opts["seed"]))
    return ExperimentResult(
        name="convergence",
        seed=opts["seed"],
        columns=["solver", "replicate", "iter", "residual", "seed"],
        rows=rows,
    )


def _experiment_timing(config):
    opts = _options(
        config,
        {
            "seed": 0,
            "replicates": 10,
            "samples": 1000,
            "pairs": ((1, 3), (2, 3)),
            "target": 1e-5,
            "max_outer": 100,
            "inner_steps": 100,
        },
    )
    seeds = np.random.SeedSequence(opts["seed"]).spawn(opts["replicates"])
    rows = []
    for rep in range(opts["replicates"]):
        rng = np.random.default_rng(seeds[rep])
        for n, p in opts["pairs"]:
            fn = poly_sum_ridge(n, p)
            X, f = fn.sample(opts["samples"], rng)
            problem = ProjectedProblem(points=X, values=f, degree=p)
            U0 = random_subspace(fn.dim, n, rng)
            cfg = SolverConfig(
                seed=rep, max_iter=opts["max_outer"], target_residual=opts["target"]
            )
            for solver, fit in (
                ("gauss_newton", fit_gauss_newton),
                ("alternating", lambda pr, nn, cc, initial_subspace: fit_alternating(
                    pr, nn, cc, inner_steps=opts["inner_steps"], initial_subspace=initial_subspace
                )),
            ):
                t0 = time.perf_counter()
                model, report = fit(problem, n, cfg, initial_subspace=U0)
                elapsed = time.perf_counter() - t0
                reached = model.training_residual_norm <= opts["target"] * np.linalg.norm(f)
                rows.append((solver, n, p, rep, elapsed, int(reached), opts["seed"]))
    return ExperimentResult(
        name="timing",
        seed=opts["seed"],
        columns=["solver", "n", "p", "replicate", "wall_time", "reached", "seed"],
        rows=rows,
    )


def _experiment_global_min(config):
    opts = _options(
        config,
        {
            "seed": 0,
            "replicates": 100,
            "samples": 1000,
            "ns": (1, 2, 3),
            "degree": 2,
            "threshold": 1e-5,
            "max_outer": 100,
        },
    )
    rows = []
    master = np.random.SeedSequence(opts["seed"])
    for n in opts["ns"]:
        fn = quadratic_sum_ridge(n)
        data_rng = np.random.default_rng(master.spawn(1)[0])
        X, f = fn.sample(opts["samples"], data_rng)
        problem = ProjectedProblem(points=X, values=f, degree=opts["degree"])
        f_norm = np.linalg.norm(f)
        failures = 0
        for rep in range(opts["replicates"]):
            cfg = SolverConfig(seed=1000 * n + rep, max_iter=opts["max_outer"])
            model, _ = fit_gauss_newton(problem, n, cfg)
            if model.training_residual_norm > opts["threshold"] * f_norm:
                failures += 1
        rows.append(
            (n, opts["replicates"], failures, failures / opts["replicates"], opts["seed"])
        )
    return ExperimentResult(
        name="global_min",
        seed=opts["seed"],
        columns=["n", "replicates", "failures", "failure_fraction", "seed"],
        rows=rows,
    )


def _experiment_conditioning(config):
    opts = _options(
        config,
        {
            "seed": 0,
            "samples": 1000,
            "dim": 100,
            "max_degree": 20,
            "bases": (("monomial", False), ("monomial", True), ("legendre", True), ("hermite", True)),
        },
    )
    m = opts["dim"]
    rng = np.random.default_rng(opts["seed"])
    X = rng.uniform(0.0, 1.0, size=(opts["samples"], m))
    U = np.ones((m, 1)) / np.sqrt(m)
    rows = []
    for family, scaled in opts["bases"]:
        affine = fit_affine_map(family, X @ U) if scaled else AffineMap.identity(1)
        for degree in range(1, opts["max_degree"] + 1):
            design = build_design(X, U, enumerate_indices(1, degree), family, affine)
            rows.append((family, int(scaled), degree, condition_number(design), opts["seed"]))
    return ExperimentResult(
        name="conditioning",
        seed=opts["seed"],
        columns=["basis", "scaled", "degree", "cond", "seed"],
        rows=rows,
    )


def _ridge_sample_points(fn, count, rng):
    # evenly spaced along the true direction, uniform in its complement
    u = fn.true_subspace[:, 0]
    lo, hi = fn.bounds
    Z = rng.uniform(lo, hi, size=(count, fn.dim))
    spacing = np.linspace(-2.0, 2.0, count)
    X = Z + (spacing - Z @ u)[:, None] * u
    return X, fn(X)


def _experiment_subspace_recovery(config):
    opts = _options(
        config,
        {
            "seed": 0,
            "replicates": 20,
            "dim": 100,
            "alpha": 0.02,
            "beta": 1,
            "degree": 2,
            "budgets": tuple(range(100, 1001, 100)),
            "fd_step": 1e-6,
            "methods": ("ridge", "active_subspace"),
            "max_outer": 100,
        },
    )
    fn = sinusoidal_ridge(opts["dim"], opts["alpha"], opts["beta"])
    true_U = fn.true_subspace
    seeds = np.random.SeedSequence(opts["seed"]).spawn(opts["replicates"])
    rows = []
    for rep in range(opts["replicates"]):
        rng = np.random.default_rng(seeds[rep])
        for budget in opts["budgets"]:
            for method in opts["methods"]:
                if method == "active_subspace":
                    L = max(1, budget // (fn.dim + 1))
                    estimate = active_subspace_monte_carlo(fn, L, opts["fd_step"], rng)
                    samples = L
                elif method in ("ridge", "ridge_sample"):
                    samples = budget
                    if method == "ridge":
                        X, f = fn.sample(budget, rng)
                    else:
                        X, f = _ridge_sample_points(fn, budget, rng)
                    problem = ProjectedProblem(points=X, values=f, degree=opts["degree"])
                    cfg = SolverConfig(seed=rep, max_iter=opts["max_outer"])
                    model, _ = fit_gauss_newton(problem, 1, cfg)
                    estimate = model.U
                else:
                    raise ValueError(f"unknown method {method!r}")
                angle = subspace_angle(estimate, true_U)
                rows.append(
                    (method, budget, samples, rep, angle, np.degrees(angle), opts["seed"])
                )
    return ExperimentResult(
        name="subspace_recovery",
        seed=opts["seed"],
        columns=["method", "budget", "samples", "replicate", "angle_rad", "angle_deg", "seed"],
        rows=rows,
    )
