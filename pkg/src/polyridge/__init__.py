"""Polynomial ridge approximation f(x) ~ g(U^T x).

Fits a total-degree polynomial profile g composed with an orthonormal
projection U by variable-projection Gauss-Newton over the Grassmann
manifold, with an alternating baseline, conditioning diagnostics, and
desk-scale study drivers.
"""

from .basis import (
    FAMILIES,
    AffineMap,
    IndexSet,
    enumerate_indices,
    eval_poly_1d,
    eval_poly_1d_deriv,
    fit_affine_map,
)
from .grassmann import (
    as_subspace,
    geodesic,
    principal_angles,
    random_subspace,
    subspace_angle,
    tangent_project,
)
from .solver import (
    FitReport,
    IterationRecord,
    RidgeModel,
    SolverConfig,
    evaluate_model,
    evaluate_profile,
    fit_alternating,
    fit_gauss_newton,
    gauss_newton_step,
)
from .testbed import (
    ExperimentResult,
    TestFunction,
    active_subspace_closed_form,
    active_subspace_monte_carlo,
    builtin_functions,
    run_experiment,
)
from .vandermonde import (
    DesignDerivative,
    DesignMatrix,
    build_design,
    build_design_derivative,
    condition_number,
)
from .varpro import (
    ProjectedProblem,
    VarproState,
    flatten_jacobian,
    gradient,
    jacobian,
    solve_coefficients,
)

__version__ = "0.1.0"

__all__ = [
    "AffineMap",
    "DesignDerivative",
    "DesignMatrix",
    "ExperimentResult",
    "FAMILIES",
    "FitReport",
    "IndexSet",
    "IterationRecord",
    "ProjectedProblem",
    "RidgeModel",
    "SolverConfig",
    "TestFunction",
    "VarproState",
    "active_subspace_closed_form",
    "active_subspace_monte_carlo",
    "as_subspace",
    "build_design",
    "build_design_derivative",
    "builtin_functions",
    "condition_number",
    "enumerate_indices",
    "eval_poly_1d",
    "eval_poly_1d_deriv",
    "evaluate_model",
    "evaluate_profile",
    "fit_affine_map",
    "fit_alternating",
    "fit_gauss_newton",
    "flatten_jacobian",
    "gauss_newton_step",
    "geodesic",
    "gradient",
    "jacobian",
    "principal_angles",
    "random_subspace",
    "run_experiment",
    "solve_coefficients",
    "subspace_angle",
    "tangent_project",
]
