"""Variable-projection core for polynomial ridge approximation.

For fixed U the optimal polynomial coefficients solve a linear least
squares problem, c = V(U)^+ f, leaving the residual
r(U) = f - V(U) V(U)^+ f as a function of the subspace alone.  This
module computes that inner solve, the Golub-Pereyra derivative of the
residual with respect to the entries of U, and the objective gradient.
A single thin SVD of the design matrix serves the coefficient solve,
the residual, and the Jacobian assembly.
"""

from dataclasses import dataclass, field

import numpy as np

from .basis import AffineMap, IndexSet, check_family, enumerate_indices, fit_affine_map
from .vandermonde import DesignMatrix, build_design, build_design_derivative


@dataclass(frozen=True)
class ProjectedProblem:
    """Training data for a ridge approximation of fixed degree and family.

    Attributes
    ----------
    points : ndarray of shape (M, m)
        Sample locations x_i.
    values : ndarray of shape (M,)
        Observed f(x_i).
    degree : int
        Total polynomial degree p of the ridge profile.
    family : str
        1-D basis family used for the tensor-product basis.
    """

    points: np.ndarray
    values: np.ndarray
    degree: int
    family: str = "legendre"

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.points, dtype=float))
        f = np.asarray(self.values, dtype=float).ravel()
        if X.shape[0] != f.shape[0]:
            raise ValueError(
                f"points ({X.shape[0]} rows) and values ({f.shape[0]}) disagree in length"
            )
        if X.shape[0] < 1:
            raise ValueError("need at least one sample")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(f))):
            raise ValueError("points and values must be finite")
        if self.degree < 0:
            raise ValueError(f"degree must be >= 0, got {self.degree}")
        check_family(self.family)
        object.__setattr__(self, "points", X)
        object.__setattr__(self, "values", f)

    @property
    def num_samples(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def index_set(self, n: int) -> IndexSet:
        return enumerate_indices(n, self.degree)


@dataclass(frozen=True)
class VarproState:
    """Inner least-squares solution at a fixed subspace.

    residual is f - V c with c the minimum-norm solution; rank is the
    numerical rank of the design matrix.  The thin SVD factors of the
    design (truncated to rank) are kept for Jacobian assembly.
    """

    U: np.ndarray
    design: DesignMatrix
    coefficients: np.ndarray
    residual: np.ndarray
    rank: int
    svd: tuple = field(repr=False)

    @property
    def underdetermined(self) -> bool:
        return self.rank < self.design.values.shape[1]

    @property
    def residual_norm(self) -> float:
        return float(np.linalg.norm(self.residual))


def solve_coefficients(
    problem: ProjectedProblem, U: np.ndarray, affine: AffineMap | None = None
) -> VarproState:
    """Solve the inner polynomial fit at subspace basis U.

    When affine is None a fresh normalization map is fitted from the
    current projections; passing an explicit map holds it fixed, which
    is what derivative checks against this residual require.  Singular
    values at or below max(M, N) * eps * sigma_1 are treated as zero,
    yielding the minimum-norm solution on the numerical range.
    """
    U = np.asarray(U, dtype=float)
    if affine is None:
        affine = fit_affine_map(problem.family, problem.points @ U)
    index_set = problem.index_set(U.shape[1])
    design = build_design(problem.points, U, index_set, problem.family, affine)
    V = design.values
    M, N = V.shape
    Q, sigma, Zt = np.linalg.svd(V, full_matrices=False)
    tol = max(M, N) * np.finfo(float).eps * sigma[0]
    rank = int(np.count_nonzero(sigma > tol))
    Q, sigma, Zt = Q[:, :rank], sigma[:rank], Zt[:rank]
    f = problem.values
    c = Zt.T @ ((Q.T @ f) / sigma) if rank > 0 else np.zeros(N)
    residual = f - V @ c
    return VarproState(
        U=U, design=design, coefficients=c, residual=residual, rank=rank, svd=(Q, sigma, Zt)
    )


def jacobian(problem: ProjectedProblem, state: VarproState) -> np.ndarray:
    """Derivative tensor of the residual, shape (M, m, n).

    [J]_{i,j,k} = d r_i / d U_{j,k}, assembled from the Golub-Pereyra
    formula

        J_{.,j,k} = -[ P_perp dV/dU_{jk} V^+  +  (P_perp dV/dU_{jk} V^+)^T ] f

    using the design SVD already held by the state: P_perp z = z - Q Q^T z
    and V^+ = Z diag(1/sigma) Q^T on the numerical range.  The affine map
    is treated as constant.  Every m x n slice of the result is
    orthogonal to U.
    """
    if state.rank == 0:
        raise ValueError("design matrix has rank zero; no polynomial direction exists")
    X = problem.points
    U = state.U
    m, n = U.shape
    M = X.shape[0]
    Q, sigma, Zt = state.svd
    c = state.coefficients
    r = state.residual
    dV = build_design_derivative(X, U, state.design.index_set, problem.family, state.design.affine)
    J = np.empty((M, m, n))
    for ell in range(n):
        G = dV.partial_block(ell)
        d_ell = state.design.affine.d[ell]
        # column k of A is (dV/dU_{k,ell}) c
        A = d_ell * X * (G @ c)[:, None]
        term1 = A - Q @ (Q.T @ A)
        # column k of B is (dV/dU_{k,ell})^T r
        B = d_ell * (G.T @ (X * r[:, None]))
        term2 = Q @ ((Zt @ B) / sigma[:, None])
        J[:, :, ell] = -(term1 + term2)
    return J


def flatten_jacobian(jac: np.ndarray) -> np.ndarray:
    """View the (M, m, n) tensor as the M x (m n) matrix whose column
    m*k + j holds d r / d U_{j,k} (row index of U fastest)."""
    M, m, n = jac.shape
    return jac.transpose(0, 2, 1).reshape(M, m * n)


def vec(delta: np.ndarray) -> np.ndarray:
    """Stack the columns of an m x n matrix, matching flatten_jacobian."""
    return np.asarray(delta).reshape(-1, order="F")


def unvec(v: np.ndarray, m: int, n: int) -> np.ndarray:
    return np.asarray(v).reshape(m, n, order="F")


def gradient(jac: np.ndarray, residual: np.ndarray) -> np.ndarray:
    """Euclidean gradient of 1/2 ||r(U)||^2: sum_i J_i r_i.

    By the Jacobian orthogonality this already lies in the tangent space
    at U; no explicit projection is applied.
    """
    residual = np.asarray(residual, dtype=float)
    if jac.shape[0] != residual.shape[0]:
        raise ValueError("jacobian and residual disagree in sample count")
    return np.einsum("ijk,i->jk", jac, residual)
