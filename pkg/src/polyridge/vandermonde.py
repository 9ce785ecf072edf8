"""Vandermonde-like design matrices for projected polynomial bases.

Given sample points x_i in R^m, a subspace basis U in R^{m x n} and a
tensor-product polynomial basis on the normalized projected coordinates
eta(U^T x), this module assembles the M x N design matrix, its entrywise
derivatives with respect to U, and conditioning diagnostics.
"""

from dataclasses import dataclass, field

import numpy as np

from .basis import AffineMap, IndexSet, check_family, poly_table, poly_table_deriv


@dataclass(frozen=True)
class DesignMatrix:
    """Design matrix values plus the basis data that produced them."""

    values: np.ndarray
    index_set: IndexSet
    family: str
    affine: AffineMap

    @property
    def shape(self):
        return self.values.shape


def _projected_tables(points, U, index_set, family, affine, derivatives=False):
    X = np.asarray(points, dtype=float)
    U = np.asarray(U, dtype=float)
    if X.ndim != 2:
        raise ValueError("points must be a 2-D array of shape (M, m)")
    if U.shape[0] != X.shape[1]:
        raise ValueError(
            f"dimension mismatch: points have width {X.shape[1]} but U has {U.shape[0]} rows"
        )
    if U.shape[1] != index_set.n:
        raise ValueError(
            f"subspace dimension {U.shape[1]} does not match index set n={index_set.n}"
        )
    Z = affine.apply(X @ U)
    T = poly_table(family, index_set.p, Z)
    D = poly_table_deriv(family, index_set.p, Z) if derivatives else None
    return X, T, D


def _tensor_product(T, idx, skip=None):
    # Product over dimensions q of T[:, q, idx[j, q]], optionally omitting q == skip.
    M = T.shape[0]
    out = np.ones((M, idx.shape[0]))
    for q in range(idx.shape[1]):
        if q == skip:
            continue
        out *= T[:, q, idx[:, q]]
    return out


def build_design(points, U, index_set: IndexSet, family: str, affine: AffineMap) -> DesignMatrix:
    """Assemble V with [V]_{i,j} = psi_j(eta(U^T x_i)).

    psi_j is the tensor product of 1-D polynomials with exponents given
    by the j-th multi-index.
    """
    check_family(family)
    _, T, _ = _projected_tables(points, U, index_set, family, affine)
    values = _tensor_product(T, index_set.indices)
    return DesignMatrix(values=values, index_set=index_set, family=family, affine=affine)


@dataclass
class DesignDerivative:
    """Entrywise derivatives of the design matrix with respect to U.

    slice(k, l) returns the M x N matrix dV/dU_{k,l}; entry (i, j) is

        d_l * x_{i,k} * phi'_{a_j,l}(z_{i,l}) * prod_{q != l} phi_{a_j,q}(z_{i,q})

    with z = eta(U^T x).  Slices are materialized on demand so peak
    memory stays O(M * N) beyond the shared evaluation tables.  The
    affine map is treated as a constant here; it is refreshed once per
    outer solver iteration, not differentiated through.
    """

    points: np.ndarray
    index_set: IndexSet
    family: str
    affine: AffineMap
    _values: np.ndarray = field(repr=False)
    _derivs: np.ndarray = field(repr=False)
    _blocks: dict = field(default_factory=dict, repr=False)

    @property
    def m(self) -> int:
        return self.points.shape[1]

    @property
    def n(self) -> int:
        return self.index_set.n

    def partial_block(self, ell: int) -> np.ndarray:
        """M x N factor common to all slices (., ell): the psi_j partial
        derivative in coordinate ell at the projected points, without the
        d_ell and x_{i,k} factors."""
        if ell not in self._blocks:
            idx = self.index_set.indices
            block = self._derivs[:, ell, idx[:, ell]] * _tensor_product(
                self._values, idx, skip=ell
            )
            self._blocks[ell] = block
        return self._blocks[ell]

    def slice(self, k: int, ell: int) -> np.ndarray:
        """dV/dU_{k,ell} as an M x N matrix."""
        return self.affine.d[ell] * self.points[:, k : k + 1] * self.partial_block(ell)

    def __iter__(self):
        for ell in range(self.n):
            for k in range(self.m):
                yield (k, ell), self.slice(k, ell)


def build_design_derivative(
    points, U, index_set: IndexSet, family: str, affine: AffineMap
) -> DesignDerivative:
    """Prepare all m * n derivative slices of the design matrix."""
    check_family(family)
    X, T, D = _projected_tables(points, U, index_set, family, affine, derivatives=True)
    return DesignDerivative(
        points=X,
        index_set=index_set,
        family=family,
        affine=affine,
        _values=T,
        _derivs=D,
    )


def condition_number(design: DesignMatrix) -> float:
    """Ratio of extreme singular values of the design matrix.

    Returns numpy.inf when the smallest singular value underflows to
    zero.  Requires at least as many rows as columns; conditioning of an
    underdetermined design is not defined here.
    """
    M, N = design.values.shape
    if M < N:
        raise ValueError(f"need M >= N for a condition number, got M={M}, N={N}")
    sigma = np.linalg.svd(design.values, compute_uv=False)
    if sigma[-1] == 0.0:
        return np.inf
    return float(sigma[0] / sigma[-1])
