"""Grassmann manifold primitives.

A point on the Grassmann manifold G(n, R^m) is represented by an m x n
matrix with orthonormal columns; tangent directions Delta satisfy
U^T Delta = 0.  Motion along the manifold follows the geodesic formula
U(t) = U Z cos(S t) Z^T + Y sin(S t) Z^T built from the short-form SVD
Y S Z^T of the tangent direction.
"""

import numpy as np

# Acceptance bands for the orthonormality defect ||U^T U - I||_max.
ORTHO_TOL = 1e-12
ORTHO_REPAIR_TOL = 1e-8


def orthonormality_defect(U: np.ndarray) -> float:
    U = np.asarray(U, dtype=float)
    return float(np.abs(U.T @ U - np.eye(U.shape[1])).max())


def as_subspace(U: np.ndarray) -> np.ndarray:
    """Validate (and if mildly drifted, repair) a subspace basis matrix.

    Defects up to ORTHO_TOL pass through unchanged; defects below
    ORTHO_REPAIR_TOL are re-orthonormalized by QR; anything worse is
    rejected as not representing a subspace.
    """
    U = np.asarray(U, dtype=float)
    if U.ndim != 2:
        raise ValueError("subspace basis must be a 2-D array")
    m, n = U.shape
    if not 1 <= n <= m:
        raise ValueError(f"subspace dimension must satisfy 1 <= n <= m, got ({m}, {n})")
    defect = orthonormality_defect(U)
    if defect <= ORTHO_TOL:
        return U
    if defect <= ORTHO_REPAIR_TOL:
        return np.linalg.qr(U)[0]
    raise ValueError(f"columns are far from orthonormal (defect {defect:.2e})")


def random_subspace(m: int, n: int, rng_seed=None) -> np.ndarray:
    """Draw a Haar-uniform n-dimensional subspace of R^m.

    QR factorization of an m x n matrix of independent standard normals;
    deterministic for a fixed seed.  rng_seed may also be an existing
    numpy Generator, which is advanced in place.
    """
    if not 1 <= n <= m:
        raise ValueError(f"need 1 <= n <= m, got m={m}, n={n}")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    return np.linalg.qr(rng.standard_normal((m, n)))[0]


def tangent_project(U: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Project G onto the tangent space at U: (I - U U^T) G."""
    U = np.asarray(U, dtype=float)
    G = np.asarray(G, dtype=float)
    if G.shape != U.shape:
        raise ValueError(f"shape mismatch: U is {U.shape}, G is {G.shape}")
    return G - U @ (U.T @ G)


def geodesic(U0: np.ndarray, delta: np.ndarray, t: float) -> np.ndarray:
    """Point at parameter t along the geodesic through U0 with velocity delta."""
    U0 = np.asarray(U0, dtype=float)
    delta = np.asarray(delta, dtype=float)
    if t == 0.0 or not delta.any():
        return U0.copy()
    Y, sigma, Zt = np.linalg.svd(delta, full_matrices=False)
    return geodesic_from_svd(U0, (Y, sigma, Zt), t)


def geodesic_from_svd(U0: np.ndarray, svd, t: float) -> np.ndarray:
    """Same as geodesic, reusing a precomputed short-form SVD of delta.

    The SVD does not depend on t, so a backtracking line search computes
    it once and calls this for every trial step length.
    """
    if t == 0.0:
        return U0.copy()
    Y, sigma, Zt = svd
    st = sigma * t
    return (U0 @ Zt.T) * np.cos(st) @ Zt + (Y * np.sin(st)) @ Zt


def principal_angles(U1: np.ndarray, U2: np.ndarray) -> np.ndarray:
    """All n canonical angles between two subspaces, ascending, in radians.

    Cosines come from the singular values of U1^T U2, clamped into
    [-1, 1] to absorb roundoff.  Because arccos cannot resolve angles
    below about 1e-8, angles under pi/4 are recomputed from the sines
    (singular values of the projection of U2 off U1), which stay
    accurate down to machine precision.
    """
    U1 = np.asarray(U1, dtype=float)
    U2 = np.asarray(U2, dtype=float)
    if U1.shape != U2.shape:
        raise ValueError(f"shape mismatch: {U1.shape} vs {U2.shape}")
    C = U1.T @ U2
    cosines = np.linalg.svd(C, compute_uv=False)
    from_cos = np.arccos(np.clip(cosines, -1.0, 1.0))  # ascending
    sines = np.linalg.svd(U2 - U1 @ C, compute_uv=False)
    from_sin = np.arcsin(np.clip(sines, 0.0, 1.0))[::-1]  # ascending
    return np.where(from_cos < np.pi / 4, from_sin, from_cos)


def subspace_angle(U1: np.ndarray, U2: np.ndarray) -> float:
    """Largest canonical angle between the spans of U1 and U2, in [0, pi/2]."""
    return float(min(principal_angles(U1, U2)[-1], np.pi / 2))
