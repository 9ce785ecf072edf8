"""Polynomial bases on projected coordinates.

Multi-index enumeration for total-degree polynomial spaces, one-dimensional
polynomial families (monomial, Legendre, probabilists' Hermite) with
derivatives, and the affine normalization applied to projected sample
coordinates before basis evaluation.
"""

from dataclasses import dataclass
from math import comb

import numpy as np

FAMILIES = ("monomial", "legendre", "hermite")

# Coordinate spread below this is treated as a single point.
DEGENERATE_SPREAD = 1e-14


def check_family(family: str) -> str:
    if family not in FAMILIES:
        raise ValueError(f"unknown basis family {family!r}; expected one of {FAMILIES}")
    return family


@dataclass(frozen=True)
class IndexSet:
    """Multi-indices of total degree <= p in n variables, in graded
    lexicographic order (ascending total degree, then descending
    lexicographic within each degree).

    Attributes
    ----------
    n : int
        Number of variables.
    p : int
        Maximum total degree.
    indices : ndarray of shape (N, n), dtype int
        One multi-index per row; N = binomial(n + p, p).
    """

    n: int
    p: int
    indices: np.ndarray

    def __len__(self) -> int:
        return self.indices.shape[0]


def enumerate_indices(n: int, p: int) -> IndexSet:
    """Enumerate all multi-indices alpha in N^n with |alpha| <= p.

    The order is deterministic: blocks of ascending total degree, and
    inside each block descending lexicographic order on the exponent
    tuple, so (n=2, p=2) yields (0,0), (1,0), (0,1), (2,0), (1,1), (0,2).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if p < 0:
        raise ValueError(f"p must be >= 0, got {p}")
    rows = []
    for degree in range(p + 1):
        rows.extend(_compositions(degree, n))
    indices = np.array(rows, dtype=int).reshape(-1, n)
    assert indices.shape[0] == comb(n + p, p)
    return IndexSet(n=n, p=p, indices=indices)


def _compositions(total, parts):
    # All ways to write `total` as `parts` non-negative integers,
    # first coordinate decreasing (descending lexicographic).
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def poly_table(family: str, p: int, y: np.ndarray) -> np.ndarray:
    """Evaluate all degrees 0..p of a 1-D family at the points y.

    Returns an array of shape y.shape + (p + 1,); column k holds
    phi_k(y).  Evaluation uses the classical three-term recurrences,
    which stay stable at high degree.
    """
    check_family(family)
    y = np.asarray(y, dtype=float)
    T = np.empty(y.shape + (p + 1,))
    T[..., 0] = 1.0
    if p == 0:
        return T
    T[..., 1] = y
    if family == "monomial":
        for k in range(1, p):
            T[..., k + 1] = y * T[..., k]
    elif family == "legendre":
        # (k+1) P_{k+1} = (2k+1) y P_k - k P_{k-1}, normalized P_k(1) = 1
        for k in range(1, p):
            T[..., k + 1] = ((2 * k + 1) * y * T[..., k] - k * T[..., k - 1]) / (k + 1)
    else:
        # probabilists' Hermite: He_{k+1} = y He_k - k He_{k-1}
        for k in range(1, p):
            T[..., k + 1] = y * T[..., k] - k * T[..., k - 1]
    return T


def poly_table_deriv(family: str, p: int, y: np.ndarray) -> np.ndarray:
    """Derivatives phi_k'(y) for all degrees 0..p, same layout as poly_table."""
    check_family(family)
    y = np.asarray(y, dtype=float)
    T = poly_table(family, p, y)
    D = np.zeros(y.shape + (p + 1,))
    if p == 0:
        return D
    D[..., 1] = 1.0
    if family == "monomial":
        for k in range(2, p + 1):
            D[..., k] = k * T[..., k - 1]
    elif family == "legendre":
        # (k+1) P'_{k+1} = (2k+1) (P_k + y P'_k) - k P'_{k-1}
        for k in range(1, p):
            D[..., k + 1] = ((2 * k + 1) * (T[..., k] + y * D[..., k]) - k * D[..., k - 1]) / (k + 1)
    else:
        # He'_k = k He_{k-1}
        for k in range(2, p + 1):
            D[..., k] = k * T[..., k - 1]
    return D


def eval_poly_1d(family: str, k: int, y):
    """Evaluate phi_k(y) for a single degree k; y may be scalar or array."""
    if k < 0:
        raise ValueError(f"degree must be >= 0, got {k}")
    out = poly_table(family, k, y)[..., k]
    return float(out) if np.ndim(y) == 0 else out


def eval_poly_1d_deriv(family: str, k: int, y):
    """Evaluate phi_k'(y); zero for k = 0."""
    if k < 0:
        raise ValueError(f"degree must be >= 0, got {k}")
    out = poly_table_deriv(family, k, y)[..., k]
    return float(out) if np.ndim(y) == 0 else out


@dataclass(frozen=True)
class AffineMap:
    """Per-coordinate affine normalization eta(y) = a + d * y.

    Attributes
    ----------
    a : ndarray of shape (n,)
        Offsets.
    d : ndarray of shape (n,)
        Strictly positive scales.
    """

    a: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.a, dtype=float))
        d = np.atleast_1d(np.asarray(self.d, dtype=float))
        if a.shape != d.shape or a.ndim != 1:
            raise ValueError("a and d must be 1-D arrays of equal length")
        if not np.all(d > 0):
            raise ValueError("all scales d must be positive")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    def apply(self, y: np.ndarray) -> np.ndarray:
        """Map projected coordinates y (shape (..., n)) to a + d * y."""
        return self.a + self.d * np.asarray(y, dtype=float)

    @staticmethod
    def identity(n: int) -> "AffineMap":
        return AffineMap(a=np.zeros(n), d=np.ones(n))


def fit_affine_map(family: str, projected_points: np.ndarray) -> AffineMap:
    """Fit the normalization map for a family from projected training points.

    For the monomial and legendre families each coordinate's observed
    [min, max] interval is mapped onto [-1, 1]; for hermite each
    coordinate is shifted and scaled to zero mean, unit standard
    deviation.  A coordinate whose spread (or standard deviation) falls
    below DEGENERATE_SPREAD gets d = 1 with the common value centered
    at zero.
    """
    check_family(family)
    Y = np.atleast_2d(np.asarray(projected_points, dtype=float))
    if Y.shape[0] < 1:
        raise ValueError("need at least one projected point")
    if family == "hermite":
        center = Y.mean(axis=0)
        scale = Y.std(axis=0)
    else:
        lo = Y.min(axis=0)
        hi = Y.max(axis=0)
        center = 0.5 * (lo + hi)
        scale = 0.5 * (hi - lo)
    degenerate = scale < DEGENERATE_SPREAD
    d = np.where(degenerate, 1.0, 1.0 / np.where(degenerate, 1.0, scale))
    a = -center * d
    return AffineMap(a=a, d=d)
