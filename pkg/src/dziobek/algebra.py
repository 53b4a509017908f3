"""Algebraic structure of Dziobek configurations.

Shape variables, the configuration-matrix kernel computed two independent
ways, the mass-weighted kernel relations, the rank-1 factorization
m_i m_j s_ij = kappa delta_i delta_j, Veronese quadric residuals, the
degeneracy index, and the class-count bound 2^(C(n+1,2) + n - 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .model import (
    DegenerateDelta,
    DziobekVector,
    RankDeficient,
    ShapeMatrix,
    ZeroVector,
    _as_a,
    _as_masses,
)

__all__ = [
    "VeroneseImage",
    "CountBound",
    "shape_from_distances",
    "complete_diagonal",
    "configuration_matrix",
    "kernel_by_minors",
    "kernel_by_factorization",
    "dziobek_relation_residual",
    "rank1_fit",
    "veronese_residuals",
    "degeneracy_index",
    "veronese_map",
    "bound",
]


@dataclass(frozen=True)
class VeroneseImage:
    """Image of a vector under the degree-2 Veronese map.

    Coordinates are the products z_i z_j in lexicographic (i, j) order with
    i <= j; there are C(q+1, 2) of them for a q-vector.
    """

    coordinates: tuple[float, ...]
    source_dim: int


class CountBound(NamedTuple):
    exponent: int
    value: int


def shape_from_distances(d, a) -> ShapeMatrix:
    """Off-diagonal shape variables s_ij = d_ij^(2a) - 1; diagonal unset (NaN).

    Distances are interpreted in the r_0 = 1 gauge, so u_ij = d_ij.
    """
    aa = _as_a(a)
    dm = np.asarray(getattr(d, "d", d), dtype=float)
    n = dm.shape[0]
    iu = np.triu_indices(n, k=1)
    if np.any(dm[iu] <= 0.0):
        raise ValueError("distances must be positive")
    dm = dm.copy()
    np.fill_diagonal(dm, 1.0)  # placeholder; the diagonal is NaN'd below
    s = dm ** (2.0 * aa) - 1.0
    np.fill_diagonal(s, math.nan)
    return ShapeMatrix(s)


def complete_diagonal(s: ShapeMatrix, m) -> ShapeMatrix:
    """Fill the diagonal via the closure m_i s_ii = -sum_{j != i} m_j s_ij."""
    masses = _as_masses(m)
    mat = np.array(s.s, dtype=float)
    n = mat.shape[0]
    if masses.shape != (n,):
        raise ValueError("mass vector length must match the shape matrix")
    off = mat.copy()
    np.fill_diagonal(off, 0.0)
    diag = -(off * masses[None, :]).sum(axis=1) / masses
    np.fill_diagonal(mat, diag)
    return ShapeMatrix(mat)


def configuration_matrix(x) -> np.ndarray:
    """Augmented coordinate matrix: a row of ones above the coordinate rows.

    Shape (dim + 1, n); for a Dziobek configuration in its natural ambient
    dimension this is (n - 1) x n with rank n - 1.
    """
    coords = np.asarray(getattr(x, "x", x), dtype=float)
    n = coords.shape[0]
    return np.vstack([np.ones(n), coords.T])


def _normalize_kernel(delta: np.ndarray) -> np.ndarray:
    delta = delta / np.linalg.norm(delta)
    scale = np.max(np.abs(delta))
    for v in delta:
        if abs(v) > 1e-8 * scale:
            if v < 0.0:
                delta = -delta
            break
    return delta


def kernel_by_minors(x_mat) -> DziobekVector:
    """Kernel of the configuration matrix via signed maximal minors.

    delta_k = (-1)^(k+1) |X with column k removed| (1-based k), so that
    X @ delta = 0 exactly by cofactor expansion.  Normalized to unit length,
    first nonzero entry positive.
    """
    x = np.asarray(x_mat, dtype=float)
    rows, n = x.shape
    if rows != n - 1:
        raise ValueError("configuration matrix must be (n-1) x n")
    raw = np.empty(n)
    for k in range(n):
        sub = np.delete(x, k, axis=1)
        raw[k] = (-1.0) ** k * np.linalg.det(sub)
    # Hadamard bound on any maximal minor, used as the rank-deficiency scale
    hadamard = float(np.prod(np.linalg.norm(x, axis=1)))
    if np.max(np.abs(raw)) <= 1e-10 * max(hadamard, np.finfo(float).tiny):
        raise RankDeficient("all maximal minors vanish; rank below n-1")
    return DziobekVector(_normalize_kernel(raw))


def kernel_by_factorization(x_mat) -> DziobekVector:
    """Kernel of the configuration matrix via SVD null space.

    Independent of the minor route; same normalization convention.
    """
    x = np.asarray(x_mat, dtype=float)
    rows, n = x.shape
    if rows != n - 1:
        raise ValueError("configuration matrix must be (n-1) x n")
    _, sigma, vt = np.linalg.svd(x)
    if sigma[-1] <= 1e-10 * sigma[0]:
        raise RankDeficient("configuration matrix has rank below n-1")
    return DziobekVector(_normalize_kernel(vt[-1]))


def dziobek_relation_residual(s: ShapeMatrix, m, delta: DziobekVector) -> float:
    """Max violation of m_k s_ik delta_l = m_l s_il delta_k, scale-normalized.

    The normalizer is max |m_k s_ik delta_l| over all index triples; a zero
    normalizer (s identically zero) returns 0 since every relation is vacuous.
    """
    masses = _as_masses(m)
    mat = np.asarray(s.s, dtype=float)
    if not s.diagonal_complete:
        raise ValueError("shape diagonal must be completed first")
    dv = np.asarray(delta.delta, dtype=float)
    t = masses[None, :, None] * mat[:, :, None] * dv[None, None, :]
    num = float(np.max(np.abs(t - t.transpose(0, 2, 1))))
    den = float(np.max(np.abs(t)))
    return num / den if den > 0.0 else 0.0


def rank1_fit(s: ShapeMatrix, m, delta: DziobekVector) -> tuple[float, float]:
    """Least-squares kappa for m_i m_j s_ij = kappa delta_i delta_j.

    Returns (kappa, residual); the residual is the max entry defect over
    i <= j, normalized by the largest magnitude on either side of the fit.
    """
    masses = _as_masses(m)
    if not s.diagonal_complete:
        raise ValueError("shape diagonal must be completed first")
    mat = np.asarray(s.s, dtype=float)
    dv = np.asarray(delta.delta, dtype=float)
    n = mat.shape[0]
    iu = np.triu_indices(n)
    p = (np.outer(masses, masses) * mat)[iu]
    q = np.outer(dv, dv)[iu]
    denom = float(q @ q)
    if denom == 0.0:
        raise DegenerateDelta("kernel vector is identically zero")
    kappa = float(p @ q / denom)
    defect = float(np.max(np.abs(p - kappa * q)))
    scale = max(float(np.max(np.abs(p))), float(np.max(np.abs(kappa * q))))
    return kappa, (defect / scale if scale > 0.0 else 0.0)


def veronese_residuals(s: ShapeMatrix) -> float:
    """Max violation of the quadrics s_ij s_kl = s_ik s_jl over all quadruples.

    Normalized by max s_ij^2; these are the 2x2 minors of the symmetric shape
    matrix, so the residual vanishes iff s has rank one.
    """
    if not s.diagonal_complete:
        raise ValueError("shape diagonal must be completed first")
    mat = np.asarray(s.s, dtype=float)
    t1 = mat[:, :, None, None] * mat[None, None, :, :]
    t2 = mat[:, None, :, None] * mat[None, :, None, :]
    num = float(np.max(np.abs(t1 - t2)))
    den = float(np.max(mat * mat))
    return num / den if den > 0.0 else 0.0


def degeneracy_index(s: ShapeMatrix, tol: float = 1e-8) -> int:
    """Count of vanishing diagonal entries, relative to the largest.

    A count of n (all diagonal entries zero) signals the excluded
    regular-simplex case; genuine Dziobek configurations have index <= n-3.
    """
    if not s.diagonal_complete:
        raise ValueError("shape diagonal must be completed first")
    diag = np.abs(np.diag(np.asarray(s.s, dtype=float)))
    scale = float(diag.max())
    if scale == 0.0:
        return int(diag.shape[0])
    return int(np.sum(diag <= tol * scale))


def veronese_map(z) -> VeroneseImage:
    """Degree-2 Veronese image of a nonzero vector."""
    vec = np.asarray(z, dtype=float)
    if vec.ndim != 1 or vec.shape[0] < 1:
        raise ValueError("expected a 1-D vector")
    if np.all(vec == 0.0):
        raise ZeroVector("the zero vector has no Veronese image")
    coords = []
    q = vec.shape[0]
    for i in range(q):
        for j in range(i, q):
            coords.append(float(vec[i] * vec[j]))
    return VeroneseImage(tuple(coords), q)


def bound(n: int) -> CountBound:
    """Upper bound 2^(C(n+1,2) + n - 1) on the number of classes, exact."""
    if n < 3:
        raise ValueError("bound requires n >= 3")
    exponent = math.comb(n + 1, 2) + n - 1
    return CountBound(exponent, 2**exponent)
