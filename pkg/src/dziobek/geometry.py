"""Euclidean geometry: dimension measurement, distance realization, gauge.

The gauge convention used throughout: body 1 at the origin and the echelon
rotation frame (body k+1 supported on the first k axes, leading coordinate
nonnegative where it is nonzero).  Fixing every leading sign also pins the
reflection, so classes are represented modulo reflection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    Configuration,
    DistanceMatrix,
    Gauge,
    NonPositiveShape,
    NotEmbeddable,
    ShapeMatrix,
    _as_a,
    _as_masses,
    _as_positions,
)

__all__ = [
    "RealizationResult",
    "center_of_mass",
    "distance_matrix",
    "affine_dimension",
    "cayley_menger_det",
    "realize_from_distances",
    "distances_from_shape",
    "gauge_normalize",
]


@dataclass(frozen=True)
class RealizationResult:
    """Outcome of embedding a distance matrix.

    achieved_dim counts all Gram eigenvalues above tolerance (it may exceed
    the requested dimension); spectral_tail is the relative magnitude of the
    largest eigenvalue the embedding discarded.
    """

    configuration: Configuration
    achieved_dim: int
    spectral_tail: float


def center_of_mass(x, m) -> np.ndarray:
    coords = _as_positions(x)
    masses = _as_masses(m)
    return masses @ coords / masses.sum()


def distance_matrix(x) -> DistanceMatrix:
    """Pairwise distances of a configuration, computed once per pair."""
    coords = _as_positions(x)
    n = coords.shape[0]
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            v = float(np.linalg.norm(coords[i] - coords[j]))
            d[i, j] = v
            d[j, i] = v
    return DistanceMatrix(d)


def affine_dimension(x, tol: float = 1e-8) -> int:
    """Dimension of the affine span, via singular values of centered rows."""
    coords = _as_positions(x)
    centered = coords - coords.mean(axis=0)
    sigma = np.linalg.svd(centered, compute_uv=False)
    if sigma.size == 0 or sigma[0] == 0.0:
        return 0
    return int(np.sum(sigma > tol * sigma[0]))


def cayley_menger_det(d, subset=None) -> float:
    """Bordered determinant of squared distances over a point subset.

    For k+1 points the determinant vanishes iff their affine span has
    dimension below k.  Example: 3 points at unit mutual distance give -3.
    """
    dm = np.asarray(getattr(d, "d", d), dtype=float)
    if subset is None:
        subset = np.arange(dm.shape[0])
    subset = np.asarray(subset, dtype=int)
    if subset.size < 2 or np.unique(subset).size != subset.size:
        raise ValueError("subset must hold at least two distinct indices")
    sq = dm[np.ix_(subset, subset)] ** 2
    k = subset.size
    border = np.ones((k + 1, k + 1))
    border[0, 0] = 0.0
    border[1:, 1:] = sq
    return float(np.linalg.det(border))


def realize_from_distances(d, target_dim: int, tol: float = 1e-10) -> RealizationResult:
    """Embed a distance matrix by classical scaling (double centering).

    The Gram matrix is B = -J D^2 J / 2 with J the centering projector; the
    embedding uses the top target_dim nonnegative eigenvalues.  Eigenvalues
    below tol * lambda_max are treated as zero; an eigenvalue below
    -tol * lambda_max means the distances are not Euclidean at all.
    """
    dm = np.asarray(getattr(d, "d", d), dtype=float)
    n = dm.shape[0]
    if not 1 <= target_dim <= n - 1:
        raise ValueError("target dimension must be in [1, n-1]")
    j = np.eye(n) - np.ones((n, n)) / n
    b = -0.5 * j @ (dm**2) @ j
    evals, evecs = np.linalg.eigh(b)
    order = np.argsort(evals)[::-1]
    evals = evals[order]
    evecs = evecs[:, order]
    lam_max = float(evals[0])
    if lam_max <= 0.0:
        raise NotEmbeddable("distance data has no positive Gram eigenvalue")
    if float(evals[-1]) < -tol * lam_max:
        raise NotEmbeddable(
            f"Gram eigenvalue {evals[-1]:.3e} below -tol*lambda_max; "
            "distances are not realizable in any Euclidean space"
        )
    achieved = int(np.sum(evals > tol * lam_max))
    lead = np.clip(evals[:target_dim], 0.0, None)
    coords = evecs[:, :target_dim] * np.sqrt(lead)[None, :]
    tail = 0.0
    if target_dim < n:
        tail = float(np.max(np.abs(evals[target_dim:]))) / lam_max
    config = gauge_normalize(coords)
    return RealizationResult(config, achieved, tail)


def distances_from_shape(s: ShapeMatrix, a) -> DistanceMatrix:
    """Recover gauged distances d_ij = (1 + s_ij)^(1/(2a)) from shape entries.

    Raises NonPositiveShape when some 1 + s_ij <= 0: the shape entry is then
    algebraically consistent but carries no positive distance.
    """
    aa = _as_a(a)
    mat = np.asarray(s.s, dtype=float)
    n = mat.shape[0]
    base = 1.0 + mat
    iu = np.triu_indices(n, k=1)
    if np.any(base[iu] <= 0.0):
        raise NonPositiveShape("some 1 + s_ij <= 0; no positive distance exists")
    d = np.zeros((n, n))
    vals = base[iu] ** (1.0 / (2.0 * aa))
    d[iu] = vals
    d.T[iu] = vals
    return DistanceMatrix(d)


def _echelon_state(coords: np.ndarray) -> str:
    """'canonical' / 'flippable' (echelon zeros, some leading sign negative) /
    'general'."""
    n, dim = coords.shape
    if np.any(coords[0] != 0.0):
        return "general"
    for i in range(1, n):
        if i < dim and np.any(coords[i, i:] != 0.0):
            return "general"
    for i in range(1, min(dim, n - 1) + 1):
        if coords[i, i - 1] < 0.0:
            return "flippable"
    return "canonical"


def gauge_normalize(x, target_dim: int | None = None, tol: float = 1e-9) -> Configuration:
    """Translate body 1 to the origin and rotate to the echelon frame.

    Re-gauging a gauged configuration is the exact identity.  With
    target_dim set, trailing coordinate rows whose magnitude is below
    tol * scale are truncated (used after dimension checks to drop the
    numerically-zero directions of an over-wide ambient space).
    """
    input_config = x if isinstance(x, Configuration) else None
    coords = _as_positions(x)
    n, dim = coords.shape

    state = _echelon_state(coords) if target_dim in (None, dim) else "general"
    if state == "canonical":
        if input_config is not None and input_config.gauge is not None:
            return input_config
        return Configuration(coords, Gauge())
    if state == "flippable":
        fixed = coords.copy()
        for i in range(1, min(dim, n - 1) + 1):
            if fixed[i, i - 1] < 0.0:
                fixed[:, i - 1] *= -1.0
        return Configuration(fixed, Gauge())

    y = (coords - coords[0])[1:].T  # (dim, n-1): columns are bodies 2..n
    _, r = np.linalg.qr(y)
    k = r.shape[0]
    for i in range(k):
        if r[i, i] < 0.0:
            r[i, :] *= -1.0
    new_dim = k
    if target_dim is not None:
        if k > target_dim:
            scale = float(np.max(np.abs(r))) or 1.0
            tailmag = float(np.max(np.abs(r[target_dim:, :])))
            if tailmag > tol * scale:
                raise ValueError(
                    "configuration does not fit in the requested dimension"
                )
            r = r[:target_dim, :]
            new_dim = target_dim
        elif k < target_dim:
            r = np.vstack([r, np.zeros((target_dim - k, r.shape[1]))])
            new_dim = target_dim
    out = np.zeros((n, new_dim))
    out[1:] = r.T
    return Configuration(out, Gauge())
