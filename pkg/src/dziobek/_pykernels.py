"""Pure numpy implementation of the solver kernels.

Mirrors the compiled core in dziobek._ccore; dziobek.kernels picks whichever
is available.  All functions work on bare float64 arrays so they can be used
from worker processes without touching the domain types.

Distances enter only through squared norms: r^(2a) is computed as (r^2)^a,
so no square roots appear in the residual or Jacobian.
"""

from __future__ import annotations

import numpy as np

from .reduction import ambient_dim, coords_from_free, free_count, reduced_indices

__all__ = [
    "residual_full",
    "residual_centered",
    "jacobian_full",
    "residual_reduced",
    "jacobian_reduced",
    "newton_reduced",
    "min_pair_distance_sq",
    "NEWTON_OK",
    "NEWTON_NO_CONVERGENCE",
    "NEWTON_COLLAPSE",
    "NEWTON_STALLED",
]

NEWTON_OK = 0
NEWTON_NO_CONVERGENCE = 1
NEWTON_COLLAPSE = 2
NEWTON_STALLED = 3


def _pair_geometry(coords):
    """diff[i, j] = x_i - x_j and squared distances with unit diagonal."""
    diff = coords[:, None, :] - coords[None, :, :]
    r2 = np.einsum("ijk,ijk->ij", diff, diff)
    np.fill_diagonal(r2, 1.0)
    return diff, r2


def min_pair_distance_sq(coords) -> float:
    coords = np.asarray(coords, dtype=float)
    _, r2 = _pair_geometry(coords)
    n = coords.shape[0]
    return float(np.min(r2 + np.diag(np.full(n, np.inf))))


def residual_full(coords, m, a) -> np.ndarray:
    """Gauged balance equations, flattened to length n * dim.

    Component block j is sum_i m_i (r_ij^(2a) - 1)(x_i - x_j); any ambient
    dimension is accepted.
    """
    coords = np.asarray(coords, dtype=float)
    m = np.asarray(m, dtype=float)
    diff, r2 = _pair_geometry(coords)
    w = r2**a - 1.0
    np.fill_diagonal(w, 0.0)
    c = m[:, None] * w  # c[i, j] = m_i (r_ij^(2a) - 1)
    f = c.T @ coords - c.sum(axis=0)[:, None] * coords
    return f.ravel()


def residual_centered(coords, m, a) -> np.ndarray:
    """Multiplier form of the balance equations with lambda = total mass.

    sum_{i != j} m_i (x_i - x_j) r_ij^(2a) + M (x_j - c) = 0; agrees with
    residual_full identically up to round-off.
    """
    coords = np.asarray(coords, dtype=float)
    m = np.asarray(m, dtype=float)
    diff, r2 = _pair_geometry(coords)
    w = r2**a
    np.fill_diagonal(w, 0.0)
    c = m[:, None] * w
    f = c.T @ coords - c.sum(axis=0)[:, None] * coords
    total = m.sum()
    com = (m @ coords) / total
    f += total * (coords - com[None, :])
    return f.ravel()


def jacobian_full(coords, m, a) -> np.ndarray:
    """Analytic Jacobian of residual_full, shape (n*dim, n*dim).

    Off-diagonal block (j, k) is m_k [(r_jk^(2a)-1) I + 2a r_jk^(2a-2) u u^T]
    with u = x_k - x_j; diagonal blocks make each block row sum to zero.
    """
    coords = np.asarray(coords, dtype=float)
    m = np.asarray(m, dtype=float)
    n, dim = coords.shape
    diff, r2 = _pair_geometry(coords)
    w = r2**a - 1.0
    np.fill_diagonal(w, 0.0)
    g = 2.0 * a * r2 ** (a - 1.0)
    np.fill_diagonal(g, 0.0)
    eye = np.eye(dim)
    gmat = w[:, :, None, None] * eye + g[:, :, None, None] * (
        diff[:, :, :, None] * diff[:, :, None, :]
    )
    blocks = m[None, :, None, None] * gmat
    rows = np.arange(n)
    blocks[rows, rows] = -blocks.sum(axis=1)
    return blocks.transpose(0, 2, 1, 3).reshape(n * dim, n * dim)


def residual_reduced(free, m, a) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    coords = coords_from_free(free, n)
    return residual_full(coords, m, a)[reduced_indices(n)]


def jacobian_reduced(free, m, a) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    coords = coords_from_free(free, n)
    idx = reduced_indices(n)
    return jacobian_full(coords, m, a)[np.ix_(idx, idx)]


def newton_reduced(
    free0,
    m,
    a,
    tol,
    max_iters,
    shrink,
    max_backtracks,
    collision_eps,
):
    """Damped Newton on the gauge-reduced square system.

    Backtracking line search on the reduced residual max-norm; convergence is
    declared on the *full* residual max-norm, which also rejects spurious
    roots of the reduced system.  Returns (free, full_resid, iters, status).
    """
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    d = ambient_dim(n)
    idx = reduced_indices(n)
    eps2 = collision_eps * collision_eps

    free = np.array(free0, dtype=float)
    if free.shape != (free_count(n),):
        raise ValueError("free vector has the wrong length")

    coords = coords_from_free(free, n)
    diff, r2 = _pair_geometry(coords)
    min_r2 = float(np.min(r2 + np.diag(np.full(n, np.inf))))
    if min_r2 < eps2:
        return free, np.inf, 0, NEWTON_COLLAPSE

    full = residual_full(coords, m, a)
    full_norm = float(np.max(np.abs(full)))
    iters = 0
    for _ in range(max_iters):
        if full_norm < tol:
            return free, full_norm, iters, NEWTON_OK
        red = full[idx]
        red_norm = float(np.max(np.abs(red)))
        if red_norm < 1e-3 * tol:
            # reduced system satisfied but the dropped components are not:
            # a spurious root (degenerate echelon flag), not a solution
            return free, full_norm, iters, NEWTON_NO_CONVERGENCE
        jac = jacobian_full(coords, m, a)[np.ix_(idx, idx)]
        try:
            step = np.linalg.solve(jac, -red)
        except np.linalg.LinAlgError:
            return free, full_norm, iters, NEWTON_STALLED
        if not np.all(np.isfinite(step)):
            return free, full_norm, iters, NEWTON_STALLED

        alpha = 1.0
        accepted = False
        for _ in range(max_backtracks + 1):
            trial = free + alpha * step
            tcoords = coords_from_free(trial, n)
            _, tr2 = _pair_geometry(tcoords)
            tmin = float(np.min(tr2 + np.diag(np.full(n, np.inf))))
            if tmin >= eps2:
                tfull = residual_full(tcoords, m, a)
                merit = float(np.max(np.abs(tfull[idx])))
                if np.isfinite(merit) and merit < red_norm:
                    free = trial
                    coords = tcoords
                    full = tfull
                    full_norm = float(np.max(np.abs(tfull)))
                    accepted = True
                    break
            alpha *= shrink
        if not accepted:
            return free, full_norm, iters, NEWTON_STALLED
        iters += 1

    if full_norm < tol:
        return free, full_norm, iters, NEWTON_OK
    return free, full_norm, iters, NEWTON_NO_CONVERGENCE
