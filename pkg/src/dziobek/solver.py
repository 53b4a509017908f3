"""Enumeration of Dziobek classes by multistart damped Newton.

Newton operates on the gauge-reduced square system (see dziobek.reduction);
convergence is judged on the full residual.  Candidates are deduplicated
into classes by canonical distance keys, minimized over mass-preserving
relabelings, so classes are counted modulo rotation, translation, dilation,
reflection and relabeling of equal masses.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .geometry import affine_dimension, distance_matrix, gauge_normalize
from .model import (
    CCClass,
    CollapseDetected,
    Configuration,
    NoConvergence,
    OracleRootNotFound,
    UnsupportedCase,
    DistanceMatrix,
    _as_a,
    _as_masses,
    _as_positions,
)
from .reduction import ambient_dim, coords_from_free, free_count, free_from_coords
from ._pykernels import (
    jacobian_full,
    min_pair_distance_sq,
    residual_centered,
)

__all__ = [
    "SolveOptions",
    "CandidateSolution",
    "cc_residual",
    "cc_residual_centered",
    "cc_jacobian",
    "cc_jacobian_reduced",
    "newton_solve",
    "multistart_solve",
    "mass_preserving_permutations",
    "canonical_key",
    "dedup_classes",
    "singular_value_ratio",
    "isolation_check",
    "euler_collinear_oracle",
    "euler_collinear_configurations",
]


@dataclass(frozen=True)
class SolveOptions:
    """Multistart Newton budgets and tolerances.

    ``starts = None`` resolves to 500 * n at solve time.  The sampling box
    applies per coordinate; starts with any pair distance below
    ``min_start_separation`` are redrawn, and iterates that drive a pair
    below ``collision_eps`` are aborted.
    """

    starts: int | None = None
    max_iters: int = 80
    newton_tol: float = 1e-11
    dedup_tol: float = 1e-6
    seed: int = 0
    sampling_box: tuple[float, float] = (-1.5, 1.5)
    shrink: float = 0.5
    max_backtracks: int = 30
    collision_eps: float = 1e-8
    min_start_separation: float = 0.05
    dimension_tol: float = 1e-8

    def __post_init__(self):
        if self.starts is not None and self.starts < 1:
            raise ValueError("starts must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if not 0.0 < self.newton_tol < self.dedup_tol:
            raise ValueError("need 0 < newton_tol < dedup_tol")
        lo, hi = self.sampling_box
        if not lo < hi:
            raise ValueError("sampling box must be a nonempty interval")
        if not 0.0 < self.shrink < 1.0:
            raise ValueError("shrink must be in (0, 1)")
        if self.collision_eps <= 0.0 or self.min_start_separation <= 0.0:
            raise ValueError("collision guards must be positive")

    def resolved_starts(self, n: int) -> int:
        return self.starts if self.starts is not None else 500 * n

    def kernel_args(self) -> tuple:
        return (
            self.newton_tol,
            self.max_iters,
            self.shrink,
            self.max_backtracks,
            self.collision_eps,
        )


@dataclass(frozen=True, eq=False)
class CandidateSolution:
    """One converged, dimension-filtered Newton result."""

    configuration: Configuration
    residual_norm: float
    iterations: int
    start_index: int


def cc_residual(x, m, a) -> np.ndarray:
    """Central configuration residual in the r_0 = 1 gauge.

    Concatenation over bodies of sum_i m_i (r_ij^(2a) - 1)(x_i - x_j); any
    ambient dimension is accepted.
    """
    return kernels.residual_full(_as_positions(x), _as_masses(m), _as_a(a))


def cc_residual_centered(x, m, a) -> np.ndarray:
    """Multiplier form with lambda = M; equals cc_residual to round-off."""
    return residual_centered(_as_positions(x), _as_masses(m), _as_a(a))


def cc_jacobian(x, m, a) -> np.ndarray:
    """Unreduced analytic Jacobian of cc_residual, shape (n*dim, n*dim)."""
    return jacobian_full(_as_positions(x), _as_masses(m), _as_a(a))


def cc_jacobian_reduced(x, m, a) -> np.ndarray:
    """Jacobian restricted to the gauge-reduced square system."""
    masses = _as_masses(m)
    cfg = gauge_normalize(x)
    if cfg.ambient_dim != ambient_dim(cfg.n):
        raise ValueError("configuration must live in ambient dimension n-2")
    return kernels.jacobian_reduced(free_from_coords(cfg.x), masses, _as_a(a))


def newton_solve(x0, m, a, opts: SolveOptions | None = None, start_index: int = -1):
    """Damped Newton from one start; raises on failure.

    Raises NoConvergence when the iteration stalls or exhausts its budget and
    CollapseDetected when two bodies fall inside the collision guard.
    """
    opts = opts or SolveOptions()
    masses = _as_masses(m)
    aa = _as_a(a)
    cfg = gauge_normalize(x0)
    if cfg.ambient_dim != ambient_dim(cfg.n):
        raise ValueError("start must live in ambient dimension n-2")
    free0 = free_from_coords(cfg.x)
    free, resid, iters, status = kernels.newton_reduced(
        free0, masses, aa, *opts.kernel_args()
    )
    if status == kernels.NEWTON_COLLAPSE:
        raise CollapseDetected("two bodies collapsed below the collision guard")
    if status != kernels.NEWTON_OK:
        raise NoConvergence(
            f"Newton did not reach tol={opts.newton_tol:g} "
            f"(status {status}, residual {resid:.3e} after {iters} iterations)"
        )
    out = gauge_normalize(coords_from_free(free, masses.shape[0]))
    return CandidateSolution(out, float(resid), int(iters), start_index)


def _solve_block(payload):
    block, masses, aa, kernel_args = payload
    return [kernels.newton_reduced(f, masses, aa, *kernel_args) for f in block]


def _run_starts(free_starts, masses, aa, opts, workers):
    if workers <= 1:
        return _solve_block((free_starts, masses, aa, opts.kernel_args()))
    chunks = np.array_split(free_starts, max(workers * 4, 1))
    payloads = [(c, masses, aa, opts.kernel_args()) for c in chunks if len(c)]
    results = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for block in pool.map(_solve_block, payloads):
            results.extend(block)
    return results


def multistart_solve(m, a, opts: SolveOptions | None = None, workers: int = 1):
    """Run Newton from seeded random starts; return converged candidates.

    Starts are drawn uniformly in the sampling box (redrawn on near
    collisions), results are filtered to affine dimension exactly n-2 and
    sorted by canonical key, so the output is independent of scheduling.
    """
    opts = opts or SolveOptions()
    masses = _as_masses(m)
    aa = _as_a(a)
    n = masses.shape[0]
    d = ambient_dim(n)
    if d < 1:
        raise ValueError("need n >= 3")
    starts = opts.resolved_starts(n)
    rng = np.random.default_rng(opts.seed)
    lo, hi = opts.sampling_box
    sep2 = opts.min_start_separation**2

    free_starts = np.empty((starts, free_count(n)))
    for idx in range(starts):
        while True:
            pts = rng.uniform(lo, hi, size=(n, d))
            if min_pair_distance_sq(pts) >= sep2:
                break
        free_starts[idx] = free_from_coords(gauge_normalize(pts).x)

    raw = _run_starts(free_starts, masses, aa, opts, workers)
    perms = mass_preserving_permutations(masses)
    candidates = []
    for idx, (free, resid, iters, status) in enumerate(raw):
        if status != kernels.NEWTON_OK:
            continue
        cfg = gauge_normalize(coords_from_free(np.asarray(free), n))
        if affine_dimension(cfg.x, opts.dimension_tol) != d:
            continue
        candidates.append(CandidateSolution(cfg, float(resid), int(iters), idx))
    candidates.sort(
        key=lambda c: (canonical_key(c.configuration, masses, perms), c.start_index)
    )
    return candidates


def mass_preserving_permutations(m) -> np.ndarray:
    """All body relabelings that keep the mass vector fixed, as an array."""
    masses = _as_masses(m)
    n = masses.shape[0]
    groups: dict[float, list[int]] = {}
    for i, v in enumerate(masses.tolist()):
        groups.setdefault(v, []).append(i)
    pools = [list(itertools.permutations(g)) for g in groups.values()]
    perms = []
    for combo in itertools.product(*pools):
        perm = np.empty(n, dtype=np.intp)
        for orig, img in zip(groups.values(), combo):
            for src, dst in zip(orig, img):
                perm[src] = dst
        perms.append(perm)
    return np.array(perms)


def canonical_key(x, m, perms: np.ndarray | None = None) -> tuple[float, ...]:
    """Pair-distance vector minimized lexicographically over relabelings.

    The lexicographic (i, j), i < j ordering of pairs is used.  With all
    masses distinct the orbit is trivial and the key is the raw pair vector.
    """
    coords = _as_positions(x)
    masses = _as_masses(m)
    dist = distance_matrix(coords).d
    n = coords.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    if perms is None:
        perms = mass_preserving_permutations(masses)
    if perms.shape[0] == 1:
        return tuple(float(v) for v in dist[iu, ju])
    keys = dist[perms[:, iu], perms[:, ju]]
    order = np.lexsort(keys.T[::-1])
    return tuple(float(v) for v in keys[order[0]])


def dedup_classes(candidates, m, dedup_tol: float = 1e-6) -> list[CCClass]:
    """Merge candidates into classes by canonical key proximity.

    Two candidates merge iff their keys agree within dedup_tol in every
    component; the representative is the lowest-residual member.  Output is
    sorted by canonical key.
    """
    masses = _as_masses(m)
    perms = mass_preserving_permutations(masses)
    keyed = [
        (np.array(canonical_key(c.configuration, masses, perms)), c)
        for c in candidates
    ]
    keyed.sort(key=lambda kc: (tuple(kc[0]), kc[1].start_index))
    clusters: list[dict] = []
    for key, cand in keyed:
        for cluster in clusters:
            if np.max(np.abs(key - cluster["key0"])) < dedup_tol:
                cluster["members"].append((key, cand))
                break
        else:
            clusters.append({"key0": key, "members": [(key, cand)]})
    classes = []
    for cluster in clusters:
        rep_key, rep = min(
            cluster["members"],
            key=lambda kc: (kc[1].residual_norm, kc[1].start_index),
        )
        classes.append(
            CCClass(
                canonical_key=tuple(float(v) for v in rep_key),
                representative=rep.configuration,
                certificate=None,
                multiplicity_found=len(cluster["members"]),
            )
        )
    classes.sort(key=lambda c: c.canonical_key)
    return classes


def singular_value_ratio(mat) -> float:
    """sigma_min / sigma_max of a matrix; 0 for the zero matrix."""
    sigma = np.linalg.svd(np.asarray(mat, dtype=float), compute_uv=False)
    if sigma.size == 0 or sigma[0] == 0.0:
        return 0.0
    return float(sigma[-1] / sigma[0])


def isolation_check(x, m, a, tol: float = 1e-6) -> bool:
    """True when the gauge-reduced Jacobian is far from singular.

    The smallest singular value must exceed tol times the largest; a rank
    drop signals a non-isolated (degenerate) solution.
    """
    return singular_value_ratio(cc_jacobian_reduced(x, m, a)) > tol


def _euler_root(me_left, m_mid, me_right, a):
    """Interior ratio t and overall scale L for one collinear ordering."""
    total = me_left + m_mid + me_right
    p = 2.0 * a + 1.0

    def g(t):
        acoef = m_mid * t**p + me_right
        bcoef = -me_left - m_mid * (1.0 - t) ** p
        com = (m_mid * t + me_right) / total
        return acoef * (1.0 - com) + bcoef * com

    lo, hi = 1e-9, 1.0 - 1e-9
    glo, ghi = g(lo), g(hi)
    if not (np.isfinite(glo) and np.isfinite(ghi)) or glo * ghi > 0.0:
        raise OracleRootNotFound("no sign change on (0, 1)")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        gm = g(mid)
        if gm == 0.0:
            lo = hi = mid
            break
        if (gm > 0.0) == (glo > 0.0):
            lo, glo = mid, gm
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    t = 0.5 * (lo + hi)
    acoef = m_mid * t**p + me_right
    com = (m_mid * t + me_right) / total
    lam = acoef / com
    scale = (total / lam) ** (1.0 / (2.0 * a))
    return t, scale


def euler_collinear_oracle(m, a) -> tuple[DistanceMatrix, DistanceMatrix, DistanceMatrix]:
    """Three-body collinear solutions by 1-D bisection, one per middle body.

    Independent of the Newton machinery: eliminates the multiplier from the
    two end-body equations and bisects the interior ratio t in (0, 1), then
    scales to the r_0 = 1 gauge.  Distances are labeled by body index.
    """
    masses = _as_masses(m)
    if masses.shape[0] != 3:
        raise UnsupportedCase("the collinear oracle is three-body only")
    aa = _as_a(a)
    out = []
    for mid in range(3):
        left, right = [i for i in range(3) if i != mid]
        t, scale = _euler_root(masses[left], masses[mid], masses[right], aa)
        D = np.zeros((3, 3))
        D[left, mid] = D[mid, left] = scale * t
        D[mid, right] = D[right, mid] = scale * (1.0 - t)
        D[left, right] = D[right, left] = scale
        out.append(DistanceMatrix(D))
    return tuple(out)


def euler_collinear_configurations(m, a) -> list[Configuration]:
    """Gauged 1-D configurations for the three collinear orderings."""
    masses = _as_masses(m)
    if masses.shape[0] != 3:
        raise UnsupportedCase("the collinear oracle is three-body only")
    aa = _as_a(a)
    configs = []
    for mid in range(3):
        left, right = [i for i in range(3) if i != mid]
        t, scale = _euler_root(masses[left], masses[mid], masses[right], aa)
        pos = np.zeros((3, 1))
        pos[left, 0] = 0.0
        pos[mid, 0] = scale * t
        pos[right, 0] = scale
        configs.append(gauge_normalize(pos))
    return configs
