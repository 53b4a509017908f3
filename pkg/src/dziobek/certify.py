"""Certification of candidates against the Dziobek algebraic structure.

A full certificate checks, in order: affine dimension exactly n - 2, the
central configuration residual in both forms, agreement of the two kernel
routes, the pairwise multiplier relations, the rank-1 factorization
m_i m_j s_ij = kappa delta_i delta_j, the Veronese quadrics, the degeneracy
index, and isolation of the gauge-reduced Jacobian.  Shape-only input gets a
partial certificate after an embedding step.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace

import numpy as np

from .algebra import (
    complete_diagonal,
    configuration_matrix,
    degeneracy_index,
    dziobek_relation_residual,
    kernel_by_factorization,
    kernel_by_minors,
    rank1_fit,
    shape_from_distances,
    veronese_residuals,
)
from .geometry import (
    affine_dimension,
    distance_matrix,
    distances_from_shape,
    gauge_normalize,
    realize_from_distances,
)
from .model import (
    Certificate,
    DziobekVector,
    NotEmbeddable,
    ShapeMatrix,
    WrongDimension,
    _as_a,
    _as_masses,
    _as_positions,
)
from .reduction import ambient_dim
from .solver import (
    cc_jacobian_reduced,
    cc_residual,
    cc_residual_centered,
    singular_value_ratio,
)

__all__ = ["CertifyTolerances", "certify", "certify_shape", "certified_classes"]


@dataclass(frozen=True)
class CertifyTolerances:
    """Acceptance thresholds; residuals are max-norm, scale-normalized where
    the quantity is not already gauge-fixed."""

    cc: float = 1e-9
    dziobek: float = 1e-8
    rank1: float = 1e-8
    veronese: float = 1e-8
    isolation: float = 1e-6
    degeneracy: float = 1e-8
    dimension: float = 1e-8
    kernel_cosine: float = 1e-10
    embedding: float = 1e-10

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not 0.0 < value < 1.0:
                raise ValueError(f"tolerance {name} must lie in (0, 1)")


def _kernel_pair(coords: np.ndarray):
    xmat = configuration_matrix(coords)
    d1 = kernel_by_minors(xmat)
    d2 = kernel_by_factorization(xmat)
    # both unit norm with matching sign convention, so the gap is 1 - |cos|
    gap = 1.0 - abs(float(d1.delta @ d2.delta))
    return d1, gap


def _algebraic_checks(s: ShapeMatrix, masses, delta, tols: CertifyTolerances):
    dz = dziobek_relation_residual(s, masses, delta)
    kappa, r1 = rank1_fit(s, masses, delta)
    ver = veronese_residuals(s)
    deg = degeneracy_index(s, tols.degeneracy)
    failures = []
    if dz > tols.dziobek:
        failures.append("dziobek-relations")
    if kappa == 0.0:
        failures.append("kappa-zero")
    if r1 > tols.rank1:
        failures.append("rank1")
    if ver > tols.veronese:
        failures.append("veronese")
    if deg == s.n:
        failures.append("degenerate-simplex")
    return dz, kappa, r1, ver, deg, failures


def certify(x, m, a, tols: CertifyTolerances | None = None) -> Certificate:
    """Full certificate for a position candidate.

    Raises WrongDimension when the affine span is not n - 2; every other
    defect is reported as a failure tag on a rejected certificate.
    """
    tols = tols or CertifyTolerances()
    masses = _as_masses(m)
    aa = _as_a(a)
    coords = _as_positions(x)
    n = masses.shape[0]
    if coords.shape[0] != n:
        raise ValueError("positions and masses disagree on n")
    expected = ambient_dim(n)
    measured = affine_dimension(coords, tols.dimension)
    if measured != expected:
        raise WrongDimension(measured, expected)
    cfg = gauge_normalize(coords, target_dim=expected, tol=tols.dimension)

    resid = cc_residual(cfg.x, masses, aa)
    cc_norm = float(np.max(np.abs(resid)))
    form_gap = float(
        np.max(np.abs(resid - cc_residual_centered(cfg.x, masses, aa)))
    )

    delta, kernel_gap = _kernel_pair(cfg.x)
    s = complete_diagonal(
        shape_from_distances(distance_matrix(cfg.x), aa), masses
    )
    dz, kappa, r1, ver, deg, failures = _algebraic_checks(s, masses, delta, tols)

    # isolation is reported, not gated on: exact solutions with a rank drop
    # (degenerate families) still carry the full algebraic structure
    iso_ratio = singular_value_ratio(cc_jacobian_reduced(cfg.x, masses, aa))
    isolated = iso_ratio > tols.isolation

    if cc_norm > tols.cc:
        failures.insert(0, "cc-residual")
    if form_gap > tols.cc:
        failures.append("forms-disagree")
    if kernel_gap > tols.kernel_cosine:
        failures.append("kernel-mismatch")

    return Certificate(
        cc_residual=cc_norm,
        dziobek_residual=dz,
        kappa=kappa,
        rank1_residual=r1,
        veronese_residual=ver,
        degeneracy_index=deg,
        affine_dim=measured,
        isolated=isolated,
        accepted=not failures,
        failures=tuple(failures),
        tolerances_used=asdict(tols),
        details={
            "kernel_cosine_gap": kernel_gap,
            "form_agreement": form_gap,
            "isolation_ratio": iso_ratio,
            "delta": [float(v) for v in delta.delta],
        },
    )


def certify_shape(
    s, m, delta, a, tols: CertifyTolerances | None = None
) -> Certificate:
    """Partial certificate for externally supplied (shape, kernel) data.

    Runs the algebra-only checks against the given Dziobek vector, then
    attempts to realize the shape geometrically: distances are recovered
    (NonPositiveShape propagates) and embedded into n - 2 dimensions; an
    unembeddable or high-spectral-tail Gram matrix and a realized kernel
    not parallel to the supplied delta are reported as failures.
    """
    tols = tols or CertifyTolerances()
    masses = _as_masses(m)
    aa = _as_a(a)
    mat = np.asarray(getattr(s, "s", s), dtype=float)
    shape = ShapeMatrix(mat)
    if not shape.diagonal_complete:
        shape = complete_diagonal(shape, masses)
    n = shape.n
    dv = delta if isinstance(delta, DziobekVector) else DziobekVector(delta)
    dz, kappa, r1, ver, deg, failures = _algebraic_checks(shape, masses, dv, tols)

    details: dict = {"delta": [float(v) for v in dv.delta]}
    achieved = None
    dmat = distances_from_shape(shape, aa)
    try:
        realization = realize_from_distances(
            dmat, ambient_dim(n), tol=tols.embedding
        )
    except NotEmbeddable as e:
        failures.append("not-embeddable")
        details["embedding_error"] = str(e)
    else:
        achieved = realization.achieved_dim
        details["spectral_tail"] = realization.spectral_tail
        if realization.spectral_tail > tols.embedding:
            failures.append("embedding")
        realized, kernel_gap = _kernel_pair(realization.configuration.x)
        unit = dv.delta / np.linalg.norm(dv.delta)
        cosine_gap = 1.0 - abs(float(realized.delta @ unit))
        details["kernel_cosine_gap"] = max(cosine_gap, kernel_gap)
        if max(cosine_gap, kernel_gap) > tols.kernel_cosine:
            failures.append("kernel-mismatch")

    return Certificate(
        cc_residual=None,
        dziobek_residual=dz,
        kappa=kappa,
        rank1_residual=r1,
        veronese_residual=ver,
        degeneracy_index=deg,
        affine_dim=achieved,
        isolated=None,
        accepted=not failures,
        failures=tuple(failures),
        tolerances_used=asdict(tols),
        details=details,
    )


def certified_classes(classes, m, a, tols: CertifyTolerances | None = None):
    """Attach a full certificate to each class representative."""
    return [
        replace(cl, certificate=certify(cl.representative.x, m, a, tols))
        for cl in classes
    ]
