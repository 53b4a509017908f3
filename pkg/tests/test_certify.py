import numpy as np
import pytest

from dziobek.algebra import (
    configuration_matrix,
    kernel_by_minors,
    shape_from_distances,
)
from dziobek.certify import (
    CertifyTolerances,
    certified_classes,
    certify,
    certify_shape,
)
from dziobek.geometry import distance_matrix
from dziobek.model import (
    DziobekVector,
    NonPositiveShape,
    ShapeMatrix,
    WrongDimension,
)
from dziobek.solver import (
    SolveOptions,
    dedup_classes,
    euler_collinear_configurations,
    multistart_solve,
)

EXACT_TRIANGLE = np.array(
    [
        [0.0, 0.0],
        [0.8638748605920132, 0.5037064871898412],
        [-0.0042851836614168455, 0.9999908185583445],
    ]
)


def euler_fixture(m=(1.0, 2.0, 3.0), a=-1.5, which=0):
    masses = np.array(m)
    cfg = euler_collinear_configurations(masses, a)[which]
    return cfg, masses


def test_tolerances_validation():
    with pytest.raises(ValueError):
        CertifyTolerances(cc=0.0)
    with pytest.raises(ValueError):
        CertifyTolerances(rank1=1.5)


def test_euler_fixture_accepted():
    for a in (-1.5, -1.0):
        for which in range(3):
            cfg, masses = euler_fixture(a=a, which=which)
            cert = certify(cfg.x, masses, a)
            assert cert.accepted, cert.failures
            assert cert.failures == ()
            assert cert.cc_residual < 1e-11
            assert cert.affine_dim == 1
            assert cert.isolated is True
            assert cert.degeneracy_index == 0
            assert cert.kappa != 0.0
            assert cert.dziobek_residual < 1e-10
            assert cert.rank1_residual < 1e-10
            assert cert.veronese_residual < 1e-10
            assert abs(sum(cert.details["delta"])) < 1e-12


def test_wrong_dimension_raises():
    # a planar triangle is not a three-body Dziobek candidate (needs dim 1)
    with pytest.raises(WrongDimension) as exc:
        certify(EXACT_TRIANGLE, np.ones(3), -1.5)
    assert exc.value.measured == 2
    assert exc.value.expected == 1


def test_perturbed_solution_rejected_with_cc_first():
    cfg, masses = euler_fixture()
    bad = cfg.x.copy()
    bad[1, 0] += 1e-2
    cert = certify(bad, masses, -1.5)
    assert not cert.accepted
    assert cert.failures[0] == "cc-residual"
    assert cert.cc_residual > 1e-3


def test_perturbation_scaling():
    """Residuals decay with the perturbation; tiny defects stay accepted."""
    cfg, masses = euler_fixture()
    levels = []
    for eps in (1e-4, 1e-6, 1e-8, 1e-12):
        bad = cfg.x.copy()
        bad[2, 0] += eps
        cert = certify(bad, masses, -1.5)
        levels.append(cert.cc_residual)
        # the defect amplifies by roughly the Jacobian norm (~20 here)
        if eps >= 1e-8:
            assert not cert.accepted
            assert "cc-residual" in cert.failures
        else:
            assert cert.accepted
    assert levels == sorted(levels, reverse=True)


def test_certify_idempotent():
    cfg, masses = euler_fixture()
    c1 = certify(cfg.x, masses, -1.5)
    c2 = certify(cfg.x, masses, -1.5)
    assert c1.to_dict() == c2.to_dict()


def test_certify_shape_round_trip():
    """A shape extracted from an accepted candidate certifies on its own."""
    cfg, masses = euler_fixture()
    full = certify(cfg.x, masses, -1.5)
    s = shape_from_distances(distance_matrix(cfg.x), -1.5)
    delta = kernel_by_minors(configuration_matrix(cfg.x))
    part = certify_shape(s, masses, delta, -1.5)
    assert part.accepted, part.failures
    assert part.cc_residual is None
    assert part.isolated is None
    assert part.affine_dim == 1
    assert part.kappa == pytest.approx(full.kappa, rel=1e-10)
    assert part.dziobek_residual == pytest.approx(full.dziobek_residual, abs=1e-12)
    assert part.details["spectral_tail"] < 1e-12
    assert part.details["kernel_cosine_gap"] < 1e-10


def test_certify_shape_zero_shape_rejected():
    s = ShapeMatrix(np.zeros((3, 3)))
    delta = DziobekVector(np.array([1.0, -2.0, 1.0]) / np.sqrt(6.0))
    cert = certify_shape(s, np.ones(3), delta, -1.5)
    assert not cert.accepted
    assert "kappa-zero" in cert.failures
    assert cert.kappa == 0.0


def test_certify_shape_non_positive_propagates():
    s = np.zeros((3, 3))
    s[0, 1] = s[1, 0] = -1.0
    delta = DziobekVector(np.array([1.0, -2.0, 1.0]) / np.sqrt(6.0))
    with pytest.raises(NonPositiveShape):
        certify_shape(ShapeMatrix(s), np.ones(3), delta, -1.5)


def test_certify_shape_not_embeddable():
    # distances (1, 1, 10) violate the triangle inequality
    d = np.array([[0.0, 1.0, 10.0], [1.0, 0.0, 1.0], [10.0, 1.0, 0.0]])
    s = shape_from_distances(d, -1.0)
    delta = DziobekVector(np.array([1.0, -2.0, 1.0]) / np.sqrt(6.0))
    cert = certify_shape(s, np.ones(3), delta, -1.0)
    assert not cert.accepted
    assert "not-embeddable" in cert.failures
    assert cert.affine_dim is None


def test_certify_shape_wrong_delta_flagged():
    cfg, masses = euler_fixture()
    s = shape_from_distances(distance_matrix(cfg.x), -1.5)
    wrong = DziobekVector(np.array([1.0, 0.0, -1.0]) / np.sqrt(2.0))
    cert = certify_shape(s, masses, wrong, -1.5)
    assert not cert.accepted
    assert "kernel-mismatch" in cert.failures


def test_certified_classes_pipeline():
    m = np.array([1.0, 2.0, 3.0])
    cands = multistart_solve(m, -1.5, SolveOptions(starts=200, seed=3))
    classes = certified_classes(dedup_classes(cands, m), m, -1.5)
    assert len(classes) == 3
    for cl in classes:
        assert cl.certificate is not None
        assert cl.certificate.accepted
        assert cl.certificate.isolated


def test_degenerate_solution_accepted_not_isolated():
    """A rank-deficient exact solution passes: isolation is reported only.

    The equal-mass triangle-plus-center at a = -1 carries a genuine rank
    drop in the reduced Jacobian yet satisfies the full algebraic structure.
    """
    from dziobek.experiment import known_solutions

    sols = {label: cfg for cfg, label in known_solutions(4, -1.0)}
    cfg = sols["triangle-center"]
    cert = certify(cfg.x, np.ones(4), -1.0)
    assert cert.accepted, cert.failures
    assert cert.isolated is False
    assert cert.details["isolation_ratio"] < 1e-10
    assert cert.cc_residual < 1e-9


def test_custom_tolerances_recorded():
    cfg, masses = euler_fixture()
    tols = CertifyTolerances(cc=1e-3)
    cert = certify(cfg.x, masses, -1.5, tols)
    assert cert.tolerances_used["cc"] == 1e-3
