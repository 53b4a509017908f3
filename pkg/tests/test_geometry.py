import math

import numpy as np
import pytest

from dziobek.geometry import (
    affine_dimension,
    cayley_menger_det,
    center_of_mass,
    distance_matrix,
    distances_from_shape,
    gauge_normalize,
    realize_from_distances,
)
from dziobek.model import (
    Configuration,
    NonPositiveShape,
    NotEmbeddable,
    ShapeMatrix,
)


def test_center_of_mass():
    x = np.array([[0.0, 0.0], [2.0, 0.0]])
    com = center_of_mass(x, np.array([1.0, 3.0]))
    assert com == pytest.approx([1.5, 0.0], abs=0.0)


def test_distance_matrix_values():
    x = np.array([[0.0, 0.0], [3.0, 4.0], [0.0, 4.0]])
    d = distance_matrix(x).d
    assert d[0, 1] == 5.0
    assert d[0, 2] == 4.0
    assert d[1, 2] == 3.0
    assert np.all(d == d.T)


def test_affine_dimension():
    rng = np.random.default_rng(0)
    line = np.outer(np.arange(4.0), np.array([1.0, 2.0, -1.0]))
    assert affine_dimension(line) == 1
    assert affine_dimension(line + rng.normal(scale=1e-12, size=line.shape)) == 1
    square = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    assert affine_dimension(square) == 2
    assert affine_dimension(np.array([[5.0, 5.0]])) == 0


def test_cayley_menger_unit_triangle():
    # unit equilateral triangle: det = -3, and det = -16 Area^2 at area sqrt(3)/4
    d = np.ones((3, 3)) - np.eye(3)
    det = cayley_menger_det(d)
    assert det == pytest.approx(-3.0, rel=1e-12)
    area = math.sqrt(3.0) / 4.0
    assert det == pytest.approx(-16.0 * area**2, rel=1e-12)


def test_cayley_menger_subset():
    x = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3) / 2], [10.0, 10.0]])
    d = distance_matrix(x).d
    assert cayley_menger_det(d, subset=(0, 1, 2)) == pytest.approx(-3.0, rel=1e-9)
    # degenerate subset: three collinear points have zero volume
    y = np.array([[0.0], [1.0], [2.0]])
    dy = distance_matrix(y).d
    assert abs(cayley_menger_det(dy)) < 1e-12
    with pytest.raises(ValueError):
        cayley_menger_det(d, subset=(2,))


def test_realization_round_trip():
    """distances -> realize -> distances is the identity for generic configs."""
    rng = np.random.default_rng(5)
    for trial in range(100):
        n = 3 + trial % 4
        dim = n - 2
        coords = rng.uniform(-1.0, 1.0, size=(n, dim))
        d = distance_matrix(coords)
        res = realize_from_distances(d, dim)
        assert res.achieved_dim == dim
        assert res.spectral_tail < 1e-12
        d2 = distance_matrix(res.configuration.x).d
        assert np.max(np.abs(d2 - d.d)) < 1e-10


def test_realize_rejects_triangle_violation():
    d = np.array([[0.0, 1.0, 10.0], [1.0, 0.0, 1.0], [10.0, 1.0, 0.0]])
    with pytest.raises(NotEmbeddable):
        realize_from_distances(d, 2)


def test_realize_flags_forced_dimension_drop():
    # a planar square realized on a line keeps a large spectral tail
    sq = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    res = realize_from_distances(distance_matrix(sq), 1)
    assert res.achieved_dim == 2
    assert res.spectral_tail > 0.1


def test_gauge_normalize_idempotent():
    rng = np.random.default_rng(9)
    for _ in range(50):
        coords = rng.uniform(-1.0, 1.0, size=(5, 3))
        g1 = gauge_normalize(coords)
        g2 = gauge_normalize(g1.x)
        assert np.array_equal(g1.x, g2.x)  # exact fixed point
        assert g1.x[0] == pytest.approx([0.0, 0.0, 0.0], abs=0.0)
        # echelon frame: strict upper triangle of the frame rows is zero
        assert g1.x[1, 1] == 0.0 and g1.x[1, 2] == 0.0
        assert g1.x[2, 2] == 0.0
        assert g1.x[1, 0] > 0.0 and g1.x[2, 1] > 0.0 and g1.x[3, 2] > 0.0


def test_gauge_preserves_distances():
    rng = np.random.default_rng(13)
    coords = rng.uniform(-1.0, 1.0, size=(6, 4))
    gauged = gauge_normalize(coords)
    before = distance_matrix(coords).d
    after = distance_matrix(gauged.x).d
    assert np.max(np.abs(before - after)) < 1e-12


def test_gauge_target_dim_mismatch():
    tri = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 0.8]])
    with pytest.raises(ValueError):
        gauge_normalize(tri, target_dim=1)
    # collinear data in a wide ambient space truncates cleanly
    flat = np.array([[0.0, 0.0], [1.0, 1e-12], [2.0, 0.0]])
    out = gauge_normalize(flat, target_dim=1)
    assert out.x.shape == (3, 1)


def test_gauge_accepts_configuration():
    cfg = Configuration(np.array([[0.0, 0.0], [1.0, 0.0], [0.3, 0.7]]))
    out = gauge_normalize(cfg)
    assert isinstance(out, Configuration)


def test_distances_from_shape_round_trip():
    rng = np.random.default_rng(21)
    for a in (-1.5, -1.0, -0.5):
        coords = rng.uniform(-1.0, 1.0, size=(4, 2))
        d = distance_matrix(coords).d
        powered = d.copy()
        np.fill_diagonal(powered, 1.0)
        s = powered ** (2 * a) - 1.0
        np.fill_diagonal(s, 0.0)
        back = distances_from_shape(ShapeMatrix(s), a).d
        assert np.max(np.abs(back - d)) < 1e-12


def test_distances_from_shape_non_positive():
    s = np.zeros((3, 3))
    s[0, 1] = s[1, 0] = -1.0  # 1 + s_ij = 0 has no finite distance
    with pytest.raises(NonPositiveShape):
        distances_from_shape(ShapeMatrix(s), -1.0)
