import numpy as np
import pytest

from polycontain import geometry
from polycontain.config import override_settings
from polycontain.errors import (DimensionMismatchError, InvalidInputError, UnboundedSetError,
                                UnsupportedConversionError)
from polycontain.geometry import AHPolytope, HPolytope, Zonotope
from polycontain.oracle import contains_point


def test_constructors():
    P = geometry.unit_box(3)
    assert P.dim == 3
    assert P.num_rows == 6
    assert np.allclose(P.h, 1.0)

    Z = Zonotope([1.0, 2.0], [[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])
    assert Z.dim == 2
    assert Z.num_generators == 3
    assert np.isclose(Z.order, 1.5)

    A = AHPolytope([0.0, 0.0, 0.0], np.ones((3, 2)), geometry.unit_box(2))
    assert A.dim == 3
    assert A.latent_dim == 2
    assert not A.is_point

    p = AHPolytope.point([1.0, -1.0])
    assert p.is_point
    assert p.dim == 2

    empty = Zonotope([0.0, 0.0], np.zeros((2, 0)))
    assert empty.num_generators == 0


def test_constructor_errors():
    with pytest.raises(InvalidInputError):
        HPolytope(np.zeros((0, 2)), np.zeros(0))
    with pytest.raises(InvalidInputError):
        HPolytope(np.eye(2), [1.0, 1.0, 1.0])
    with pytest.raises(InvalidInputError):
        HPolytope([[1.0, np.nan]], [1.0])
    with pytest.raises(DimensionMismatchError):
        AHPolytope([0.0, 0.0], np.eye(3), geometry.unit_box(3))
    with pytest.raises(DimensionMismatchError):
        AHPolytope([0.0, 0.0], np.eye(2), geometry.unit_box(3))
    with pytest.raises(DimensionMismatchError):
        Zonotope([0.0, 0.0, 0.0], np.eye(2))
    with pytest.raises(InvalidInputError):
        geometry.unit_box(0)
    with pytest.raises(InvalidInputError):
        geometry.scale(geometry.unit_box(2), -1.0)


def test_kernel_check_only_under_debug():
    H = np.array([[1.0, 0.0], [-1.0, 0.0]])
    HPolytope(H, [1.0, 1.0])
    with override_settings(debug_checks=True):
        with pytest.raises(UnboundedSetError):
            HPolytope(H, [1.0, 1.0])


def test_cross_polytope():
    P = geometry.cross_polytope(2)
    assert P.num_rows == 4
    assert np.isclose(geometry.support(P, [1.0, 0.0])[0], 1.0)
    assert np.isclose(geometry.support(P, [1.0, 1.0])[0], 1.0)


def test_affine_operations_keep_zonotopes():
    Z = Zonotope([1.0, 0.0], np.eye(2))
    mapped = geometry.affine_map(2 * np.eye(2), [0.0, 1.0], Z)
    assert isinstance(mapped, Zonotope)
    assert np.allclose(mapped.center, [2.0, 1.0])
    assert np.allclose(mapped.generator, 2 * np.eye(2))
    assert np.allclose(geometry.translate(Z, [1.0, 1.0]).center, [2.0, 1.0])
    scaled = geometry.scale(Z, 0.5)
    assert np.allclose(scaled.center, Z.center)
    assert np.allclose(scaled.generator, 0.5 * np.eye(2))

    P = geometry.affine_map(np.array([[1.0, 1.0]]), None, geometry.unit_box(2))
    assert isinstance(P, AHPolytope)
    assert P.dim == 1
    assert np.isclose(geometry.support(P, [1.0])[0], 2.0)
    with pytest.raises(DimensionMismatchError):
        geometry.affine_map(np.eye(3), None, Z)


def test_minkowski_sum_support_is_additive(rng):
    Z1 = Zonotope([1.0, 0.0], rng.normal(size=(2, 3)))
    P = geometry.unit_box(2)
    S = geometry.minkowski_sum(Z1, P)
    assert isinstance(S, AHPolytope)
    for _ in range(10):
        c = rng.normal(size=2)
        total = geometry.support(Z1, c)[0] + geometry.support(P, c)[0]
        assert np.isclose(geometry.support(S, c)[0], total)
    Z2 = geometry.minkowski_sum_all([Z1, Z1, Z1])
    assert isinstance(Z2, Zonotope)
    assert Z2.num_generators == 9
    with pytest.raises(InvalidInputError):
        geometry.minkowski_sum_all([])
    with pytest.raises(DimensionMismatchError):
        geometry.minkowski_sum(Z1, geometry.unit_box(3))


def test_intersection_of_offset_boxes():
    box = geometry.unit_box(2)
    shifted = geometry.translate(box, [1.0, 0.5])
    I = geometry.intersect(box, shifted)
    # [0, 1] x [-0.5, 1]
    assert np.isclose(geometry.support(I, [1.0, 0.0])[0], 1.0)
    assert np.isclose(geometry.support(I, [-1.0, 0.0])[0], 0.0)
    assert np.isclose(geometry.support(I, [0.0, -1.0])[0], 0.5)
    assert contains_point(I, [0.5, 0.0])
    assert not contains_point(I, [-0.5, 0.0])


def test_intersection_with_lower_dimensional_set():
    segment = AHPolytope([0.0, 0.0], np.array([[1.0], [0.0]]), geometry.unit_box(1))
    tilted = geometry.affine_map(np.array([[1.0, 0.0], [1.0, 1.0]]), [0.5, 0.0], geometry.unit_box(2))
    I = geometry.intersect(segment, tilted)
    assert np.isclose(geometry.support(I, [1.0, 0.0])[0], 1.0)
    assert np.isclose(geometry.support(I, [-1.0, 0.0])[0], 0.5)
    assert np.isclose(geometry.support(I, [0.0, 1.0])[0], 0.0)


def test_convex_hull_supports_are_maxima(rng):
    parts = [Zonotope(rng.normal(size=2), rng.normal(size=(2, 2))), geometry.unit_box(2),
             AHPolytope.point([3.0, 3.0])]
    hull = geometry.convex_hull_ahrep(parts)
    for _ in range(10):
        c = rng.normal(size=2)
        best = max(geometry.support(p, c)[0] for p in parts)
        assert np.isclose(geometry.support(hull, c)[0], best, atol=1e-7)
    with pytest.raises(InvalidInputError):
        geometry.convex_hull_ahrep([])


def test_block_layout_with_point_parts():
    # points carry a 1 x 0 base; the blocks still line up
    hull = geometry.convex_hull_ahrep([AHPolytope.point([-3.0, 0.0]), geometry.unit_box(2),
                                       AHPolytope.point([3.0, 0.0])])
    assert hull.latent_dim == 2 + 3
    assert hull.base.num_rows == (1 + 4 + 1) + 3 + 2
    assert contains_point(hull, [2.0, 0.25])
    assert not contains_point(hull, [2.0, 1.0])
    stacked = geometry.stack_bases([geometry.unit_box(2), HPolytope(np.zeros((1, 0)), np.ones(1))])
    assert stacked.H.shape == (5, 2)
    assert np.allclose(stacked.h, 1.0)


def test_ah_to_h_conversion():
    A = AHPolytope([1.0, 0.0], np.array([[2.0, 0.0], [0.0, 1.0]]), geometry.unit_box(2))
    P = geometry.ah_to_hpolytope(A)
    for c in ([1.0, 0.0], [0.0, -1.0], [1.0, 1.0]):
        assert np.isclose(geometry.support(P, c)[0], geometry.support(A, c)[0])

    line = AHPolytope([0.0, 0.0], np.array([[1.0], [1.0]]), geometry.unit_box(1))
    P = geometry.ah_to_hpolytope(line)
    assert np.all(P.H @ np.array([0.5, 0.5]) <= P.h + 1e-9)
    assert np.any(P.H @ np.array([0.5, -0.5]) > P.h + 1e-9)

    with pytest.raises(UnsupportedConversionError):
        geometry.ah_to_hpolytope(AHPolytope([0.0], np.array([[1.0, 1.0]]), geometry.unit_box(2)))


def test_zonotope_facets_match_planar_form(ex1):
    Zx = ex1[0]
    planar = geometry.zonotope_to_hpolytope_2d(Zx)
    general = geometry.zonotope_facets(Zx)
    for theta in np.linspace(0.0, 2 * np.pi, 17):
        c = np.array([np.cos(theta), np.sin(theta)])
        assert np.isclose(geometry.support(planar, c)[0], geometry.support(Zx, c)[0])
        assert np.isclose(geometry.support(general, c)[0], geometry.support(Zx, c)[0])


def test_zonotope_facets_in_three_dimensions(ex2):
    Zy = ex2[1]
    P = geometry.zonotope_facets(Zy)
    vertices = Zy.center + np.array(np.meshgrid(*[[-1.0, 1.0]] * Zy.num_generators)).reshape(
        Zy.num_generators, -1).T @ Zy.generator.T
    assert np.all(vertices @ P.H.T <= P.h + 1e-9)
    # every facet is touched by some vertex
    assert np.allclose((vertices @ P.H.T).max(axis=0), P.h)
    with pytest.raises(UnsupportedConversionError):
        geometry.zonotope_facets(Zonotope(np.zeros(3), np.ones((3, 2))))


def test_support_returns_a_maximizer():
    P = geometry.unit_box(2)
    value, x = geometry.support(P, [1.0, 2.0])
    assert np.isclose(value, 3.0)
    assert np.allclose(x, [1.0, 1.0])
    Z = Zonotope([1.0, 1.0], np.eye(2))
    value, x = geometry.support(Z, [-1.0, 0.0])
    assert np.isclose(value, 0.0)
    assert np.isclose(x[0], 0.0)


def test_unbounded_and_empty_sets():
    half_plane = HPolytope([[1.0, 0.0]], [1.0])
    with pytest.raises(UnboundedSetError):
        geometry.support(half_plane, [-1.0, 0.0])
    with pytest.raises(UnboundedSetError):
        geometry.check_bounded(half_plane)
    geometry.check_bounded(geometry.unit_box(2))

    empty = HPolytope([[1.0], [-1.0]], [-1.0, 0.0])
    assert geometry.is_empty(empty)
    assert not geometry.is_empty(geometry.unit_box(1))
    assert not geometry.is_empty(Zonotope([0.0], [[1.0]]))


def test_chebyshev_center():
    c, r = geometry.chebyshev_center(HPolytope(np.vstack([np.eye(2), -np.eye(2)]), [3.0, 1.0, 1.0, 1.0]))
    assert np.isclose(r, 1.0)
    assert np.isclose(c[1], 0.0)
    flat = HPolytope([[0.0, 1.0], [0.0, -1.0], [1.0, 0.0], [-1.0, 0.0]], [0.0, 0.0, 1.0, 1.0])
    assert not geometry.full_dimensional(flat)
    assert geometry.full_dimensional(geometry.unit_box(2))


def test_planar_vertices(ex1):
    Zx = ex1[0]
    poly = geometry.vertices_2d(Zx)
    assert poly.shape[1] == 2
    # counterclockwise
    x, y = poly[:, 0], poly[:, 1]
    assert 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y) > 0
    box = geometry.vertices_2d(geometry.unit_box(2), directions=16)
    assert box.shape == (4, 2)
    assert np.allclose(np.sort(np.abs(box), axis=0), 1.0)
    with pytest.raises(InvalidInputError):
        geometry.vertices_2d(geometry.unit_box(3))


def test_sample_points_are_members(ex1, rng):
    Zx = ex1[0]
    for p in geometry.sample_points(Zx, 20, rng):
        assert contains_point(Zx, p)
    P = geometry.affine_map(np.array([[1.0, 0.5], [0.0, 1.0]]), None, geometry.unit_box(2))
    for p in geometry.sample_points(P, 10, rng):
        assert contains_point(P, p)


def test_to_hpolytope_dispatch(ex1):
    Zx = ex1[0]
    assert isinstance(geometry.to_hpolytope(Zx), HPolytope)
    P = geometry.unit_box(2)
    assert geometry.to_hpolytope(P) is P
