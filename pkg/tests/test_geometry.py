"""Tests for structuring elements, volumes, and parametrization links."""

import math

import numpy as np
import numpy.testing as npt
import pytest

from aniso3d.geometry import (
    ConeParams,
    CylinderParams,
    Z_AXIS,
    cone_contains,
    cone_volume,
    cylinder_contains,
    cylinder_volume,
    direction_set,
    equal_shape_link,
    equal_volume_link,
)

THETA_A2 = 0.4636476  # half apex angle matching aspect ratio 2


def random_rotation(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    return q * np.sign(np.diag(r))


def mc_cone_volume(cone, n, rng):
    """Hit-rate volume estimate from uniform samples in the bounding ball."""
    ball_volume = 4.0 * math.pi * cone.r_cn**3 / 3.0
    hits = 0
    total = 0
    while total < n:
        v = rng.uniform(-cone.r_cn, cone.r_cn, (2 * n, 3))
        v = v[np.sum(v * v, axis=1) <= cone.r_cn**2][: n - total]
        hits += int(np.count_nonzero(cone_contains(cone, Z_AXIS, v)))
        total += len(v)
    p = hits / n
    return p * ball_volume, ball_volume * math.sqrt(p * (1 - p) / n)


def mc_cylinder_volume(cyl, n, rng):
    """Hit-rate volume estimate from uniform samples in the circumscribed box."""
    box_volume = (2 * cyl.r_cl) ** 2 * 2 * cyl.h
    v = np.column_stack(
        [
            rng.uniform(-cyl.r_cl, cyl.r_cl, n),
            rng.uniform(-cyl.r_cl, cyl.r_cl, n),
            rng.uniform(-cyl.h, cyl.h, n),
        ]
    )
    p = np.count_nonzero(cylinder_contains(cyl, Z_AXIS, v)) / n
    return p * box_volume, box_volume * math.sqrt(p * (1 - p) / n)


class TestConeMembership:
    def test_full_ball_contains_orthogonal(self):
        assert cone_contains(ConeParams(1.0, math.pi / 2), Z_AXIS, [0.5, 0.0, 0.0])

    def test_axial_point_inside(self):
        assert cone_contains(ConeParams(1.0, THETA_A2), Z_AXIS, [0.0, 0.0, 0.9])

    def test_orthogonal_point_outside(self):
        assert not cone_contains(ConeParams(1.0, THETA_A2), Z_AXIS, [0.9, 0.0, 0.0])

    def test_double_cone_symmetry_example(self):
        assert cone_contains(ConeParams(1.0, THETA_A2), Z_AXIS, [0.0, 0.0, -0.9])

    def test_origin_is_outside(self):
        assert not cone_contains(ConeParams(1.0, THETA_A2), Z_AXIS, [0.0, 0.0, 0.0])

    def test_beyond_slant_height(self):
        assert not cone_contains(ConeParams(1.0, THETA_A2), Z_AXIS, [0.0, 0.0, 1.1])

    def test_symmetry_property(self):
        rng = np.random.default_rng(7)
        cone = ConeParams(1.3, 0.7)
        v = rng.normal(size=(500, 3))
        npt.assert_array_equal(
            cone_contains(cone, Z_AXIS, v), cone_contains(cone, Z_AXIS, -v)
        )

    def test_rotation_equivariance(self):
        rng = np.random.default_rng(8)
        cone = ConeParams(1.0, 0.5)
        v = rng.normal(size=(300, 3)) * 0.6
        for _ in range(5):
            q = random_rotation(rng)
            u = q @ Z_AXIS
            npt.assert_array_equal(
                cone_contains(cone, u, v @ q.T), cone_contains(cone, Z_AXIS, v)
            )

    def test_monotone_in_slant_height(self):
        rng = np.random.default_rng(9)
        v = rng.normal(size=(2000, 3)) * 0.5
        small = cone_contains(ConeParams(0.8, 0.6), Z_AXIS, v)
        large = cone_contains(ConeParams(1.2, 0.6), Z_AXIS, v)
        assert np.all(large[small])


class TestCylinderMembership:
    def test_center_inside(self):
        assert cylinder_contains(CylinderParams(0.5, 1.0), Z_AXIS, [0.0, 0.0, 0.0])

    def test_inside_both_bounds(self):
        assert cylinder_contains(CylinderParams(0.5, 1.0), Z_AXIS, [0.4, 0.0, 0.9])

    def test_radial_bound_exceeded(self):
        assert not cylinder_contains(CylinderParams(0.5, 1.0), Z_AXIS, [0.6, 0.0, 0.0])

    def test_axial_bound_exceeded(self):
        assert not cylinder_contains(CylinderParams(0.5, 1.0), Z_AXIS, [0.0, 0.0, 1.1])

    def test_symmetry_property(self):
        rng = np.random.default_rng(10)
        cyl = CylinderParams(0.5, 1.0)
        v = rng.normal(size=(500, 3))
        npt.assert_array_equal(
            cylinder_contains(cyl, Z_AXIS, v), cylinder_contains(cyl, Z_AXIS, -v)
        )

    def test_rotation_equivariance(self):
        rng = np.random.default_rng(11)
        cyl = CylinderParams(0.4, 0.9)
        v = rng.normal(size=(300, 3)) * 0.6
        for _ in range(5):
            q = random_rotation(rng)
            npt.assert_array_equal(
                cylinder_contains(cyl, q @ Z_AXIS, v @ q.T),
                cylinder_contains(cyl, Z_AXIS, v),
            )

    def test_monotone_in_size(self):
        rng = np.random.default_rng(12)
        v = rng.normal(size=(2000, 3)) * 0.7
        small = cylinder_contains(CylinderParams(0.3, 0.6), Z_AXIS, v)
        large = cylinder_contains(CylinderParams(0.5, 1.0), Z_AXIS, v)
        assert np.all(large[small])


class TestVolumes:
    def test_ball_limit_exact(self):
        for r in (0.3, 1.0, 2.5):
            assert cone_volume(ConeParams(r, math.pi / 2)) == 4.0 / 3.0 * math.pi * r**3

    def test_cone_closed_form(self):
        # double cone volume collapses to (4 pi / 3) r^3 (1 - cos theta)
        for r, theta in ((1.0, THETA_A2), (0.7, 1.1), (2.0, 0.3)):
            expected = 4.0 * math.pi * r**3 * (1.0 - math.cos(theta)) / 3.0
            assert cone_volume(ConeParams(r, theta)) == pytest.approx(expected, rel=1e-13)

    def test_cubic_scaling(self):
        assert cone_volume(ConeParams(2.0, THETA_A2)) == pytest.approx(
            8.0 * cone_volume(ConeParams(1.0, THETA_A2)), rel=1e-13
        )

    def test_cylinder_values(self):
        assert cylinder_volume(CylinderParams(1.0, 1.0)) == pytest.approx(2 * math.pi)
        assert cylinder_volume(CylinderParams(0.5, 2.0)) == pytest.approx(math.pi)

    def test_cone_against_hit_rate(self):
        rng = np.random.default_rng(100)
        est, se = mc_cone_volume(ConeParams(1.0, THETA_A2), 200_000, rng)
        assert abs(est - cone_volume(ConeParams(1.0, THETA_A2))) < 3 * se

    def test_cylinder_against_hit_rate(self):
        rng = np.random.default_rng(101)
        est, se = mc_cylinder_volume(CylinderParams(1.0, 1.0), 200_000, rng)
        assert abs(est - cylinder_volume(CylinderParams(1.0, 1.0))) < 3 * se


class TestEqualVolumeLink:
    def test_round_trip(self):
        # build a cylinder matching a known cone volume; solving must recover it
        cone = ConeParams(1.4, 0.9)
        h_cn = 1.4 * math.cos(0.9)
        volume = cone_volume(cone)
        cyl = CylinderParams(0.8, volume / (2 * math.pi * 0.8**2))
        solved = equal_volume_link(cyl, h_cn)
        assert solved.r_cn == pytest.approx(cone.r_cn, rel=1e-12)
        assert solved.theta == pytest.approx(cone.theta, rel=1e-12)

    def test_volume_match_property(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            cyl = CylinderParams(rng.uniform(0.01, 2.0), rng.uniform(0.01, 3.0))
            h_cn = rng.uniform(0.005, 2.0)
            cone = equal_volume_link(cyl, h_cn)
            v_cl = cylinder_volume(cyl)
            assert abs(cone_volume(cone) - v_cl) / v_cl < 1e-10
            assert cone.r_cn > h_cn

    def test_small_half_height_opens_to_ball(self):
        cyl = CylinderParams(1.0, 1.0)
        cone = equal_volume_link(cyl, 1e-9)
        ball_r = (cylinder_volume(cyl) * 3 / (4 * math.pi)) ** (1 / 3)
        assert cone.r_cn == pytest.approx(ball_r, rel=1e-6)
        assert cone.theta == pytest.approx(math.pi / 2, abs=1e-6)

    def test_rejects_bad_half_height(self):
        with pytest.raises(ValueError, match="positive"):
            equal_volume_link(CylinderParams(1.0, 1.0), 0.0)


class TestEqualShapeLink:
    def test_reference_values(self):
        cyl, cone = equal_shape_link(1.0, 2.0)
        assert cyl.h == 2.0
        assert cone.r_cn == pytest.approx(math.sqrt(5.0), rel=1e-15)
        assert abs(cone.theta - THETA_A2) < 1e-7

    def test_linear_scaling(self):
        cyl, cone = equal_shape_link(0.05, 2.0)
        assert cyl.h == pytest.approx(0.1, rel=1e-15)
        assert cone.r_cn == pytest.approx(0.05 * math.sqrt(5.0), rel=1e-15)

    def test_slant_identity(self):
        rng = np.random.default_rng(14)
        for _ in range(50):
            r_cl = rng.uniform(0.01, 5.0)
            a = rng.uniform(1.01, 6.0)
            cyl, cone = equal_shape_link(r_cl, a)
            assert abs(cone.r_cn**2 - cyl.h**2 - cyl.r_cl**2) < 1e-12 * cone.r_cn**2

    def test_conical_part_inside_cylinder(self):
        # within the shared half height the cone stays inside the cylinder;
        # only its spherical caps protrude through the flat faces
        rng = np.random.default_rng(15)
        cyl, cone = equal_shape_link(1.0, 2.0)
        v = rng.normal(size=(20000, 3))
        v *= (cone.r_cn * rng.random(len(v)) ** (1 / 3) / np.linalg.norm(v, axis=1))[:, None]
        in_cone = cone_contains(cone, Z_AXIS, v)
        below_cap = np.abs(v[:, 2]) <= cyl.h
        inside = cylinder_contains(cyl, Z_AXIS, v)
        assert np.all(inside[in_cone & below_cap])

    def test_cap_protrudes_axially(self):
        cyl, cone = equal_shape_link(1.0, 2.0)
        tip = np.array([0.0, 0.0, 0.99 * cone.r_cn])
        assert cone_contains(cone, Z_AXIS, tip)
        assert not cylinder_contains(cyl, Z_AXIS, tip)

    def test_rejects_flat_aspect(self):
        with pytest.raises(ValueError, match="aspect"):
            equal_shape_link(1.0, 1.0)


class TestDirectionSet:
    def test_three_is_coordinate_axes(self):
        npt.assert_array_equal(direction_set(3), np.eye(3))

    def test_single_direction(self):
        npt.assert_array_equal(direction_set(1), [[0.0, 0.0, 1.0]])

    def test_spiral_unit_and_distinct(self):
        us = direction_set(100)
        assert us.shape == (100, 3)
        npt.assert_allclose(np.linalg.norm(us, axis=1), 1.0, atol=1e-12)
        assert np.unique(np.round(us, 9), axis=0).shape[0] == 100

    def test_spiral_spreads(self):
        us = direction_set(64)
        dots = us @ us.T
        np.fill_diagonal(dots, -1.0)
        # nearest neighbours should not be nearly coincident
        assert dots.max() < 0.999

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            direction_set(0)
