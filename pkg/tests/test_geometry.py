import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from actr.geometry import (
    AABB,
    CameraModel,
    RigidTransform,
    SphericalPose,
    angle_to_block,
    pose_to_transform,
    ray_aabb_intersect,
)

from conftest import sampled_box_hit

UNIT_BOX = AABB(np.array([-1.0, -1.0, -1.0]), np.array([1.0, 1.0, 1.0]))


class TestSphericalPose:
    def test_canonical_position(self):
        pose = SphericalPose(0.0, 0.0, 1.0)
        np.testing.assert_allclose(pose.position(), [1.0, 0.0, 0.0], atol=1e-15)

    def test_invalid_radius(self):
        with pytest.raises(ValueError):
            SphericalPose(0.0, 0.0, 0.0)

    def test_invalid_elevation(self):
        with pytest.raises(ValueError):
            SphericalPose(0.0, 95.0, 1.0)


class TestPoseToTransform:
    def test_origin_maps_to_forward_axis(self):
        t = pose_to_transform(SphericalPose(0.0, 0.0, 1.0))
        np.testing.assert_allclose(t.apply(np.zeros(3)), [0.0, 0.0, 1.0], atol=1e-12)

    def test_opposite_azimuth_reflects_position(self):
        r = 2.3
        p0 = SphericalPose(0.0, 0.0, r).position()
        p180 = SphericalPose(180.0, 0.0, r).position()
        np.testing.assert_allclose(p180, -p0, atol=1e-12)

    def test_orthonormal_and_distance_preserving(self):
        t = pose_to_transform(SphericalPose(37.0, 22.0, 1.9))
        r = t.rotation
        assert np.max(np.abs(r @ r.T - np.eye(3))) < 1e-9
        assert abs(np.linalg.det(r) - 1.0) < 1e-9
        assert abs(np.linalg.norm(t.apply(np.zeros(3))) - 1.9) < 1e-9

    @settings(max_examples=60, deadline=None)
    @given(
        az=st.floats(0, 360),
        el=st.floats(-90, 90),
        r=st.floats(0.1, 50.0),
    )
    def test_rotation_properties_everywhere(self, az, el, r):
        t = pose_to_transform(SphericalPose(az, el, r))
        assert np.max(np.abs(t.rotation @ t.rotation.T - np.eye(3))) < 1e-9
        assert abs(np.linalg.det(t.rotation) - 1.0) < 1e-9
        origin_cam = t.apply(np.zeros(3))
        assert abs(np.linalg.norm(origin_cam) - r) < 1e-9 * max(1.0, r)
        # the origin sits straight ahead on the camera forward axis
        np.testing.assert_allclose(origin_cam[:2], [0.0, 0.0], atol=1e-9 * max(1.0, r))

    def test_rigid_transform_rejects_sheared_rotation(self):
        bad = np.eye(3)
        bad[0, 1] = 1e-6
        with pytest.raises(ValueError):
            RigidTransform(rotation=bad, translation=np.zeros(3))


class TestRayAabb:
    def test_segment_through_cube_center(self):
        assert ray_aabb_intersect(np.array([10.0, 0, 0]), np.zeros(3), UNIT_BOX)

    def test_segment_ends_before_box(self):
        assert not ray_aabb_intersect(
            np.array([10.0, 10, 10]), np.array([9.0, 9, 9]), UNIT_BOX
        )

    def test_target_on_face_of_box_beyond_is_not_occlusion(self):
        # box strictly beyond the target endpoint, touching it at one face
        box = AABB(np.array([-1.0, -1, -1]), np.array([0.0, 1, 1]))
        assert not ray_aabb_intersect(np.array([5.0, 0, 0]), np.zeros(3), box)

    def test_identical_endpoints_rejected(self):
        with pytest.raises(ValueError):
            ray_aabb_intersect(np.ones(3), np.ones(3), UNIT_BOX)

    def test_matches_dense_sampling_oracle(self, rng):
        disagreements = []
        for _ in range(1000):
            origin = rng.uniform(-3, 3, 3)
            target = rng.uniform(-3, 3, 3)
            if np.allclose(origin, target):
                continue
            lo = rng.uniform(-2, 1, 3)
            hi = lo + rng.uniform(0.1, 2.0, 3)
            box = AABB(lo, hi)
            got = ray_aabb_intersect(origin, target, box)
            expected = sampled_box_hit(origin, target, lo, hi, n=10000)
            if got != expected:
                # tolerate only decisions that flip within 1e-6 of the boundary
                grown = ray_aabb_intersect(origin, target, AABB(lo - 1e-6, hi + 1e-6))
                shrunk = ray_aabb_intersect(origin, target, AABB(lo + 1e-6, hi - 1e-6))
                if grown == shrunk:
                    disagreements.append((origin, target, lo, hi))
        assert not disagreements

    @settings(max_examples=80, deadline=None)
    @given(data=st.data())
    def test_symmetric_when_endpoints_outside(self, data):
        f = st.floats(-4, 4)
        origin = np.array([data.draw(f), data.draw(f), data.draw(f)])
        target = np.array([data.draw(f), data.draw(f), data.draw(f)])
        if np.allclose(origin, target):
            return
        box = UNIT_BOX
        if np.all(np.abs(origin) <= 1.0) or np.all(np.abs(target) <= 1.0):
            return
        assert ray_aabb_intersect(origin, target, box) == ray_aabb_intersect(
            target, origin, box
        )

    def test_aabb_rejects_inverted_corners(self):
        with pytest.raises(ValueError):
            AABB(np.array([1.0, 0, 0]), np.array([0.0, 1, 1]))


class TestAngleToBlock:
    def test_block_at_origin_is_straight_ahead(self):
        assert angle_to_block(SphericalPose(12.0, 34.0, 2.0), np.zeros(3)) < 1e-12

    def test_block_behind_camera(self):
        pose = SphericalPose(0.0, 0.0, 2.0)
        behind = pose.position() * 2.0
        assert abs(angle_to_block(pose, behind) - 180.0) < 1e-9

    def test_matches_dot_product_oracle(self):
        pose = SphericalPose(0.0, 30.0, 2.0)
        block = np.array([0.3, 0.1, -0.2])
        eye = pose.position()
        forward = -eye / np.linalg.norm(eye)
        v = block - eye
        expected = math.degrees(math.acos(forward @ v / np.linalg.norm(v)))
        assert abs(angle_to_block(pose, block) - expected) < 1e-9

    def test_point_between_camera_and_origin_is_on_axis(self):
        pose = SphericalPose(77.0, -12.0, 3.0)
        for lam in (0.2, 0.5, 0.9):
            point = pose.position() * lam
            assert angle_to_block(pose, point) < 1e-6


class TestCameraModel:
    def test_fov_limits(self):
        cam = CameraModel(fov_deg=33.8)
        assert cam.fov_limit_deg("half") == pytest.approx(16.9)
        assert cam.fov_limit_deg("full") == pytest.approx(33.8)

    def test_rejects_bad_fov(self):
        with pytest.raises(ValueError):
            CameraModel(fov_deg=180.0)
        with pytest.raises(ValueError):
            CameraModel(fov_deg=0.0)
