from __future__ import annotations

import math
import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from workcell.robot import (
    JointLimit,
    Pose,
    Unreachable,
    fk,
    geometric_jacobian,
    ik,
    orientation_error,
    rotation_exp,
    rotation_log,
)


def oracle_fk(model, joints):
    """Independent forward chain: build each 4x4 longhand and multiply."""
    t = np.eye(4)
    for jdef, theta in zip(model.joints, joints):
        ct, st_ = math.cos(theta), math.sin(theta)
        ca, sa = math.cos(jdef.alpha), math.sin(jdef.alpha)
        rot_z = np.array([[ct, -st_, 0, 0], [st_, ct, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
        trans_z = np.eye(4)
        trans_z[2, 3] = jdef.d
        trans_x = np.eye(4)
        trans_x[0, 3] = jdef.a
        rot_x = np.array([[1, 0, 0, 0], [0, ca, -sa, 0], [0, sa, ca, 0], [0, 0, 0, 1]])
        t = t @ rot_z @ trans_z @ trans_x @ rot_x
    return t


class TestFk:
    def test_home_pose_matches_oracle(self, model):
        pose = fk(model, np.zeros(6))
        expected = oracle_fk(model, np.zeros(6))
        np.testing.assert_allclose(pose.position, expected[:3, 3], atol=1e-12)
        np.testing.assert_allclose(pose.rotation, expected[:3, :3], atol=1e-12)

    def test_home_pose_frozen_values(self, model):
        # oracle-computed for the shipped table: tool straight down at full
        # stretch, x = a1 + a2 + a3 = 0.34, z = -d6
        pose = fk(model, np.zeros(6))
        np.testing.assert_allclose(pose.position, [0.34, 0.0, -0.07], atol=1e-12)
        np.testing.assert_allclose(pose.rotation, np.diag([1.0, -1.0, -1.0]), atol=1e-12)

    def test_matches_oracle_on_random_joints(self, model):
        rng = np.random.default_rng(7)
        lo, hi = np.array(model.limits_min), np.array(model.limits_max)
        for _ in range(50):
            q = rng.uniform(lo, hi)
            pose = fk(model, q)
            expected = oracle_fk(model, q)
            np.testing.assert_allclose(pose.position, expected[:3, 3], atol=1e-12)
            np.testing.assert_allclose(pose.rotation, expected[:3, :3], atol=1e-12)

    def test_base_rotation_rotates_tcp_about_z(self, model):
        home = fk(model, np.zeros(6))
        rotated = fk(model, [math.pi / 2, 0, 0, 0, 0, 0])
        rz = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        np.testing.assert_allclose(rotated.position, rz @ home.position, atol=1e-12)
        np.testing.assert_allclose(rotated.rotation, rz @ home.rotation, atol=1e-12)

    def test_rotation_is_orthonormal(self, model):
        rng = np.random.default_rng(11)
        lo, hi = np.array(model.limits_min), np.array(model.limits_max)
        for _ in range(20):
            r = fk(model, rng.uniform(lo, hi)).rotation
            np.testing.assert_allclose(r @ r.T, np.eye(3), atol=1e-12)
            assert np.linalg.det(r) == pytest.approx(1.0)

    def test_joint_limit_rejected(self, model):
        joints = np.zeros(6)
        joints[2] = model.joints[2].limit_max + 0.1
        with pytest.raises(JointLimit):
            fk(model, joints)


class TestRotations:
    @given(st.lists(st.floats(-3.0, 3.0), min_size=3, max_size=3))
    def test_exp_log_round_trip(self, vec):
        v = np.array(vec)
        angle = np.linalg.norm(v)
        if angle >= math.pi:  # log maps into the principal ball
            return
        np.testing.assert_allclose(rotation_log(rotation_exp(v)), v, atol=1e-9)

    def test_near_pi_axis_recovery(self):
        for axis in (np.array([1.0, 0, 0]), np.array([0, 1.0, 0]),
                     np.array([0.6, 0.0, 0.8])):
            v = axis * (math.pi - 1e-9)
            back = rotation_log(rotation_exp(v))
            np.testing.assert_allclose(back, v, atol=1e-6)

    def test_identity_is_zero(self):
        np.testing.assert_array_equal(rotation_log(np.eye(3)), np.zeros(3))


class TestJacobian:
    def test_matches_finite_differences(self, model):
        rng = np.random.default_rng(23)
        q = rng.uniform(-1.0, 1.0, 6)
        jac = geometric_jacobian(model, q)
        eps = 1e-7
        base = fk(model, q)
        for i in range(6):
            dq = q.copy()
            dq[i] += eps
            bumped = fk(model, dq)
            dpos = (bumped.position - base.position) / eps
            drot = orientation_error(bumped.rotation, base.rotation) / eps
            np.testing.assert_allclose(jac[:3, i], dpos, atol=1e-5)
            np.testing.assert_allclose(jac[3:, i], drot, atol=1e-5)


class TestIk:
    def test_fixed_point_returns_seed(self, model):
        seed = np.array([0.2, 0.4, -0.3, 0.1, -0.6, 0.5])
        target = fk(model, seed)
        solution = ik(model, target, seed)
        np.testing.assert_allclose(solution, seed, atol=1e-6)

    def test_round_trip_100_random_reachable_poses(self, model):
        rng = np.random.default_rng(2024)
        lo, hi = np.array(model.limits_min), np.array(model.limits_max)
        neutral = np.array([0.0, 0.5, -0.5, 0.0, -0.5, 0.0])
        start = time.monotonic()
        for _ in range(100):
            target = fk(model, rng.uniform(lo, hi))
            solution = ik(model, target, neutral)
            reached = fk(model, solution)
            assert np.linalg.norm(reached.position - target.position) <= 1e-4
            assert np.linalg.norm(
                orientation_error(target.rotation, reached.rotation)
            ) <= 1e-3
        assert time.monotonic() - start < 5.0

    def test_target_beyond_reach(self, model):
        target = Pose(position=[2 * model.reach_m, 0.0, 0.0], rotation=np.eye(3))
        with pytest.raises(Unreachable):
            ik(model, target, np.zeros(6))

    def test_solution_respects_limits(self, model):
        rng = np.random.default_rng(99)
        lo, hi = np.array(model.limits_min), np.array(model.limits_max)
        for _ in range(20):
            target = fk(model, rng.uniform(lo, hi))
            solution = ik(model, target, np.zeros(6))
            assert model.within_limits(solution)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_round_trip_property(self, model, seed):
        rng = np.random.default_rng(seed)
        lo, hi = np.array(model.limits_min), np.array(model.limits_max)
        target = fk(model, rng.uniform(lo, hi))
        solution = ik(model, target, np.array([0.0, 0.5, -0.5, 0.0, -0.5, 0.0]))
        reached = fk(model, solution)
        assert np.linalg.norm(reached.position - target.position) <= 1e-4
