"""Forward and inverse kinematics of the 6-axis arm.

Forward kinematics is the plain product of standard DH transforms.
Inverse kinematics is damped least squares on the 6-D pose error
(position residual stacked on the rotation-vector residual), with a
per-iteration step cap; joint angles are wrapped by 2*pi into their
limits before the limit check, since fk is periodic per joint.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import RobotModel

IK_DAMPING = 0.01
IK_STEP_CAP = 0.2
IK_MAX_ITERATIONS = 500
IK_POS_TOL = 1e-4
IK_ORI_TOL = 1e-3
# error clamping keeps the linearization honest far from the target
IK_POS_ERR_CLAMP = 0.1
IK_ORI_ERR_CLAMP = 0.5


class JointLimit(ValueError):
    pass


class Unreachable(ValueError):
    pass


@dataclass(frozen=True)
class Pose:
    """TCP pose: position in meters and a 3x3 rotation matrix."""

    position: np.ndarray
    rotation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float).reshape(3))
        object.__setattr__(self, "rotation", np.asarray(self.rotation, dtype=float).reshape(3, 3))

    @property
    def rotvec(self) -> np.ndarray:
        return rotation_log(self.rotation)


def dh_transform(a: float, alpha: float, d: float, theta: float) -> np.ndarray:
    """Homogeneous transform of one standard-DH joint row."""
    ct, st = math.cos(theta), math.sin(theta)
    ca, sa = math.cos(alpha), math.sin(alpha)
    return np.array(
        [
            [ct, -st * ca, st * sa, a * ct],
            [st, ct * ca, -ct * sa, a * st],
            [0.0, sa, ca, d],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )


def _chain(model: RobotModel, joints: np.ndarray) -> list[np.ndarray]:
    """Cumulative transforms T_0..T_6 (T_0 = identity)."""
    frames = [np.eye(4)]
    t = np.eye(4)
    for jdef, theta in zip(model.joints, joints):
        t = t @ dh_transform(jdef.a, jdef.alpha, jdef.d, float(theta))
        frames.append(t)
    return frames


def fk(model: RobotModel, joints) -> Pose:
    """TCP pose of a joint vector; raises JointLimit outside the limits."""
    joints = np.asarray(joints, dtype=float).reshape(6)
    if not np.all(np.isfinite(joints)):
        raise ValueError("joint vector contains non-finite values")
    for i, (jdef, q) in enumerate(zip(model.joints, joints)):
        if not jdef.limit_min <= q <= jdef.limit_max:
            raise JointLimit(
                f"joint {i + 1} at {q:.4f} rad outside [{jdef.limit_min}, {jdef.limit_max}]"
            )
    t = _chain(model, joints)[-1]
    return Pose(position=t[:3, 3], rotation=t[:3, :3])


def geometric_jacobian(model: RobotModel, joints: np.ndarray) -> np.ndarray:
    """6x6 Jacobian: rows 0..2 linear velocity, rows 3..5 angular."""
    frames = _chain(model, np.asarray(joints, dtype=float))
    p_end = frames[-1][:3, 3]
    jac = np.zeros((6, 6))
    for i in range(6):
        z = frames[i][:3, 2]
        p = frames[i][:3, 3]
        jac[:3, i] = np.cross(z, p_end - p)
        jac[3:, i] = z
    return jac


def rotation_log(rotation: np.ndarray) -> np.ndarray:
    """Rotation vector (axis * angle) of a rotation matrix."""
    r = np.asarray(rotation, dtype=float)
    cos_angle = (np.trace(r) - 1.0) / 2.0
    angle = math.acos(max(-1.0, min(1.0, cos_angle)))
    if angle < 1e-12:
        return np.zeros(3)
    if math.pi - angle < 1e-6:
        # near pi the skew part vanishes; recover the axis from the diagonal
        axis = np.sqrt(np.maximum(np.diag(r) - cos_angle, 0.0) / (1.0 - cos_angle))
        # fix signs using the largest component as reference
        k = int(np.argmax(axis))
        if axis[k] > 0:
            for j in range(3):
                if j != k and r[k, j] + r[j, k] < 0:
                    axis[j] = -axis[j]
        return axis / np.linalg.norm(axis) * angle
    skew = np.array([r[2, 1] - r[1, 2], r[0, 2] - r[2, 0], r[1, 0] - r[0, 1]])
    return skew / (2.0 * math.sin(angle)) * angle


def rotation_exp(rotvec: np.ndarray) -> np.ndarray:
    """Rotation matrix of a rotation vector (Rodrigues)."""
    v = np.asarray(rotvec, dtype=float).reshape(3)
    angle = float(np.linalg.norm(v))
    if angle < 1e-12:
        return np.eye(3)
    axis = v / angle
    k = np.array(
        [
            [0.0, -axis[2], axis[1]],
            [axis[2], 0.0, -axis[0]],
            [-axis[1], axis[0], 0.0],
        ]
    )
    return np.eye(3) + math.sin(angle) * k + (1.0 - math.cos(angle)) * (k @ k)


def orientation_error(target: np.ndarray, current: np.ndarray) -> np.ndarray:
    """Rotation vector taking ``current`` onto ``target``."""
    return rotation_log(np.asarray(target) @ np.asarray(current).T)


def pose_error(target: Pose, current: Pose) -> np.ndarray:
    return np.concatenate(
        [target.position - current.position, orientation_error(target.rotation, current.rotation)]
    )


def _wrap_into_limits(model: RobotModel, joints: np.ndarray) -> np.ndarray:
    wrapped = joints.copy()
    two_pi = 2.0 * math.pi
    for i, jdef in enumerate(model.joints):
        q = wrapped[i]
        while q > jdef.limit_max and q - two_pi >= jdef.limit_min:
            q -= two_pi
        while q < jdef.limit_min and q + two_pi <= jdef.limit_max:
            q += two_pi
        wrapped[i] = q
    return wrapped


def _fk_unchecked(model: RobotModel, joints: np.ndarray) -> Pose:
    t = _chain(model, joints)[-1]
    return Pose(position=t[:3, 3], rotation=t[:3, :3])


def _dls_solve(model: RobotModel, target: Pose, seed: np.ndarray,
               damping: float, step_cap: float, max_iterations: int,
               pos_tol: float, ori_tol: float) -> np.ndarray:
    q = seed.copy()
    lam_sq = damping * damping
    for _ in range(max_iterations):
        current = _fk_unchecked(model, q)
        err = pose_error(target, current)
        pos_norm = float(np.linalg.norm(err[:3]))
        ori_norm = float(np.linalg.norm(err[3:]))
        if pos_norm <= pos_tol and ori_norm <= ori_tol:
            solution = _wrap_into_limits(model, q)
            if not model.within_limits(solution):
                bad = [
                    i + 1
                    for i, (jdef, v) in enumerate(zip(model.joints, solution))
                    if not jdef.limit_min <= v <= jdef.limit_max
                ]
                raise JointLimit(f"converged solution violates limits at joints {bad}")
            return solution
        if pos_norm > IK_POS_ERR_CLAMP:
            err[:3] *= IK_POS_ERR_CLAMP / pos_norm
        if ori_norm > IK_ORI_ERR_CLAMP:
            err[3:] *= IK_ORI_ERR_CLAMP / ori_norm
        jac = geometric_jacobian(model, q)
        step = jac.T @ np.linalg.solve(jac @ jac.T + lam_sq * np.eye(6), err)
        biggest = float(np.max(np.abs(step)))
        if biggest > step_cap:
            step *= step_cap / biggest
        q += step
    raise Unreachable(f"no convergence within {max_iterations} iterations")


def restart_seeds(model: RobotModel, target: Pose) -> list[np.ndarray]:
    """Deterministic retry seeds covering the main kinematic branches.

    Base joint faces the target azimuth (both windings), combined with
    elbow-up/down and wrist-flip candidates; seeds outside joint 1 limits
    are dropped.
    """
    azimuth = math.atan2(target.position[1], target.position[0])
    j1 = model.joints[0]
    seeds = []
    for base in (azimuth, azimuth + math.pi, azimuth - math.pi):
        if not j1.limit_min <= base <= j1.limit_max:
            continue
        for shoulder in (0.4, 1.4, -0.8):
            for elbow in (-1.2, 0.6, 1.8):
                for wrist in (-1.0, 1.0):
                    seeds.append(np.array([base, shoulder, elbow, 0.0, wrist, 0.0]))
    return seeds


def ik(model: RobotModel, target: Pose, seed,
       damping: float = IK_DAMPING,
       step_cap: float = IK_STEP_CAP,
       max_iterations: int = IK_MAX_ITERATIONS,
       pos_tol: float = IK_POS_TOL,
       ori_tol: float = IK_ORI_TOL,
       restarts: bool = True) -> np.ndarray:
    """Damped-least-squares inverse kinematics from a seed joint vector.

    The caller's seed is tried first; with ``restarts`` on, failures fall
    back to the deterministic branch seeds from :func:`restart_seeds`
    (single-start DLS stalls on a sizable fraction of full-workspace
    poses, so plain usage should leave restarts enabled).

    Raises Unreachable when the target lies outside the reach envelope or
    no attempt meets tolerance within the iteration budget, and JointLimit
    when every converged attempt violates the limits.
    """
    if float(np.linalg.norm(target.position)) > model.reach_m:
        raise Unreachable(
            f"target at {np.linalg.norm(target.position):.3f} m exceeds reach {model.reach_m} m"
        )
    attempts = [np.asarray(seed, dtype=float).reshape(6)]
    if restarts:
        attempts.extend(restart_seeds(model, target))
    failure: Exception | None = None
    for attempt in attempts:
        try:
            return _dls_solve(model, target, attempt, damping, step_cap,
                              max_iterations, pos_tol, ori_tol)
        except (Unreachable, JointLimit) as exc:
            # keep the first failure kind for the error report
            if failure is None or isinstance(failure, Unreachable):
                failure = exc
    assert failure is not None
    raise failure
