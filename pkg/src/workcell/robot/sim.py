"""Discrete-time kinematic simulation of the arm plus gripper.

Time is an integer tick counter.  Every instruction consumes at least
one tick; motion advances each joint toward its target at most
``max_speed`` radians per tick, so traces are exactly reproducible:
a run interrupted by a safety stop and resumed later lands on the same
final joints, bit for bit.

No dynamics and no collision geometry: collisions are injected faults,
plus the payload rule (grasping above the payload limit trips a fault
and stops the robot).
"""
from __future__ import annotations

import enum
import json
import os
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from ..vision.scene import Scene
from . import script
from .kinematics import Pose, fk, ik, orientation_error, rotation_exp
from .model import RobotModel

DEFAULT_TICK_BUDGET = 100_000
MOVEL_SEGMENTS = 10


class SafetyViolation(RuntimeError):
    pass


class BadSafetyTransition(RuntimeError):
    pass


class InfiniteLoopGuard(RuntimeError):
    pass


class Safety(str, enum.Enum):
    RUNNING = "Running"
    COLLISION_STOPPED = "CollisionStopped"
    ESTOPPED = "EStopped"


class GripperMode(str, enum.Enum):
    OPEN = "Open"
    CLOSED = "Closed"
    MOVING = "Moving"


@dataclass(frozen=True)
class GripperState:
    aperture: float
    mode: GripperMode
    holding: bool

    def __post_init__(self):
        if self.holding and self.mode is not GripperMode.CLOSED:
            raise ValueError("holding requires a closed gripper")


@dataclass(frozen=True)
class AttachedObject:
    object_id: str
    mass_kg: float


@dataclass(frozen=True)
class RobotState:
    joints: np.ndarray
    tcp: Pose
    gripper: GripperState
    attached: AttachedObject | None
    safety: Safety

    def __post_init__(self):
        object.__setattr__(self, "joints", np.asarray(self.joints, dtype=float).reshape(6))
        if self.attached is not None and not self.gripper.holding:
            raise ValueError("attached object without a holding gripper")


@dataclass(frozen=True)
class TraceEntry:
    tick: int
    state: RobotState
    event: dict | None


Trace = list[TraceEntry]


def home_state(model: RobotModel, joints=None) -> RobotState:
    joints = np.zeros(6) if joints is None else np.asarray(joints, dtype=float)
    return RobotState(
        joints=joints,
        tcp=fk(model, joints),
        gripper=GripperState(aperture=model.gripper.max_open, mode=GripperMode.OPEN, holding=False),
        attached=None,
        safety=Safety.RUNNING,
    )


def inject_collision(state: RobotState) -> RobotState:
    """Collision stop: freezes the robot; no-op unless currently Running."""
    if state.safety is not Safety.RUNNING:
        return state
    return replace(state, safety=Safety.COLLISION_STOPPED)


def estop(state: RobotState) -> RobotState:
    return replace(state, safety=Safety.ESTOPPED)


def restart(state: RobotState) -> RobotState:
    """Leave a stop state; joints stay where they froze."""
    if state.safety is Safety.RUNNING:
        raise BadSafetyTransition("restart while Running")
    return replace(state, safety=Safety.RUNNING)


# ---------------------------------------------------------------------------
# single-instruction stepping

@dataclass
class MotionPlan:
    """Joint-space waypoints computed once when a motion instruction starts."""

    waypoints: list[np.ndarray]
    index: int = 0


@dataclass
class WaitPlan:
    remaining: int


@dataclass
class StepOutcome:
    state: RobotState
    event: dict | None
    progress: object | None
    done: bool


def _plan_movej(model: RobotModel, instr: script.MoveJ) -> MotionPlan:
    target = np.asarray(instr.joints, dtype=float)
    fk(model, target)  # raises JointLimit if the target is out of range
    return MotionPlan(waypoints=[target])


def _plan_movel(model: RobotModel, state: RobotState, instr: script.MoveL) -> MotionPlan:
    start = state.tcp
    target_pos = np.array([instr.x, instr.y, instr.z])
    if instr.orientation is not None:
        target_rot = rotation_exp(np.asarray(instr.orientation))
    else:
        target_rot = start.rotation
    relative = orientation_error(target_rot, start.rotation)
    waypoints = []
    seed = state.joints
    for s in range(1, MOVEL_SEGMENTS + 1):
        frac = s / MOVEL_SEGMENTS
        pos = start.position + frac * (target_pos - start.position)
        rot = rotation_exp(relative * frac) @ start.rotation
        seed = ik(model, Pose(position=pos, rotation=rot), seed)
        waypoints.append(seed)
    return MotionPlan(waypoints=waypoints)


def _advance(model: RobotModel, state: RobotState, plan: MotionPlan,
             scene: Scene) -> tuple[RobotState, bool]:
    target = plan.waypoints[plan.index]
    speeds = np.array([j.max_speed for j in model.joints])
    delta = np.clip(target - state.joints, -speeds, speeds)
    joints = state.joints + delta
    # land exactly on the waypoint once within one tick of it
    arrived = np.abs(target - state.joints) <= speeds
    joints[arrived] = target[arrived]
    new = replace(state, joints=joints, tcp=fk(model, joints))
    if new.attached is not None:
        scene.move(new.attached.object_id, (new.tcp.position[0], new.tcp.position[1]))
    if np.array_equal(joints, target):
        plan.index += 1
        if plan.index >= len(plan.waypoints):
            return new, True
    return new, False


def _close(model: RobotModel, state: RobotState, scene: Scene) -> tuple[RobotState, dict | None]:
    gripper = GripperState(aperture=0.0, mode=GripperMode.CLOSED, holding=state.gripper.holding)
    if state.gripper.holding:
        return replace(state, gripper=gripper), None
    tcp_xy = (state.tcp.position[0], state.tcp.position[1])
    obj = scene.nearest(tcp_xy, model.gripper.grasp_radius)
    if obj is None:
        return replace(state, gripper=gripper), None
    if obj.mass_kg > model.payload_kg:
        event = {
            "type": "payload_fault",
            "object": obj.id,
            "mass_kg": obj.mass_kg,
            "limit_kg": model.payload_kg,
        }
        return replace(state, gripper=gripper, safety=Safety.COLLISION_STOPPED), event
    scene.move(obj.id, tcp_xy)
    held = GripperState(aperture=0.0, mode=GripperMode.CLOSED, holding=True)
    new = replace(state, gripper=held, attached=AttachedObject(obj.id, obj.mass_kg))
    return new, {"type": "grasp", "object": obj.id, "mass_kg": obj.mass_kg}


def _open(model: RobotModel, state: RobotState, scene: Scene) -> tuple[RobotState, dict | None]:
    gripper = GripperState(aperture=model.gripper.max_open, mode=GripperMode.OPEN, holding=False)
    if state.attached is None:
        return replace(state, gripper=gripper), None
    tcp_xy = (float(state.tcp.position[0]), float(state.tcp.position[1]))
    scene.move(state.attached.object_id, tcp_xy)
    event = {"type": "release", "object": state.attached.object_id, "position": list(tcp_xy)}
    return replace(state, gripper=gripper, attached=None), event


_MOTION_OR_GRIP = (script.MoveJ, script.MoveL, script.Open, script.Close)


def step(model: RobotModel, state: RobotState, instruction: script.Instruction,
         scene: Scene, progress: object | None = None) -> StepOutcome:
    """Advance one tick of one instruction.

    ``progress`` threads multi-tick instruction state (motion waypoints,
    remaining wait ticks) between calls; pass the previous outcome's value
    back in, starting from None.  The scene is mutated in place when the
    gripper grasps, releases or drags an attached object.
    """
    if state.safety is not Safety.RUNNING and isinstance(instruction, _MOTION_OR_GRIP):
        raise SafetyViolation(
            f"{type(instruction).__name__} while safety is {state.safety.value}"
        )
    if isinstance(instruction, script.MoveJ):
        plan = progress or _plan_movej(model, instruction)
        new, done = _advance(model, state, plan, scene)
        return StepOutcome(new, None, plan, done)
    if isinstance(instruction, script.MoveL):
        plan = progress or _plan_movel(model, state, instruction)
        new, done = _advance(model, state, plan, scene)
        return StepOutcome(new, None, plan, done)
    if isinstance(instruction, script.Open):
        new, event = _open(model, state, scene)
        return StepOutcome(new, event, None, True)
    if isinstance(instruction, script.Close):
        new, event = _close(model, state, scene)
        return StepOutcome(new, event, None, True)
    if isinstance(instruction, script.Wait):
        plan = progress or WaitPlan(remaining=instruction.ticks)
        plan.remaining -= 1
        return StepOutcome(state, None, plan, plan.remaining <= 0)
    if isinstance(instruction, script.Label):
        return StepOutcome(state, None, None, True)
    if isinstance(instruction, script.Jmp):
        return StepOutcome(state, None, None, True)
    if isinstance(instruction, script.CallWs):
        event = {"type": "ws_call", "endpoint": instruction.endpoint}
        return StepOutcome(state, event, None, True)
    raise TypeError(f"unknown instruction {instruction!r}")


# ---------------------------------------------------------------------------
# program execution

class Interpreter:
    """Tick-by-tick program execution with pause/resume safety semantics.

    While stopped (collision or e-stop) ticks still pass but nothing
    moves; ``restart`` resumes the interrupted instruction exactly where
    it froze.
    """

    def __init__(self, model: RobotModel, program: script.Program, scene: Scene,
                 state: RobotState | None = None, start_tick: int = 0,
                 tick_budget: int = DEFAULT_TICK_BUDGET):
        self.model = model
        self.program = program
        self.scene = scene
        self.state = state if state is not None else home_state(model)
        self.tick_count = start_tick
        self.tick_budget = tick_budget
        self.pc = 0
        self._progress: object | None = None
        self._ticks_used = 0

    @property
    def finished(self) -> bool:
        return self.pc >= len(self.program.instructions)

    def inject_collision(self) -> None:
        self.state = inject_collision(self.state)

    def estop(self) -> None:
        self.state = estop(self.state)

    def restart(self) -> None:
        self.state = restart(self.state)

    def tick(self) -> TraceEntry | None:
        """Execute one tick; None once the program has finished."""
        if self.finished:
            return None
        if self._ticks_used >= self.tick_budget:
            raise InfiniteLoopGuard(f"tick budget {self.tick_budget} exhausted")
        self._ticks_used += 1
        self.tick_count += 1
        if self.state.safety is not Safety.RUNNING:
            return TraceEntry(self.tick_count, self.state, None)
        instruction = self.program.instructions[self.pc]
        outcome = step(self.model, self.state, instruction, self.scene, self._progress)
        self.state = outcome.state
        self._progress = outcome.progress
        if outcome.done:
            self._progress = None
            if isinstance(instruction, script.Jmp):
                self.pc = self.program.labels[instruction.name]
            else:
                self.pc += 1
        return TraceEntry(self.tick_count, self.state, outcome.event)


def run_program(model: RobotModel, state: RobotState, program: script.Program,
                scene: Scene, tick_budget: int = DEFAULT_TICK_BUDGET) -> Trace:
    """Run a parsed program to completion, a safety stop, or an error.

    Returns the tick-level trace; on error the partial trace is attached
    to the exception as ``exc.trace``.
    """
    interp = Interpreter(model, program, scene, state, tick_budget=tick_budget)
    trace: Trace = []
    try:
        while True:
            entry = interp.tick()
            if entry is None:
                break
            trace.append(entry)
            if entry.state.safety is not Safety.RUNNING:
                break
    except Exception as exc:
        exc.trace = trace  # type: ignore[attr-defined]
        raise
    return trace


def trace_record(entry: TraceEntry) -> dict:
    return {
        "tick": entry.tick,
        "joints": [float(v) for v in entry.state.joints],
        "tcp": {
            "position": [float(v) for v in entry.state.tcp.position],
            "rotvec": [float(v) for v in entry.state.tcp.rotvec],
        },
        "safety": entry.state.safety.value,
        "event": entry.event,
    }


def export_trace(trace: Trace, path: str | os.PathLike) -> None:
    """Line-delimited JSON, one record per tick."""
    with Path(path).open("w") as fh:
        for entry in trace:
            fh.write(json.dumps(trace_record(entry)) + "\n")
