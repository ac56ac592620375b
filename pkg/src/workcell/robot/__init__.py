"""Simulated 6-axis arm: kinematics, motion scripts, safety semantics."""

from .kinematics import (
    JointLimit,
    Pose,
    Unreachable,
    dh_transform,
    fk,
    geometric_jacobian,
    ik,
    orientation_error,
    pose_error,
    rotation_exp,
    rotation_log,
)
from .model import GripperSpec, JointDef, ModelError, RobotModel, default_model, load_model, model_from_dict
from .script import (
    CallWs,
    Close,
    Instruction,
    Jmp,
    Label,
    MoveJ,
    MoveL,
    Open,
    ParseError,
    Program,
    Wait,
    parse_tp,
    pretty_print,
)
from .sim import (
    AttachedObject,
    BadSafetyTransition,
    GripperMode,
    GripperState,
    InfiniteLoopGuard,
    Interpreter,
    RobotState,
    Safety,
    SafetyViolation,
    StepOutcome,
    Trace,
    TraceEntry,
    estop,
    export_trace,
    home_state,
    inject_collision,
    restart,
    run_program,
    step,
    trace_record,
)

__all__ = [
    "AttachedObject",
    "BadSafetyTransition",
    "CallWs",
    "Close",
    "GripperMode",
    "GripperSpec",
    "GripperState",
    "InfiniteLoopGuard",
    "Instruction",
    "Interpreter",
    "Jmp",
    "JointDef",
    "JointLimit",
    "Label",
    "ModelError",
    "MoveJ",
    "MoveL",
    "Open",
    "ParseError",
    "Pose",
    "Program",
    "RobotModel",
    "RobotState",
    "Safety",
    "SafetyViolation",
    "StepOutcome",
    "Trace",
    "TraceEntry",
    "Unreachable",
    "Wait",
    "default_model",
    "dh_transform",
    "estop",
    "export_trace",
    "fk",
    "geometric_jacobian",
    "home_state",
    "ik",
    "inject_collision",
    "load_model",
    "model_from_dict",
    "orientation_error",
    "parse_tp",
    "pose_error",
    "pretty_print",
    "restart",
    "rotation_exp",
    "rotation_log",
    "run_program",
    "step",
    "trace_record",
]
