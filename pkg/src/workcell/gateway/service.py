"""The command bus: channel requests in, robot jobs and events out.

One service instance owns the robot, the scene and the event log.
Contract highlights:

* per-session command serialization, with (session, tick) idempotency:
  duplicate deliveries return the original reply object;
* a global FIFO job queue drained by one executor thread, so at most
  one job is ever Running;
* safety controls bypass the queue and are applied between simulation
  ticks, even mid-job;
* status and event reads never block job execution for more than a tick.
"""
from __future__ import annotations

import logging
import math
import re
import threading
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ..dialogue import DialogueConfig, DispatchRecord, KnowledgeBase, Session, handle_turn
from ..robot import (
    Interpreter,
    RobotModel,
    Safety,
    estop,
    home_state,
    inject_collision,
    parse_tp,
    restart,
    trace_record,
)
from ..vision import (
    CameraConfig,
    Detection,
    calibration_for_camera,
    detect,
    pgm_bytes,
    pixel_to_robot,
    render,
)
from ..vision.scene import Scene, SceneObject
from .events import Event, EventLog
from .jobs import Job, JobKind, JobState

log = logging.getLogger("workcell.gateway")

TOOL_DOWN_ROTVEC = (math.pi, 0.0, 0.0)
DEFAULT_APPROACH_OFFSET = 0.05
DEFAULT_GRASP_HEIGHT = 0.02

_SESSION_ID = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_-]*$")
_CHANNELS = ("chat", "voice", "console")
_CONTROL_ACTIONS = ("estop", "restart", "inject_collision")


class MalformedRequest(ValueError):
    pass


class UnknownEndpoint(LookupError):
    pass


class ObjectNotFound(LookupError):
    pass


@dataclass(frozen=True)
class CommandRequest:
    session_id: str
    channel: str
    utterance: str
    tick: int

    def __post_init__(self):
        if not _SESSION_ID.match(self.session_id or ""):
            raise MalformedRequest(f"bad session id {self.session_id!r}")
        if self.channel not in _CHANNELS:
            raise MalformedRequest(f"unknown channel {self.channel!r}")
        if not self.utterance or not self.utterance.strip():
            raise MalformedRequest("empty utterance")
        if not isinstance(self.tick, int) or self.tick < 0:
            raise MalformedRequest(f"bad tick {self.tick!r}")


@dataclass(frozen=True)
class GatewayReply:
    text: str
    job_id: str | None = None

    def as_dict(self) -> dict:
        doc = {"reply": self.text}
        if self.job_id is not None:
            doc["job_id"] = self.job_id
        return doc


@dataclass(frozen=True)
class EndpointBinding:
    """How a dispatched form maps onto a job."""

    kind: JobKind
    class_field: str | None = None
    class_map: dict[str, str] = field(default_factory=dict)
    defect_class: str | None = None


def synthesize_pick_program(target_xy: tuple[float, float],
                            drop_zone: tuple[float, float, float],
                            grasp_height: float = DEFAULT_GRASP_HEIGHT,
                            approach_offset: float = DEFAULT_APPROACH_OFFSET) -> str:
    """Six-step pick script: approach above the target, descend, grasp,
    lift, move to the drop zone, release.  Tool points straight down."""
    rx, ry, rz = (repr(v) for v in TOOL_DOWN_ROTVEC)
    x, y = (repr(float(v)) for v in target_xy)
    gz, az = repr(float(grasp_height)), repr(float(grasp_height + approach_offset))
    dx, dy, dz = (repr(float(v)) for v in drop_zone)
    lines = [
        f"MOVEL {x} {y} {az} {rx} {ry} {rz}",
        f"MOVEL {x} {y} {gz} {rx} {ry} {rz}",
        "CLOSE",
        f"MOVEL {x} {y} {az} {rx} {ry} {rz}",
        f"MOVEL {dx} {dy} {dz} {rx} {ry} {rz}",
        "OPEN",
    ]
    return "\n".join(lines) + "\n"


class GatewayService:
    def __init__(self, *, kb: KnowledgeBase, model: RobotModel, scene: Scene,
                 templates: dict[str, np.ndarray], camera: CameraConfig,
                 bindings: dict[str, EndpointBinding],
                 detector_threshold: float = 0.7,
                 nms_iou: float = 0.5,
                 noise_amplitude: float = 0.0,
                 drop_zone: tuple[float, float, float] = (0.3, -0.1, 0.02),
                 grasp_height: float = DEFAULT_GRASP_HEIGHT,
                 approach_offset: float = DEFAULT_APPROACH_OFFSET,
                 seed: int = 0,
                 tick_budget: int = 100_000,
                 dialogue_config: DialogueConfig | None = None,
                 start_executor: bool = True):
        self.kb = kb
        self.model = model
        self.scene = scene
        self.templates = dict(templates)
        self.camera = camera
        self.bindings = dict(bindings)
        self.detector_threshold = detector_threshold
        self.nms_iou = nms_iou
        self.noise_amplitude = noise_amplitude
        self.drop_zone = tuple(float(v) for v in drop_zone)
        self.grasp_height = grasp_height
        self.approach_offset = approach_offset
        self.seed = seed
        self.tick_budget = tick_budget
        self.dialogue_config = dialogue_config or DialogueConfig()
        self.calibration = calibration_for_camera(camera)
        self.events = EventLog()

        self._sessions: dict[str, Session] = {}
        self._session_locks: dict[str, threading.Lock] = {}
        self._session_notices: dict[str, str] = {}
        self._sessions_guard = threading.Lock()
        self._reply_cache: dict[tuple[str, int], GatewayReply] = {}

        self._robot_lock = threading.RLock()
        self._robot_state = home_state(model)
        self._robot_tick = 0
        self._interp: Interpreter | None = None
        self._frame_counter = 0

        self._jobs: dict[str, Job] = {}
        self._queue: deque[str] = deque()
        self._jobs_guard = threading.Condition()
        self._job_counter = 0
        self._active_job: str | None = None
        self._closed = False

        self._executor: threading.Thread | None = None
        if start_executor:
            self._executor = threading.Thread(target=self._run_jobs, name="gateway-executor", daemon=True)
            self._executor.start()

    # -- command path -------------------------------------------------------

    def submit_command(self, request: CommandRequest) -> GatewayReply:
        """Route one utterance through dialogue and, on dispatch, into a job."""
        lock = self._session_lock(request.session_id)
        with lock:
            key = (request.session_id, request.tick)
            if key in self._reply_cache:
                return self._reply_cache[key]
            with self._sessions_guard:
                session = self._sessions.get(request.session_id) or Session(
                    session_id=request.session_id, created_tick=request.tick
                )
                notice = self._session_notices.pop(request.session_id, None)
            session, dialogue_reply = handle_turn(
                session, request.utterance, self.kb, self.dialogue_config, request.tick
            )
            self.events.append(
                "dialogue",
                {
                    "type": "command",
                    "session": request.session_id,
                    "channel": request.channel,
                    "utterance": request.utterance,
                    "reply": dialogue_reply.text,
                    "kind": dialogue_reply.kind,
                },
                tick=request.tick,
            )
            text = dialogue_reply.text
            if notice:
                text = f"{notice} {text}"
            job_id = None
            if dialogue_reply.dispatch is not None:
                job, problem = self._resolve_dispatch(dialogue_reply.dispatch, request)
                job_id = job.job_id
                if problem:
                    text = f"{text} However, {problem}."
                text = f"{text} (job {job_id})"
            reply = GatewayReply(text=text, job_id=job_id)
            with self._sessions_guard:
                self._sessions[request.session_id] = session
            self._reply_cache[key] = reply
            return reply

    def _resolve_dispatch(self, record: DispatchRecord,
                          request: CommandRequest) -> tuple[Job, str | None]:
        """Convert a completed form into a queued job.

        Pick resolution (frame render + detection) happens here, so the
        reply can surface a missing object immediately; the queued job
        then fails in the executor, keeping the single-Running invariant.
        """
        binding = self.bindings.get(record.endpoint)
        if binding is None:
            raise UnknownEndpoint(record.endpoint)
        self.events.append(
            "gateway",
            {
                "type": "dispatch",
                "endpoint": record.endpoint,
                "form": record.form_id,
                "params": dict(record.params),
                "session": request.session_id,
            },
            tick=request.tick,
        )
        params: dict = {"endpoint": record.endpoint, "form_params": dict(record.params),
                        "session": request.session_id}
        problem = None
        if binding.kind is JobKind.PICK_OBJECT:
            wanted = record.params.get(binding.class_field or "", "")
            label = binding.class_map.get(wanted, wanted)
            params["object_class"] = label
            try:
                detection = self._find_object(label)
                target = pixel_to_robot(self.calibration, detection.box)
                params["target"] = [round(target[0], 6), round(target[1], 6)]
                params["score"] = detection.score
                params["program"] = synthesize_pick_program(
                    target, self.drop_zone, self.grasp_height, self.approach_offset
                )
            except ObjectNotFound as exc:
                problem = str(exc)
                params["error"] = problem
        elif binding.kind is JobKind.RUN_SCRIPT:
            params["program"] = record.params.get("script", "")
        elif binding.kind is JobKind.QC_CYCLE:
            params["defect_class"] = binding.defect_class
        return self._enqueue(binding.kind, params, request.session_id), problem

    def _find_object(self, label: str) -> Detection:
        if label not in self.templates:
            raise ObjectNotFound(f"no detector template for class {label!r}")
        frame = self.frame()
        hits = [d for d in detect(frame, {label: self.templates[label]},
                                  self.detector_threshold, self.nms_iou)]
        if not hits:
            raise ObjectNotFound(f"no {label!r} detected in the workspace")
        return max(hits, key=lambda d: (d.score, -d.box[0], -d.box[1]))

    def submit_script(self, script_text: str, session_id: str = "direct") -> Job:
        """Queue a raw motion script (demo/test path, no dialogue)."""
        parse_tp(script_text)  # reject malformed scripts before queueing
        return self._enqueue(
            JobKind.RUN_SCRIPT,
            {"endpoint": None, "program": script_text, "session": session_id},
            session_id,
        )

    def _enqueue(self, kind: JobKind, params: dict, session_id: str) -> Job:
        with self._jobs_guard:
            self._job_counter += 1
            job = Job(job_id=f"job-{self._job_counter:04d}", kind=kind, params=params)
            self._jobs[job.job_id] = job
            self._queue.append(job.job_id)
            self._jobs_guard.notify_all()
        self._job_event(job)
        return job

    # -- job execution ------------------------------------------------------

    def _run_jobs(self) -> None:
        while True:
            with self._jobs_guard:
                while not self._queue and not self._closed:
                    self._jobs_guard.wait(timeout=0.1)
                if self._closed:
                    return
                job = self._jobs[self._queue.popleft()]
                self._active_job = job.job_id
            try:
                self._execute(job)
            except Exception:  # job machinery must never kill the executor
                log.exception("job %s crashed", job.job_id)
                if not job.terminal:
                    job.result["reason"] = "internal error"
                    job.transition(JobState.FAILED)
                    self._job_event(job)
            finally:
                with self._jobs_guard:
                    self._active_job = None
                    self._jobs_guard.notify_all()

    def _execute(self, job: Job) -> None:
        job.transition(JobState.RUNNING)
        self._job_event(job)
        if "error" in job.params:
            job.result["reason"] = job.params["error"]
            job.transition(JobState.FAILED)
            self._job_event(job)
            self._notify(job.params.get("session"), f"job {job.job_id} failed: {job.result['reason']}")
            return
        if job.kind is JobKind.QC_CYCLE:
            self._execute_qc(job)
            return
        outcome, reason = self._run_script_on_robot(job, job.params.get("program", ""))
        job.result["reason"] = reason
        job.transition(outcome)
        self._job_event(job)
        if outcome is not JobState.DONE:
            self._notify(job.params.get("session"), f"job {job.job_id} {outcome.value.lower()}: {reason}")

    def _execute_qc(self, job: Job) -> None:
        frame = self.frame()
        hits = detect(frame, self.templates, self.detector_threshold, self.nms_iou)
        decision = None
        diverted = False
        reason = "no item detected"
        if hits:
            best = max(hits, key=lambda d: (d.score, -d.box[0], -d.box[1]))
            decision = best.label
            reason = "ok"
            item = self.scene.nearest(pixel_to_robot(self.calibration, best.box), 0.05)
            self.events.append(
                "vision",
                {
                    "type": "qc_decision",
                    "label": best.label,
                    "score": round(best.score, 6),
                    "box": list(best.box),
                    "object": item.id if item else None,
                },
                tick=self._robot_tick,
            )
            if best.label == job.params.get("defect_class"):
                target = pixel_to_robot(self.calibration, best.box)
                program = synthesize_pick_program(
                    target, self.drop_zone, self.grasp_height, self.approach_offset
                )
                outcome, reason = self._run_script_on_robot(job, program)
                if outcome is not JobState.DONE:
                    job.result.update({"decision": decision, "diverted": False, "reason": reason})
                    job.transition(outcome)
                    self._job_event(job)
                    return
                diverted = True
        else:
            self.events.append(
                "vision",
                {"type": "qc_decision", "label": None, "score": None, "box": None, "object": None},
                tick=self._robot_tick,
            )
        job.result.update({"decision": decision, "diverted": diverted, "reason": reason})
        job.transition(JobState.DONE)
        self._job_event(job)

    def _run_script_on_robot(self, job: Job, program_text: str) -> tuple[JobState, str]:
        """Drive the robot tick by tick, mirroring the trace into the log."""
        try:
            program = parse_tp(program_text)
        except Exception as exc:
            return JobState.FAILED, f"parse error: {exc}"
        with self._robot_lock:
            if self._robot_state.safety is not Safety.RUNNING:
                return JobState.STOPPED, f"robot is {self._robot_state.safety.value}"
            self._interp = Interpreter(
                self.model, program, self.scene, self._robot_state,
                start_tick=self._robot_tick, tick_budget=self.tick_budget,
            )
        try:
            while True:
                with self._robot_lock:
                    entry = self._interp.tick()
                    if entry is None:
                        return JobState.DONE, "completed"
                    self._robot_state = entry.state
                    self._robot_tick = entry.tick
                self.events.append("robot", {"type": "trace", **trace_record(entry)}, tick=entry.tick)
                if entry.state.safety is not Safety.RUNNING:
                    if entry.event and entry.event.get("type") == "payload_fault":
                        return JobState.FAILED, "payload fault"
                    return JobState.STOPPED, f"robot is {entry.state.safety.value}"
        except Exception as exc:
            return JobState.FAILED, str(exc)
        finally:
            with self._robot_lock:
                self._interp = None

    def _job_event(self, job: Job) -> None:
        self.events.append(
            "gateway",
            {"type": "job", "job": job.job_id, "kind": job.kind.value,
             "state": job.state.value, "result": dict(job.result)},
            tick=self._robot_tick,
        )

    def _notify(self, session_id: str | None, text: str) -> None:
        if session_id:
            with self._sessions_guard:
                self._session_notices[session_id] = text

    # -- status / control / scene -------------------------------------------

    def get_status(self) -> dict:
        with self._robot_lock:
            state = self._robot_state
            robot = {
                "joints": [float(v) for v in state.joints],
                "tcp": {
                    "position": [float(v) for v in state.tcp.position],
                    "rotvec": [float(v) for v in state.tcp.rotvec],
                },
                "gripper": {
                    "aperture": state.gripper.aperture,
                    "mode": state.gripper.mode.value,
                    "holding": state.gripper.holding,
                },
                "attached": (
                    {"object": state.attached.object_id, "mass_kg": state.attached.mass_kg}
                    if state.attached
                    else None
                ),
                "safety": state.safety.value,
                "tick": self._robot_tick,
            }
        with self._jobs_guard:
            active = self._jobs[self._active_job].snapshot() if self._active_job else None
            depth = len(self._queue)
        camera = {
            "width": self.camera.width,
            "height": self.camera.height,
            "origin": list(self.camera.origin),
            "pixels_per_meter": self.camera.pixels_per_meter,
        }
        return {"robot": robot, "active_job": active, "queue_depth": depth, "camera": camera}

    def get_events(self, since: int, limit: int = 500) -> tuple[list[Event], int]:
        return self.events.since(since, limit)

    def control(self, action: str) -> dict:
        """Safety control; applied between ticks even while a job runs."""
        if action not in _CONTROL_ACTIONS:
            raise MalformedRequest(f"unknown control action {action!r}")
        with self._robot_lock:
            if self._interp is not None:
                target = self._interp
                if action == "estop":
                    target.estop()
                elif action == "inject_collision":
                    target.inject_collision()
                else:
                    target.restart()
                self._robot_state = target.state
            else:
                if action == "estop":
                    self._robot_state = estop(self._robot_state)
                elif action == "inject_collision":
                    self._robot_state = inject_collision(self._robot_state)
                else:
                    self._robot_state = restart(self._robot_state)
            safety = self._robot_state.safety.value
        self.events.append(
            "gateway",
            {"type": "control", "action": action, "safety": safety},
            tick=self._robot_tick,
        )
        return {"ok": True, "safety": safety}

    def set_scene(self, objects: list[dict]) -> dict:
        """Replace the scene contents (demo/test injection)."""
        parsed = [
            SceneObject(
                id=str(rec["id"]),
                label=str(rec["label"]),
                position=(float(rec["position"][0]), float(rec["position"][1])),
                mass_kg=float(rec.get("mass_kg", 0.05)),
                template=str(rec.get("template", rec["label"])),
            )
            for rec in objects
        ]
        with self._robot_lock:
            Scene(extent=self.scene.extent, objects=parsed)  # validates
            self.scene.objects[:] = parsed
        self.events.append("gateway", {"type": "scene_set", "count": len(parsed)},
                           tick=self._robot_tick)
        return {"ok": True, "count": len(parsed)}

    def frame(self) -> np.ndarray:
        """Render the current camera frame (advances the noise stream)."""
        with self._robot_lock:
            self._frame_counter += 1
            return render(
                self.scene, self.camera, self.templates,
                noise_amplitude=self.noise_amplitude,
                seed=self.seed + self._frame_counter,
            )

    def frame_pgm(self) -> bytes:
        return pgm_bytes(self.frame())

    # -- lifecycle ----------------------------------------------------------

    def wait_idle(self, timeout: float = 30.0) -> bool:
        """Block until the queue is drained and no job is active."""
        with self._jobs_guard:
            return self._jobs_guard.wait_for(
                lambda: not self._queue and self._active_job is None, timeout=timeout
            )

    def job(self, job_id: str) -> Job:
        with self._jobs_guard:
            return self._jobs[job_id]

    def close(self) -> None:
        with self._jobs_guard:
            self._closed = True
            self._jobs_guard.notify_all()
        if self._executor is not None:
            self._executor.join(timeout=5.0)

    def _session_lock(self, session_id: str) -> threading.Lock:
        with self._sessions_guard:
            lock = self._session_locks.get(session_id)
            if lock is None:
                lock = self._session_locks[session_id] = threading.Lock()
            return lock
