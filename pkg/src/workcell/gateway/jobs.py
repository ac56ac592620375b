"""Gateway work items and their lifecycle bookkeeping."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field


class JobKind(str, enum.Enum):
    PICK_OBJECT = "PickObject"
    RUN_SCRIPT = "RunScript"
    QC_CYCLE = "QualityControlCycle"


class JobState(str, enum.Enum):
    QUEUED = "Queued"
    RUNNING = "Running"
    DONE = "Done"
    FAILED = "Failed"
    STOPPED = "Stopped"


_TRANSITIONS = {
    JobState.QUEUED: {JobState.RUNNING},
    JobState.RUNNING: {JobState.DONE, JobState.FAILED, JobState.STOPPED},
    JobState.DONE: set(),
    JobState.FAILED: set(),
    JobState.STOPPED: set(),
}


class BadJobTransition(RuntimeError):
    pass


@dataclass
class Job:
    job_id: str
    kind: JobKind
    params: dict = field(default_factory=dict)
    state: JobState = JobState.QUEUED
    result: dict = field(default_factory=dict)

    def transition(self, new_state: JobState) -> None:
        if new_state not in _TRANSITIONS[self.state]:
            raise BadJobTransition(f"{self.state.value} -> {new_state.value}")
        self.state = new_state

    @property
    def terminal(self) -> bool:
        return self.state in (JobState.DONE, JobState.FAILED, JobState.STOPPED)

    def snapshot(self) -> dict:
        return {
            "job_id": self.job_id,
            "kind": self.kind.value,
            "params": dict(self.params),
            "state": self.state.value,
            "result": dict(self.result),
        }
