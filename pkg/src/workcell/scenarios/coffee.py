"""End-to-end coffee-pod selection: chat to order, vision to find the pod,
robot to deliver it to the drop zone.

The driver talks to the gateway exclusively over the wire protocol, so a
run exercises exactly what an operator console would.  Every assertion is
answered from the event log; the transcript alone audits a run.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..gateway.http import serve
from ..vision.scene import Scene
from .client import GatewayClient
from .config import ScenarioConfig, build_service


class ScenarioAssertionError(AssertionError):
    def __init__(self, step: str, detail: str):
        super().__init__(f"{step}: {detail}")
        self.step = step


@dataclass
class CoffeeRun:
    transcript: str
    replies: list[dict]
    prompts: int
    events: list[dict]
    final_scene: Scene
    job: dict | None = None
    dispatch: dict | None = None
    release: dict | None = None
    picked_object: str | None = None
    notes: list[str] = field(default_factory=list)


def run_coffee_scenario(config: ScenarioConfig, turns: list[str],
                        expect: str | None = "delivered",
                        session_id: str = "operator") -> CoffeeRun:
    """Drive scripted user turns against a live gateway.

    ``expect`` selects the built-in outcome checks: "delivered" (a pick
    job completed and the pod sits at the drop zone), "not_found" (the
    order failed with a missing object), or None (no outcome checks).
    Raises ScenarioAssertionError naming the first violated step.
    """
    service = build_service(config)
    server, _ = serve(service)
    client = GatewayClient(f"http://127.0.0.1:{server.port}")
    lines: list[str] = []
    replies: list[dict] = []
    job_payload = None
    try:
        for turn in turns:
            reply = client.command(session_id, turn)
            replies.append(reply)
            lines.append(f"> {turn}")
            lines.append(f"< {reply['reply']}")
            if reply.get("job_id"):
                job_payload = client.wait_for_job(reply["job_id"])
        service.wait_idle()
        events = client.all_events()
    finally:
        server.shutdown()
        service.close()

    prompts = sum(
        1
        for e in events
        if e["payload"].get("type") == "command" and e["payload"].get("kind") == "prompt"
    )
    dispatch = next((e["payload"] for e in events if e["payload"].get("type") == "dispatch"), None)
    release = next(
        (
            (e["payload"].get("event") or {})
            for e in events
            if e["payload"].get("type") == "trace"
            and (e["payload"].get("event") or {}).get("type") == "release"
        ),
        None,
    )
    run = CoffeeRun(
        transcript="\n".join(lines) + "\n",
        replies=replies,
        prompts=prompts,
        events=events,
        final_scene=service.scene,
        job=job_payload,
        dispatch=dispatch,
        release=release,
        picked_object=release["object"] if release else None,
    )
    if expect == "delivered":
        _check_delivered(run, config)
    elif expect == "not_found":
        _check_not_found(run)
    return run


def _check_delivered(run: CoffeeRun, config: ScenarioConfig) -> None:
    if run.dispatch is None:
        raise ScenarioAssertionError("form completion", "no dispatch event in the log")
    if run.job is None:
        raise ScenarioAssertionError("pick job", "no job reached a terminal state")
    if run.job["state"] != "Done":
        raise ScenarioAssertionError(
            "pick job", f"job ended {run.job['state']}: {run.job['result'].get('reason')}"
        )
    if run.release is None:
        raise ScenarioAssertionError("delivery", "no release event in the log")
    dx, dy, _ = config.drop_zone
    rx, ry = run.release["position"]
    if math.dist((rx, ry), (dx, dy)) > 1e-3:
        raise ScenarioAssertionError(
            "delivery", f"released at ({rx:.4f}, {ry:.4f}), drop zone is ({dx}, {dy})"
        )
    obj_id = run.release["object"]
    obj = run.final_scene.get(obj_id)
    if math.dist(obj.position, (dx, dy)) > 1e-3:
        raise ScenarioAssertionError("delivery", f"{obj_id} ended at {obj.position}")
    run.picked_object = obj_id


def _check_not_found(run: CoffeeRun) -> None:
    if run.job is None:
        raise ScenarioAssertionError("order", "no job was created")
    if run.job["state"] != "Failed":
        raise ScenarioAssertionError("order", f"expected a failed job, got {run.job['state']}")
    if "no" not in run.job["result"].get("reason", ""):
        raise ScenarioAssertionError("order", f"unexpected reason {run.job['result']!r}")
    if not any("However" in r["reply"] for r in run.replies):
        raise ScenarioAssertionError("reply", "failure not surfaced in any reply")
