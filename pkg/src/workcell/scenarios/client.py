"""Minimal HTTP client for the gateway wire protocol (stdlib only).

The scenario drivers use this to stay black-box: everything goes over
the same endpoints the operator console uses.
"""
from __future__ import annotations

import json
import time
import urllib.error
import urllib.request


class GatewayClient:
    def __init__(self, base_url: str, timeout: float = 10.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self._tick = 0

    def _request(self, method: str, path: str, body: dict | None = None) -> dict:
        data = json.dumps(body).encode("utf-8") if body is not None else None
        req = urllib.request.Request(
            self.base_url + path,
            data=data,
            method=method,
            headers={"Content-Type": "application/json"} if data else {},
        )
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                return json.loads(resp.read())
        except urllib.error.HTTPError as exc:
            payload = exc.read()
            try:
                return json.loads(payload)
            except json.JSONDecodeError:
                raise RuntimeError(f"{method} {path}: HTTP {exc.code}") from None

    def next_tick(self) -> int:
        self._tick += 1
        return self._tick

    def command(self, session_id: str, utterance: str, tick: int | None = None,
                channel: str = "console") -> dict:
        return self._request(
            "POST",
            "/v1/command",
            {
                "session_id": session_id,
                "channel": channel,
                "utterance": utterance,
                "tick": self.next_tick() if tick is None else tick,
            },
        )

    def status(self) -> dict:
        return self._request("GET", "/v1/status")

    def events(self, since: int = 0) -> dict:
        return self._request("GET", f"/v1/events?since={since}")

    def all_events(self) -> list[dict]:
        out: list[dict] = []
        cursor = 0
        while True:
            page = self.events(cursor)
            out.extend(page["events"])
            if page["next"] == cursor:
                return out
            cursor = page["next"]

    def control(self, action: str) -> dict:
        return self._request("POST", "/v1/control", {"action": action})

    def set_scene(self, objects: list[dict]) -> dict:
        return self._request("POST", "/v1/scene", {"objects": objects})

    def frame_bytes(self) -> bytes:
        req = urllib.request.Request(self.base_url + "/v1/frame")
        with urllib.request.urlopen(req, timeout=self.timeout) as resp:
            return resp.read()

    def wait_for_job(self, job_id: str, timeout: float = 30.0,
                     poll: float = 0.01) -> dict:
        """Follow the event feed until the job reaches a terminal state."""
        deadline = time.monotonic() + timeout
        terminal = {"Done", "Failed", "Stopped"}
        cursor = 0
        while time.monotonic() < deadline:
            page = self.events(cursor)
            for event in page["events"]:
                payload = event["payload"]
                if (
                    payload.get("type") == "job"
                    and payload.get("job") == job_id
                    and payload["state"] in terminal
                ):
                    return payload
            if page["next"] == cursor:
                time.sleep(poll)
            cursor = page["next"]
        raise TimeoutError(f"job {job_id} not terminal after {timeout}s")
