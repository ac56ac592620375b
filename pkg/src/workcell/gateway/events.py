"""Append-only event log with dense, strictly increasing sequence numbers."""
from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class Event:
    seq: int
    tick: int
    source: str
    payload: dict

    def as_dict(self) -> dict:
        return {"seq": self.seq, "tick": self.tick, "source": self.source, "payload": self.payload}


class EventLog:
    """Thread-safe append-only log; reads never block appends for long."""

    def __init__(self):
        self._events: list[Event] = []
        self._lock = threading.Lock()

    def append(self, source: str, payload: dict, tick: int = 0) -> Event:
        with self._lock:
            event = Event(seq=len(self._events) + 1, tick=tick, source=source, payload=payload)
            self._events.append(event)
            return event

    def since(self, seq: int, limit: int | None = None) -> tuple[list[Event], int]:
        """Events with sequence number > ``seq`` plus the next cursor."""
        with self._lock:
            page = self._events[max(seq, 0):]
        if limit is not None:
            page = page[:limit]
        next_cursor = page[-1].seq if page else max(seq, 0)
        return list(page), next_cursor

    def __len__(self) -> int:
        with self._lock:
            return len(self._events)

    def export(self, path: str | os.PathLike) -> None:
        events, _ = self.since(0)
        with Path(path).open("w") as fh:
            for event in events:
                fh.write(json.dumps(event.as_dict()) + "\n")
