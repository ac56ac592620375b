"""Command gateway: wire protocol, job queue, event log."""

from .events import Event, EventLog
from .http import GatewayHTTPServer, serve
from .jobs import BadJobTransition, Job, JobKind, JobState
from .service import (
    CommandRequest,
    EndpointBinding,
    GatewayReply,
    GatewayService,
    MalformedRequest,
    ObjectNotFound,
    UnknownEndpoint,
    synthesize_pick_program,
)

__all__ = [
    "BadJobTransition",
    "CommandRequest",
    "EndpointBinding",
    "Event",
    "EventLog",
    "GatewayHTTPServer",
    "GatewayReply",
    "GatewayService",
    "Job",
    "JobKind",
    "JobState",
    "MalformedRequest",
    "ObjectNotFound",
    "UnknownEndpoint",
    "serve",
    "synthesize_pick_program",
]
