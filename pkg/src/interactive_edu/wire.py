"""Wire protocol: tagged JSON text frames exchanged over the hub WebSocket.

client -> hub:  hello{role}, press{segment}
hub -> client:  welcome{role, protocol_version}, question{index,total,text,answers},
                feedback{correct,segment,message}, finished{correct_count,total},
                error{code,detail}

Question frames never carry correctness flags; the hub is authoritative.
"""

from __future__ import annotations

import json
from enum import Enum

from .engine import FeedbackIssued, QuestionPosted, SessionEvent, SessionFinished

PROTOCOL_VERSION = "1"


class ClientRole(str, Enum):
    FLOOR = "floor"
    SCREEN = "screen"
    OBSERVER = "observer"


class FrameError(ValueError):
    def __init__(self, code: str, detail: str):
        self.code = code
        self.detail = detail
        super().__init__(f"{code}: {detail}")


def encode(frame: dict) -> str:
    return json.dumps(frame, separators=(",", ":"), ensure_ascii=False)


def decode(raw: str | bytes) -> dict:
    """Parse an inbound frame; anything that is not a JSON object with a
    string "type" is a malformed_frame."""
    try:
        frame = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise FrameError("malformed_frame", f"invalid JSON: {e}") from e
    if not isinstance(frame, dict) or not isinstance(frame.get("type"), str):
        raise FrameError("malformed_frame", 'frame must be an object with a string "type"')
    return frame


def welcome(role: ClientRole) -> dict:
    return {"type": "welcome", "role": role.value, "protocol_version": PROTOCOL_VERSION}


def error(code: str, detail: str) -> dict:
    return {"type": "error", "code": code, "detail": detail}


def hello(role: ClientRole) -> dict:
    return {"type": "hello", "role": role.value}


def press(segment: int) -> dict:
    return {"type": "press", "segment": segment}


def event_frame(event: SessionEvent) -> dict:
    """Map an engine event to its wire form."""
    if isinstance(event, QuestionPosted):
        return {
            "type": "question",
            "index": event.index,
            "total": event.total,
            "text": event.text,
            "answers": [{"label": label, "color": color} for label, color in event.answers],
        }
    if isinstance(event, FeedbackIssued):
        return {
            "type": "feedback",
            "correct": event.correct,
            "segment": event.segment,
            "message": event.message,
        }
    if isinstance(event, SessionFinished):
        return {"type": "finished", "correct_count": event.correct_count, "total": event.total}
    raise TypeError(f"not a session event: {event!r}")
