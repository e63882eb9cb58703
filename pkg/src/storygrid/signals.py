"""Interaction signals.

A signal is data, not an error: it describes the outcome of a token
placement (or stream request) that produced feedback instead of, or in
addition to, a state change. Signals flow into replay transcripts and
are broadcast to connected clients.
"""

from dataclasses import dataclass
from enum import Enum


class SignalCode(str, Enum):
    EMPTY_UNDO = "EmptyUndo"
    NOT_ON_OBJECT = "NotOnObject"
    NOT_ON_BORDER = "NotOnBorder"
    NO_SUCH_CHANNEL = "NoSuchChannel"
    ALREADY_PLAYING = "AlreadyPlaying"
    NOT_PLAYING = "NotPlaying"
    DESTINATION_OUT_OF_BOUNDS = "DestinationOutOfBounds"
    INVALID_RESIZE_TARGET = "InvalidResizeTarget"
    GESTURE_CANCELLED = "GestureCancelled"
    OP_COMPLETED = "OpCompleted"


@dataclass(frozen=True)
class Signal:
    code: SignalCode
    detail: str = ""

    def to_dict(self) -> dict:
        return {"code": self.code.value, "detail": self.detail}
