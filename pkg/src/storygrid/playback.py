"""Audio/video channel control for board objects.

Each object carries up to two attached channels and may have at most one
playing at a time. The engine only tracks the playing flag; actual media
output happens in clients, driven by the PlaybackCommand values emitted
here and delivered over the session stream.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Literal

from .errors import UnknownObjectError
from .signals import Signal, SignalCode

if TYPE_CHECKING:
    from .model import Board, MediaObject


@dataclass(frozen=True)
class PlaybackCommand:
    object_id: str
    channel: int
    action: Literal["start", "stop"]
    media_ref: str

    def to_dict(self) -> dict:
        return {
            "object_id": self.object_id,
            "channel": self.channel,
            "action": self.action,
            "media_ref": self.media_ref,
        }


def _stop_command(obj: MediaObject) -> PlaybackCommand:
    component = obj.av_channels[obj.playing - 1]
    return PlaybackCommand(obj.id, obj.playing, "stop", component.media_ref)


def play(
    board: Board, object_id: str, channel: int
) -> tuple[list[PlaybackCommand], list[Signal]]:
    """Start the given channel on an object, switching channels if needed.

    Returns (commands, signals). Requesting a channel the object does not
    have yields NoSuchChannel; requesting the channel already playing
    yields AlreadyPlaying. A switch emits a stop for the old channel
    before the start for the new one.
    """
    obj = board.objects.get(object_id)
    if obj is None:
        raise UnknownObjectError(object_id)
    if channel < 1 or channel > len(obj.av_channels):
        return [], [Signal(SignalCode.NO_SUCH_CHANNEL, f"{object_id} has no channel {channel}")]
    if obj.playing == channel:
        return [], [Signal(SignalCode.ALREADY_PLAYING, f"{object_id} channel {channel}")]
    commands: list[PlaybackCommand] = []
    if obj.playing is not None:
        commands.append(_stop_command(obj))
    component = obj.av_channels[channel - 1]
    commands.append(PlaybackCommand(object_id, channel, "start", component.media_ref))
    obj.playing = channel
    return commands, []


def stop(
    board: Board, object_id: str | None = None
) -> tuple[list[PlaybackCommand], list[Signal]]:
    """Stop one object's playback, or all playback when object_id is None.

    An idle target (or an all-stop with nothing active) yields NotPlaying.
    """
    if object_id is not None:
        obj = board.objects.get(object_id)
        if obj is None:
            raise UnknownObjectError(object_id)
        if obj.playing is None:
            return [], [Signal(SignalCode.NOT_PLAYING, object_id)]
        command = _stop_command(obj)
        obj.playing = None
        return [command], []

    commands: list[PlaybackCommand] = []
    for oid in board.z_order:
        obj = board.objects[oid]
        if obj.playing is not None:
            commands.append(_stop_command(obj))
            obj.playing = None
    if not commands:
        return [], [Signal(SignalCode.NOT_PLAYING, "no active playback")]
    return commands, []


def on_media_ended(board: Board, object_id: str) -> bool:
    """Clear the playing flag when a client reports natural end of media.

    No stop command is emitted: the media already stopped at the source.
    Late callbacks for erased or idle objects are ignored. Returns True
    if a flag was actually cleared.
    """
    obj = board.objects.get(object_id)
    if obj is None or obj.playing is None:
        return False
    obj.playing = None
    return True
