"""storygrid: a deterministic 8x8 poster-board engine.

Rectangular media objects live on an 8x8 grid and are manipulated by a
small vocabulary of physical control tokens (move, resize, play, stop,
zoom, erase, undo). The package provides the board model, the token
gesture grammar, playback control, JSON persistence, event-log replay
with usage analytics, a session server, and a CLI.
"""

from .devlog import ReplayResult, UsageSummary, parse_log, replay, serialize_log, summarize
from .gesture import (
    CompletedOp,
    ConsumeResult,
    Phase,
    PresenceTracker,
    TokenEvent,
    TokenKind,
    consume,
)
from .model import (
    BOARD_SIZE,
    FULL_BOARD,
    AvComponent,
    AvKind,
    Board,
    CellCoord,
    Edge,
    MediaObject,
    Rect,
    UndoRecord,
    check_invariants,
    erase_object,
    move_object,
    resize_object,
    topmost_at,
    undo,
    zoom_toggle,
)
from .persist import (
    LayoutEntry,
    LayoutSnapshot,
    ManifestObject,
    PosterManifest,
    board_to_dict,
    load_poster,
    parse_manifest,
    parse_snapshot,
    restore_layout,
    save_layout,
    serialize_manifest,
    serialize_snapshot,
)
from .playback import PlaybackCommand, on_media_ended, play, stop
from .signals import Signal, SignalCode

__version__ = "0.1.0"

__all__ = [
    "BOARD_SIZE",
    "FULL_BOARD",
    "AvComponent",
    "AvKind",
    "Board",
    "CellCoord",
    "CompletedOp",
    "ConsumeResult",
    "Edge",
    "LayoutEntry",
    "LayoutSnapshot",
    "ManifestObject",
    "MediaObject",
    "Phase",
    "PlaybackCommand",
    "PosterManifest",
    "PresenceTracker",
    "Rect",
    "ReplayResult",
    "Signal",
    "SignalCode",
    "TokenEvent",
    "TokenKind",
    "UndoRecord",
    "UsageSummary",
    "board_to_dict",
    "check_invariants",
    "consume",
    "erase_object",
    "load_poster",
    "move_object",
    "on_media_ended",
    "parse_log",
    "parse_manifest",
    "parse_snapshot",
    "play",
    "replay",
    "resize_object",
    "restore_layout",
    "save_layout",
    "serialize_log",
    "serialize_manifest",
    "serialize_snapshot",
    "stop",
    "summarize",
    "topmost_at",
    "undo",
    "zoom_toggle",
]
