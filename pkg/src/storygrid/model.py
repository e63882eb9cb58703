"""Board state for the 8x8 poster grid and its primitive operations.

A board holds rectangular media objects snapped to grid cells. Objects
may overlap freely; z_order runs back-to-front, and any operation that
actually changes an object's position or size raises it to the front.
Move, resize, and erase push undo records; zoom toggling and playback
changes never do.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import TYPE_CHECKING

from .errors import (
    InvalidCellError,
    InvalidResizeError,
    OutOfBoundsError,
    UnknownObjectError,
)
from .playback import PlaybackCommand

if TYPE_CHECKING:
    from .gesture import PendingGesture
    from .persist import PosterManifest

BOARD_SIZE = 8
MAX_CHANNELS = 2


class Edge(str, Enum):
    LEFT = "left"
    RIGHT = "right"
    TOP = "top"
    BOTTOM = "bottom"


@dataclass(frozen=True)
class CellCoord:
    """A single grid cell; col and row both run 0..7."""

    col: int
    row: int

    def __post_init__(self) -> None:
        if not (0 <= self.col < BOARD_SIZE and 0 <= self.row < BOARD_SIZE):
            raise InvalidCellError(f"cell ({self.col}, {self.row}) is off the grid")


@dataclass(frozen=True)
class Rect:
    """An axis-aligned cell rectangle, always fully on the board."""

    origin: CellCoord
    width: int
    height: int

    def __post_init__(self) -> None:
        if not (1 <= self.width <= BOARD_SIZE and 1 <= self.height <= BOARD_SIZE):
            raise OutOfBoundsError(f"rect size {self.width}x{self.height} out of range")
        if self.origin.col + self.width > BOARD_SIZE or self.origin.row + self.height > BOARD_SIZE:
            raise OutOfBoundsError(
                f"rect at ({self.origin.col}, {self.origin.row}) "
                f"size {self.width}x{self.height} exceeds the board"
            )

    @property
    def left(self) -> int:
        return self.origin.col

    @property
    def right(self) -> int:
        return self.origin.col + self.width - 1

    @property
    def top(self) -> int:
        return self.origin.row

    @property
    def bottom(self) -> int:
        return self.origin.row + self.height - 1

    def contains(self, cell: CellCoord) -> bool:
        return self.left <= cell.col <= self.right and self.top <= cell.row <= self.bottom

    def edges_at(self, cell: CellCoord) -> tuple[Edge, ...]:
        """Edges of the border ring the cell lies on (empty off the ring).

        Corner cells report two edges; a 1x1 rect reports all four.
        Order is the resize tie-break priority: left, right, top, bottom.
        """
        if not self.contains(cell):
            return ()
        edges = []
        if cell.col == self.left:
            edges.append(Edge.LEFT)
        if cell.col == self.right:
            edges.append(Edge.RIGHT)
        if cell.row == self.top:
            edges.append(Edge.TOP)
        if cell.row == self.bottom:
            edges.append(Edge.BOTTOM)
        return tuple(edges)

    def edge_line(self, edge: Edge) -> int:
        """Boundary cell index of the named edge (column or row)."""
        if edge is Edge.LEFT:
            return self.left
        if edge is Edge.RIGHT:
            return self.right
        if edge is Edge.TOP:
            return self.top
        return self.bottom


FULL_BOARD = Rect(CellCoord(0, 0), BOARD_SIZE, BOARD_SIZE)


class AvKind(str, Enum):
    AUDIO = "audio"
    VIDEO = "video"


@dataclass(frozen=True)
class AvComponent:
    kind: AvKind
    media_ref: str


@dataclass
class MediaObject:
    """One poster object: a still image plus up to two A/V channels.

    zoom_saved holds the pre-zoom rect while the object is expanded to
    the full board; playing is the 1-based channel currently running, if
    any.
    """

    id: str
    image_ref: str
    rect: Rect
    av_channels: tuple[AvComponent, ...] = ()
    zoom_saved: Rect | None = None
    playing: int | None = None

    def copy(self) -> MediaObject:
        # All field values are immutable, so a shallow copy is a snapshot.
        return replace(self)


class UndoKind(str, Enum):
    MOVE = "move"
    RESIZE = "resize"
    ERASE = "erase"


@dataclass(frozen=True)
class UndoRecord:
    """Everything needed to restore the board as it was before one op."""

    kind: UndoKind
    object_id: str
    prior_object: MediaObject
    prior_z_order: tuple[str, ...]


@dataclass
class Board:
    poster_id: str
    objects: dict[str, MediaObject] = field(default_factory=dict)
    z_order: list[str] = field(default_factory=list)
    undo_stack: list[UndoRecord] = field(default_factory=list)
    pending: "PendingGesture | None" = None
    manifest: "PosterManifest | None" = field(default=None, compare=True, repr=False)


def _require(board: Board, object_id: str) -> MediaObject:
    obj = board.objects.get(object_id)
    if obj is None:
        raise UnknownObjectError(object_id)
    return obj


def _push_undo(board: Board, kind: UndoKind, obj: MediaObject) -> None:
    board.undo_stack.append(
        UndoRecord(kind, obj.id, obj.copy(), tuple(board.z_order))
    )


def _bring_to_front(board: Board, object_id: str) -> None:
    board.z_order.remove(object_id)
    board.z_order.append(object_id)


def topmost_at(board: Board, cell: CellCoord) -> str | None:
    """Id of the frontmost object covering the cell, or None."""
    for oid in reversed(board.z_order):
        if board.objects[oid].rect.contains(cell):
            return oid
    return None


def move_object(board: Board, object_id: str, new_origin: CellCoord) -> None:
    """Relocate an object, keeping its size.

    Moving to the current origin is a no-op: nothing recorded, no
    z-order change. A real move clears any saved zoom rect, pushes an
    undo record, and brings the object to the front.
    """
    obj = _require(board, object_id)
    if new_origin == obj.rect.origin:
        return
    new_rect = Rect(new_origin, obj.rect.width, obj.rect.height)
    _push_undo(board, UndoKind.MOVE, obj)
    obj.rect = new_rect
    obj.zoom_saved = None
    _bring_to_front(board, object_id)


def resized_rect(rect: Rect, edge: Edge, target_line: int) -> Rect:
    """The rect produced by dragging one edge to a new boundary line.

    target_line is the cell index (column for left/right, row for
    top/bottom) the edge's boundary cells should land on. Raises
    InvalidResizeError when the result would be degenerate or off-board.
    """
    if not (0 <= target_line < BOARD_SIZE):
        raise InvalidResizeError(f"target line {target_line} is off the board")
    if edge is Edge.LEFT:
        if target_line > rect.right:
            raise InvalidResizeError("left edge would pass the right edge")
        return Rect(CellCoord(target_line, rect.top), rect.right - target_line + 1, rect.height)
    if edge is Edge.RIGHT:
        if target_line < rect.left:
            raise InvalidResizeError("right edge would pass the left edge")
        return Rect(rect.origin, target_line - rect.left + 1, rect.height)
    if edge is Edge.TOP:
        if target_line > rect.bottom:
            raise InvalidResizeError("top edge would pass the bottom edge")
        return Rect(CellCoord(rect.left, target_line), rect.width, rect.bottom - target_line + 1)
    if target_line < rect.top:
        raise InvalidResizeError("bottom edge would pass the top edge")
    return Rect(rect.origin, rect.width, target_line - rect.top + 1)


def resize_object(board: Board, object_id: str, edge: Edge, target_line: int) -> None:
    """Drag one edge of an object to a new line.

    A zero-displacement resize is a no-op (nothing recorded). A real
    resize clears any saved zoom rect, pushes an undo record, and brings
    the object to the front.
    """
    obj = _require(board, object_id)
    new_rect = resized_rect(obj.rect, edge, target_line)
    if new_rect == obj.rect:
        return
    _push_undo(board, UndoKind.RESIZE, obj)
    obj.rect = new_rect
    obj.zoom_saved = None
    _bring_to_front(board, object_id)


def zoom_toggle(board: Board, object_id: str) -> None:
    """Expand an object to the full board, or restore its saved rect.

    Both directions bring the object to the front; neither direction is
    undoable.
    """
    obj = _require(board, object_id)
    if obj.zoom_saved is None:
        obj.zoom_saved = obj.rect
        obj.rect = FULL_BOARD
    else:
        obj.rect = obj.zoom_saved
        obj.zoom_saved = None
    _bring_to_front(board, object_id)


def erase_object(board: Board, object_id: str) -> list[PlaybackCommand]:
    """Remove an object from the board.

    The undo record captures the complete pre-erase object (including an
    active playing flag) and the full prior z-order. Any active playback
    is stopped, and the stop command is returned for delivery.
    """
    obj = _require(board, object_id)
    _push_undo(board, UndoKind.ERASE, obj)
    commands: list[PlaybackCommand] = []
    if obj.playing is not None:
        component = obj.av_channels[obj.playing - 1]
        commands.append(PlaybackCommand(object_id, obj.playing, "stop", component.media_ref))
        obj.playing = None
    del board.objects[object_id]
    board.z_order.remove(object_id)
    return commands


def undo(board: Board) -> bool:
    """Revert the most recent undoable operation.

    Restores the recorded object in full and the complete prior z-order.
    Returns False (board untouched) when the history is empty.
    """
    if not board.undo_stack:
        return False
    record = board.undo_stack.pop()
    board.objects[record.object_id] = record.prior_object.copy()
    board.z_order = list(record.prior_z_order)
    return True


def check_invariants(board: Board) -> list[str]:
    """Structural health check; returns human-readable violations."""
    problems: list[str] = []
    if sorted(board.z_order) != sorted(board.objects):
        problems.append("z_order is not a permutation of the object ids")
    if len(set(board.z_order)) != len(board.z_order):
        problems.append("z_order contains duplicates")
    for oid, obj in board.objects.items():
        if obj.id != oid:
            problems.append(f"{oid}: key does not match object id {obj.id}")
        if len(obj.av_channels) > MAX_CHANNELS:
            problems.append(f"{oid}: more than {MAX_CHANNELS} channels")
        if obj.zoom_saved is not None and obj.rect != FULL_BOARD:
            problems.append(f"{oid}: zoom saved but rect is not the full board")
        if obj.playing is not None and not (1 <= obj.playing <= len(obj.av_channels)):
            problems.append(f"{oid}: playing channel {obj.playing} does not exist")
    if board.pending is not None and board.pending.object_id not in board.objects:
        problems.append("pending gesture references a missing object")
    return problems
