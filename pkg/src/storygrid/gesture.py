"""The token gesture grammar.

Physical control tokens are placed on and lifted from grid cells; this
module turns that event stream into board operations. Most tokens act
with a single placement on the frontmost object under the cell. Two
tokens need a pair of placements and park a pending gesture on the
board in between:

* Mover: first placement grabs an object and remembers which cell of the
  object was touched (the anchor). The second placement puts that same
  relative cell at the new location, so the object keeps its grip point.
* Resizer: first placement must land on the object's border ring and
  nominates the edge(s) under the cell. The second placement drags the
  winning edge to the placed column/row.

Placing any *different* token kind while a gesture is pending cancels
the pending gesture first, then the new placement is interpreted as
usual. Lift events never touch board state; they only feed presence
tracking for display.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from . import model, playback
from .errors import InvalidResizeError
from .model import Board, CellCoord, Edge
from .playback import PlaybackCommand
from .signals import Signal, SignalCode


class TokenKind(str, Enum):
    MOVER = "Mover"
    RESIZER = "Resizer"
    PLAYER1 = "Player1"
    PLAYER2 = "Player2"
    STOPPER = "Stopper"
    UNDOER = "Undoer"
    ZOOMER = "Zoomer"
    ERASER = "Eraser"


class Phase(str, Enum):
    PLACED = "placed"
    LIFTED = "lifted"


@dataclass(frozen=True)
class TokenEvent:
    ts_ms: int
    token: TokenKind
    phase: Phase
    cell: CellCoord

    def to_dict(self) -> dict:
        return {
            "ts_ms": self.ts_ms,
            "token": self.token.value,
            "phase": self.phase.value,
            "col": self.cell.col,
            "row": self.cell.row,
        }


class PendingKind(str, Enum):
    MOVE = "move_awaiting_target"
    RESIZE = "resize_awaiting_target"


@dataclass
class PendingGesture:
    kind: PendingKind
    object_id: str
    # Mover: (dcol, drow) of the grabbed cell relative to the rect origin.
    anchor: tuple[int, int] | None = None
    # Resizer: edges nominated by the first placement, in priority order.
    candidate_edges: tuple[Edge, ...] = ()

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "object_id": self.object_id}


@dataclass(frozen=True)
class CompletedOp:
    """One finished gesture, as counted by usage analytics."""

    token: TokenKind
    ts_ms: int


@dataclass
class ConsumeResult:
    signals: list[Signal] = field(default_factory=list)
    commands: list[PlaybackCommand] = field(default_factory=list)
    completed: CompletedOp | None = None


_PLAYER_CHANNEL = {TokenKind.PLAYER1: 1, TokenKind.PLAYER2: 2}

_PENDING_TOKEN = {PendingKind.MOVE: TokenKind.MOVER, PendingKind.RESIZE: TokenKind.RESIZER}


def consume(board: Board, event: TokenEvent) -> ConsumeResult:
    """Apply one token event to the board.

    Mutates the board in place and reports what happened: signals for
    feedback, playback commands for clients, and a completed-op
    descriptor whenever a gesture finished (including sanctioned
    no-ops such as a zero-displacement move).
    """
    result = ConsumeResult()
    if event.phase is Phase.LIFTED:
        return result

    if board.pending is not None and event.token is not _PENDING_TOKEN[board.pending.kind]:
        cancelled = board.pending
        board.pending = None
        result.signals.append(
            Signal(SignalCode.GESTURE_CANCELLED, f"{cancelled.kind.value} on {cancelled.object_id}")
        )

    if board.pending is not None:
        if board.pending.kind is PendingKind.MOVE:
            _finish_move(board, event, result)
        else:
            _finish_resize(board, event, result)
        return result

    handler = _HANDLERS[event.token]
    handler(board, event, result)
    return result


def _finish_move(board: Board, event: TokenEvent, result: ConsumeResult) -> None:
    pending = board.pending
    obj = board.objects[pending.object_id]
    dcol, drow = pending.anchor
    col = event.cell.col - dcol
    row = event.cell.row - drow
    if not (
        0 <= col
        and col + obj.rect.width <= model.BOARD_SIZE
        and 0 <= row
        and row + obj.rect.height <= model.BOARD_SIZE
    ):
        # Invalid destination: stay pending so the next placement can retry.
        result.signals.append(
            Signal(SignalCode.DESTINATION_OUT_OF_BOUNDS, f"origin would be ({col}, {row})")
        )
        return
    board.pending = None
    new_origin = CellCoord(col, row)
    if new_origin == obj.rect.origin:
        result.signals.append(Signal(SignalCode.OP_COMPLETED, "no displacement"))
    else:
        model.move_object(board, obj.id, new_origin)
    result.completed = CompletedOp(TokenKind.MOVER, event.ts_ms)


def _finish_resize(board: Board, event: TokenEvent, result: ConsumeResult) -> None:
    pending = board.pending
    board.pending = None
    obj = board.objects[pending.object_id]
    rect = obj.rect
    any_valid = False
    best: tuple[int, Edge, int] | None = None  # (displacement, edge, target_line)
    for edge in pending.candidate_edges:
        target_line = event.cell.col if edge in (Edge.LEFT, Edge.RIGHT) else event.cell.row
        try:
            model.resized_rect(rect, edge, target_line)
        except InvalidResizeError:
            continue
        any_valid = True
        displacement = abs(target_line - rect.edge_line(edge))
        # Candidates arrive in priority order, so strict > keeps the
        # highest-priority edge on ties.
        if displacement > 0 and (best is None or displacement > best[0]):
            best = (displacement, edge, target_line)
    if not any_valid:
        result.signals.append(
            Signal(SignalCode.INVALID_RESIZE_TARGET, f"no edge of {obj.id} can reach that line")
        )
        return
    if best is None:
        result.signals.append(Signal(SignalCode.OP_COMPLETED, "no displacement"))
    else:
        model.resize_object(board, obj.id, best[1], best[2])
    result.completed = CompletedOp(TokenKind.RESIZER, event.ts_ms)


def _start_move(board: Board, event: TokenEvent, result: ConsumeResult) -> None:
    oid = model.topmost_at(board, event.cell)
    if oid is None:
        result.signals.append(_not_on_object(event.cell))
        return
    rect = board.objects[oid].rect
    board.pending = PendingGesture(
        PendingKind.MOVE,
        oid,
        anchor=(event.cell.col - rect.left, event.cell.row - rect.top),
    )


def _start_resize(board: Board, event: TokenEvent, result: ConsumeResult) -> None:
    oid = model.topmost_at(board, event.cell)
    if oid is None:
        result.signals.append(_not_on_object(event.cell))
        return
    edges = board.objects[oid].rect.edges_at(event.cell)
    if not edges:
        result.signals.append(Signal(SignalCode.NOT_ON_BORDER, f"interior of {oid}"))
        return
    board.pending = PendingGesture(PendingKind.RESIZE, oid, candidate_edges=edges)


def _play(board: Board, event: TokenEvent, result: ConsumeResult) -> None:
    oid = model.topmost_at(board, event.cell)
    if oid is None:
        result.signals.append(_not_on_object(event.cell))
        return
    commands, signals = playback.play(board, oid, _PLAYER_CHANNEL[event.token])
    result.commands.extend(commands)
    result.signals.extend(signals)
    if commands:
        result.completed = CompletedOp(event.token, event.ts_ms)


def _stop(board: Board, event: TokenEvent, result: ConsumeResult) -> None:
    # On an object: stop that object. On an empty cell: stop everything.
    oid = model.topmost_at(board, event.cell)
    commands, signals = playback.stop(board, oid)
    result.commands.extend(commands)
    result.signals.extend(signals)
    if commands:
        result.completed = CompletedOp(TokenKind.STOPPER, event.ts_ms)


def _zoom(board: Board, event: TokenEvent, result: ConsumeResult) -> None:
    oid = model.topmost_at(board, event.cell)
    if oid is None:
        result.signals.append(_not_on_object(event.cell))
        return
    model.zoom_toggle(board, oid)
    result.completed = CompletedOp(TokenKind.ZOOMER, event.ts_ms)


def _erase(board: Board, event: TokenEvent, result: ConsumeResult) -> None:
    oid = model.topmost_at(board, event.cell)
    if oid is None:
        result.signals.append(_not_on_object(event.cell))
        return
    result.commands.extend(model.erase_object(board, oid))
    result.completed = CompletedOp(TokenKind.ERASER, event.ts_ms)


def _undo(board: Board, event: TokenEvent, result: ConsumeResult) -> None:
    if model.undo(board):
        result.completed = CompletedOp(TokenKind.UNDOER, event.ts_ms)
    else:
        result.signals.append(Signal(SignalCode.EMPTY_UNDO, "nothing to undo"))


def _not_on_object(cell: CellCoord) -> Signal:
    return Signal(SignalCode.NOT_ON_OBJECT, f"no object at ({cell.col}, {cell.row})")


_HANDLERS = {
    TokenKind.MOVER: _start_move,
    TokenKind.RESIZER: _start_resize,
    TokenKind.PLAYER1: _play,
    TokenKind.PLAYER2: _play,
    TokenKind.STOPPER: _stop,
    TokenKind.UNDOER: _undo,
    TokenKind.ZOOMER: _zoom,
    TokenKind.ERASER: _erase,
}


class PresenceTracker:
    """Which physical token currently rests on which cell.

    Pure display state for clients; placements overwrite, lifts clear.
    """

    def __init__(self) -> None:
        self._resting: dict[TokenKind, CellCoord] = {}

    def update(self, event: TokenEvent) -> None:
        if event.phase is Phase.PLACED:
            self._resting[event.token] = event.cell
        else:
            self._resting.pop(event.token, None)

    def to_dict(self) -> dict:
        return {
            token.value: {"col": cell.col, "row": cell.row}
            for token, cell in sorted(self._resting.items(), key=lambda kv: kv[0].value)
        }
