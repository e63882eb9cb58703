"""Acceptance suite.

Each test exercises one headline guarantee of the engine end to end and
prints a single ``[criterion-N] PASS``/``FAIL`` line so the run report
reads as a checklist:

1. token-share percentages for the bundled reference session
2. pace statistics (active time, mean interval) for that session
3. the 23-object poster loads cleanly and replays fast
4. undo restores the exact prior board after any successful edit
5. exhaustive resize sweep against an independent oracle
6. seeded replay is byte-for-byte deterministic, with exact behaviour
   at drop probabilities 0 and 1
7. lossless round-trips for posters and layout snapshots
"""

from __future__ import annotations

import contextlib
import copy
import itertools
import random
import time

import pytest

from storygrid.devlog import parse_log, replay
from storygrid.gesture import Phase, TokenEvent, TokenKind, consume
from storygrid.model import (
    CellCoord,
    Edge,
    Rect,
    check_invariants,
    erase_object,
    move_object,
    resize_object,
    resized_rect,
    undo,
    zoom_toggle,
)
from storygrid.cli import main
from storygrid.errors import InvalidResizeError
from storygrid.persist import (
    load_poster,
    parse_manifest,
    parse_snapshot,
    restore_layout,
    save_layout,
    serialize_manifest,
    serialize_snapshot,
    board_to_dict,
)
from storygrid.playback import play, stop

from conftest import make_board, make_manifest, make_object, rect

EXPECTED_PERCENTS = {
    "Eraser": 6,
    "Mover": 32,
    "Player1": 12,
    "Player2": 12,
    "Resizer": 19,
    "Stopper": 6,
    "Undoer": 2,
    "Zoomer": 11,
}


@contextlib.contextmanager
def criterion(capsys, number: int, label: str):
    try:
        yield
    except BaseException:
        with capsys.disabled():
            print(f"[criterion-{number}] FAIL — {label}")
        raise
    with capsys.disabled():
        print(f"[criterion-{number}] PASS — {label}")


@pytest.fixture(scope="module")
def reference(fixture_poster_path, fixture_log_path):
    manifest = parse_manifest(fixture_poster_path.read_text(encoding="utf-8"))
    events = parse_log(fixture_log_path.read_text(encoding="utf-8"))
    return manifest, events


def test_token_share_percentages_match_reference_session(reference, capsys):
    with criterion(capsys, 1, "token shares are 6/32/12/12/19/6/2/11 percent"):
        manifest, events = reference
        summary = replay(manifest, events).summary
        percents = {kind.value: tally.percent for kind, tally in summary.per_token.items()}
        assert percents == EXPECTED_PERCENTS
        assert summary.total_ops == 314


def test_session_pace_statistics(reference, capsys):
    with criterion(capsys, 2, "active time 3720 s, mean interval 11.8 s ± 0.1"):
        manifest, events = reference
        summary = replay(manifest, events).summary
        assert summary.active_seconds == 3720.0
        assert summary.mean_interval_s == pytest.approx(11.8, abs=0.1)


def test_reference_poster_loads_and_replays_quickly(reference, capsys):
    with criterion(capsys, 3, "23-object poster loads; full replay under 1 s"):
        manifest, events = reference
        assert len(manifest.objects) == 23
        board = load_poster(manifest)
        assert check_invariants(board) == []
        assert len(board.objects) == 23

        started = time.perf_counter()
        result = replay(manifest, events)
        elapsed = time.perf_counter() - started
        assert check_invariants(result.board) == []
        assert elapsed < 1.0, f"replay took {elapsed:.3f} s"


def _random_reachable_board(rng: random.Random):
    """Build a board purely through public operations so every state is live."""
    n = rng.randint(4, 9)
    specs = [(f"obj{i}", rng.randint(0, 2)) for i in range(n)]
    layout = []
    for i in range(n):
        w, h = rng.randint(1, 4), rng.randint(1, 3)
        layout.append((f"obj{i}", rect(rng.randint(0, 8 - w), rng.randint(0, 8 - h), w, h)))
    board = load_poster(make_manifest(specs, layout))
    for _ in range(rng.randint(0, 6)):
        _apply_random_setup_op(board, rng)
    return board


def _apply_random_setup_op(board, rng: random.Random) -> None:
    ids = list(board.objects)
    if not ids:
        return
    oid = rng.choice(ids)
    obj = board.objects[oid]
    op = rng.choice(["move", "play", "stop", "zoom"])
    if op == "move":
        col = rng.randint(0, 8 - obj.rect.width)
        row = rng.randint(0, 8 - obj.rect.height)
        move_object(board, oid, CellCoord(col, row))
    elif op == "play" and obj.av_channels:
        play(board, oid, rng.randint(1, len(obj.av_channels)))
    elif op == "stop":
        stop(board, oid)
    elif op == "zoom":
        zoom_toggle(board, oid)


def _perform_random_edit(board, rng: random.Random) -> bool:
    """Apply one successful move/resize/erase; return False if none possible."""
    ids = list(board.objects)
    if not ids:
        return False
    for _ in range(30):
        oid = rng.choice(ids)
        obj = board.objects[oid]
        kind = rng.choice(["move", "resize", "erase"])
        if kind == "move":
            col = rng.randint(0, 8 - obj.rect.width)
            row = rng.randint(0, 8 - obj.rect.height)
            if (col, row) == (obj.rect.left, obj.rect.top):
                continue
            move_object(board, oid, CellCoord(col, row))
            return True
        if kind == "resize":
            edge = rng.choice(list(Edge))
            line = rng.randint(0, 7)
            if line == obj.rect.edge_line(edge):
                continue
            try:
                resized_rect(obj.rect, edge, line)
            except InvalidResizeError:
                continue
            resize_object(board, oid, edge, line)
            return True
        erase_object(board, oid)
        return True
    return False


def test_undo_restores_exact_prior_board_after_every_edit(capsys):
    with criterion(capsys, 4, "undo exactly reverses 1000 randomized edits"):
        rng = random.Random(4242)
        performed = 0
        while performed < 1000:
            board = _random_reachable_board(rng)
            for _ in range(20):
                before_objects = copy.deepcopy(board.objects)
                before_z = list(board.z_order)
                before_depth = len(board.undo_stack)
                if not _perform_random_edit(board, rng):
                    break
                assert undo(board) is True
                assert board.objects == before_objects
                assert board.z_order == before_z
                assert len(board.undo_stack) == before_depth
                assert check_invariants(board) == []
                performed += 1
                _apply_random_setup_op(board, rng)
        assert performed >= 1000


# --- criterion 5: independent resize oracle ---------------------------------

_EDGES = ("left", "right", "top", "bottom")


def _oracle_edges_at(r: tuple[int, int, int, int], cell: tuple[int, int]):
    col0, row0, w, h = r
    col, row = cell
    if not (col0 <= col < col0 + w and row0 <= row < row0 + h):
        return None  # not on the object at all
    found = []
    if col == col0:
        found.append("left")
    if col == col0 + w - 1:
        found.append("right")
    if row == row0:
        found.append("top")
    if row == row0 + h - 1:
        found.append("bottom")
    return tuple(found)


def _oracle_resized(r: tuple[int, int, int, int], edge: str, line: int):
    col0, row0, w, h = r
    left, right, top, bottom = col0, col0 + w - 1, row0, row0 + h - 1
    if edge == "left":
        if line > right:
            return None
        return (line, row0, right - line + 1, h)
    if edge == "right":
        if line < left:
            return None
        return (col0, row0, line - left + 1, h)
    if edge == "top":
        if line > bottom:
            return None
        return (col0, line, w, bottom - line + 1)
    if line < top:
        return None
    return (col0, row0, w, line - top + 1)


def _oracle_run(start: tuple[int, int, int, int], cells):
    """Replay the four-event resize gesture from the written rules alone."""
    rect_now = start
    pending_edges = None
    signals: list[str] = []
    completed = 0
    for phase, cell in cells:
        if phase != "placed":
            continue
        if pending_edges is None:
            edges = _oracle_edges_at(rect_now, cell)
            if edges is None:
                signals.append("NotOnObject")
            elif not edges:
                signals.append("NotOnBorder")
            else:
                pending_edges = edges
            continue
        candidates = []
        for edge in pending_edges:
            line = cell[0] if edge in ("left", "right") else cell[1]
            resized = _oracle_resized(rect_now, edge, line)
            if resized is None:
                continue
            current = {
                "left": rect_now[0],
                "right": rect_now[0] + rect_now[2] - 1,
                "top": rect_now[1],
                "bottom": rect_now[1] + rect_now[3] - 1,
            }[edge]
            candidates.append((abs(line - current), resized))
        pending_edges = None
        if not candidates:
            signals.append("InvalidResizeTarget")
            continue
        best_disp, best_rect = candidates[0]
        for disp, r in candidates[1:]:
            if disp > best_disp:
                best_disp, best_rect = disp, r
        completed += 1
        if best_disp == 0:
            signals.append("OpCompleted")
        else:
            rect_now = best_rect
    return rect_now, signals, completed, pending_edges is not None


def test_resize_gesture_matches_independent_oracle_exhaustively(capsys):
    with criterion(
        capsys, 5, "resize sweep: all sizes x all 4096 placement pairs match oracle"
    ):
        cells = list(itertools.product(range(8), range(8)))
        for w, h in itertools.product(range(1, 9), range(1, 9)):
            start = (0, 0, w, h)
            for c1 in cells:
                template = make_board(make_object("solo", Rect(CellCoord(0, 0), w, h)))
                first = [
                    TokenEvent(1000, TokenKind.RESIZER, Phase.PLACED, CellCoord(*c1)),
                    TokenEvent(1100, TokenKind.RESIZER, Phase.LIFTED, CellCoord(*c1)),
                ]
                first_results = [consume(template, e) for e in first]
                for c2 in cells:
                    board = copy.deepcopy(template)
                    rest = [
                        TokenEvent(1200, TokenKind.RESIZER, Phase.PLACED, CellCoord(*c2)),
                        TokenEvent(1300, TokenKind.RESIZER, Phase.LIFTED, CellCoord(*c2)),
                    ]
                    results = first_results + [consume(board, e) for e in rest]
                    got_rect = board.objects["solo"].rect
                    got = (
                        (got_rect.left, got_rect.top, got_rect.width, got_rect.height),
                        [s.code.value for r in results for s in r.signals],
                        sum(1 for r in results if r.completed),
                        board.pending is not None,
                    )
                    want = _oracle_run(start, [("placed", c1), ("lifted", c1), ("placed", c2), ("lifted", c2)])
                    assert got == (want[0], want[1], want[2], want[3]), (
                        f"start={start} c1={c1} c2={c2}: engine {got} oracle {want}"
                    )


def test_seeded_replay_is_byte_identical_and_probability_extremes_hold(
    reference, fixture_poster_path, fixture_log_path, tmp_path, capsys
):
    with criterion(
        capsys, 6, "same seed gives identical files; drop prob 0 and 1 behave exactly"
    ):
        manifest, events = reference
        outputs = []
        for run in ("a", "b"):
            out = tmp_path / f"{run}.json"
            stats = tmp_path / f"{run}.stats.json"
            code = main(
                [
                    "replay",
                    "--poster",
                    str(fixture_poster_path),
                    "--log",
                    str(fixture_log_path),
                    "--seed",
                    "99",
                    "--dead-spot-prob",
                    "0.35",
                    "--out",
                    str(out),
                    "--stats",
                    str(stats),
                ]
            )
            assert code == 0
            outputs.append(out.read_bytes() + stats.read_bytes())
        assert outputs[0] == outputs[1]

        keep_all = replay(manifest, events, seed=5, dead_spot_prob=0.0)
        plain = replay(manifest, events)
        assert keep_all.summary.total_ops == plain.summary.total_ops == 314
        assert board_to_dict(keep_all.board) == board_to_dict(plain.board)
        assert not any(step.dropped for step in keep_all.steps)

        drop_all = replay(manifest, events, seed=5, dead_spot_prob=1.0)
        assert drop_all.summary.total_ops == 0
        assert board_to_dict(drop_all.board) == board_to_dict(load_poster(manifest))
        placed = [s for s in drop_all.steps if s.event.phase is Phase.PLACED]
        assert placed and all(step.dropped for step in placed)


def test_poster_and_snapshot_round_trips_are_lossless(reference, capsys):
    with criterion(capsys, 7, "poster/layout serialization round-trips exactly"):
        manifest, events = reference
        assert parse_manifest(serialize_manifest(manifest)) == manifest

        board = replay(manifest, events, seed=3, dead_spot_prob=0.1).board
        snapshot = save_layout(board, "checkpoint")
        assert parse_snapshot(serialize_snapshot(snapshot)) == snapshot

        arranged = board_to_dict(board)
        scrambled = replay(manifest, events[: len(events) // 2]).board
        restore_layout(scrambled, snapshot)
        restored = board_to_dict(scrambled)
        for entry, obj in zip(snapshot.entries, restored["objects"]):
            assert entry.object_id == obj["id"]
        assert [o["rect"] for o in restored["objects"]] == [
            o["rect"] for o in arranged["objects"]
        ]
