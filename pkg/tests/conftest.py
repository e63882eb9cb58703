"""Shared test helpers: quick board/manifest/event construction."""

from __future__ import annotations

from pathlib import Path

import pytest

from storygrid.gesture import Phase, TokenEvent, TokenKind
from storygrid.model import AvComponent, AvKind, Board, CellCoord, MediaObject, Rect
from storygrid.persist import (
    LayoutEntry,
    LayoutSnapshot,
    ManifestObject,
    PosterManifest,
    load_poster,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def rect(col: int, row: int, w: int, h: int) -> Rect:
    return Rect(CellCoord(col, row), w, h)


def channels(n: int, ref: str = "clip") -> tuple[AvComponent, ...]:
    kinds = (AvKind.AUDIO, AvKind.VIDEO)
    return tuple(AvComponent(kinds[i % 2], f"media/{ref}{i + 1}.mp4") for i in range(n))


def make_object(oid: str, r: Rect, n_channels: int = 0) -> MediaObject:
    return MediaObject(
        id=oid, image_ref=f"media/{oid}.png", rect=r, av_channels=channels(n_channels, oid)
    )


def make_board(*objects: MediaObject, poster_id: str = "test-poster") -> Board:
    board = Board(poster_id=poster_id)
    for obj in objects:
        board.objects[obj.id] = obj
        board.z_order.append(obj.id)
    return board


def make_manifest(
    specs: list[tuple[str, int]],
    layout: list[tuple[str, Rect]] | None = None,
    poster_id: str = "test-poster",
) -> PosterManifest:
    """specs: (object id, channel count) pairs; layout: optional placements."""
    objects = tuple(
        ManifestObject(oid, f"media/{oid}.png", channels(n, oid)) for oid, n in specs
    )
    initial = None
    if layout is not None:
        initial = LayoutSnapshot("start", tuple(LayoutEntry(oid, r) for oid, r in layout))
    return PosterManifest(poster_id, "test poster", objects, initial)


def loaded_board(
    specs: list[tuple[str, int]], layout: list[tuple[str, Rect]] | None = None
) -> Board:
    return load_poster(make_manifest(specs, layout))


def place(token: TokenKind, col: int, row: int, ts: int = 0) -> TokenEvent:
    return TokenEvent(ts, token, Phase.PLACED, CellCoord(col, row))


def lift(token: TokenKind, col: int, row: int, ts: int = 0) -> TokenEvent:
    return TokenEvent(ts, token, Phase.LIFTED, CellCoord(col, row))


@pytest.fixture(scope="session")
def fixture_poster_path() -> Path:
    return FIXTURES / "demo_poster.json"


@pytest.fixture(scope="session")
def fixture_log_path() -> Path:
    return FIXTURES / "demo_session.jsonl"
