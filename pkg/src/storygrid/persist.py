"""Poster manifests, layout snapshots, and their JSON documents.

Two document kinds, both UTF-8 JSON:

poster.json (manifest) declares the media roster and an optional
starting arrangement::

    {
      "poster_id": "p1",
      "title": "...",
      "objects": [
        {"id": "a", "image_ref": "media/a.png",
         "av_channels": [{"kind": "audio", "media_ref": "media/a.mp3"}]}
      ],
      "initial_layout": { ...layout.json shape... }
    }

layout.json (snapshot) captures an arrangement; entries run back-to-front
in z-order::

    {
      "name": "scene-1",
      "entries": [
        {"object_id": "a", "rect": {"col": 0, "row": 0, "w": 2, "h": 2},
         "zoomed": {"col": 1, "row": 1, "w": 2, "h": 2}}
      ]
    }

"zoomed" appears only while an object is expanded to the full board and
holds the rect that a zoom toggle will restore. Serialization is
canonical: manifest objects sorted by id, snapshot entries in z-order,
keys sorted, two-space indent. parse(serialize(x)) == x.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import playback
from .errors import (
    DanglingLayoutRefError,
    DuplicateIdError,
    InvalidCellError,
    ManifestSyntaxError,
    OutOfBoundsError,
    TooManyChannelsError,
    UnknownSnapshotObjectError,
)
from .model import (
    BOARD_SIZE,
    FULL_BOARD,
    MAX_CHANNELS,
    AvComponent,
    AvKind,
    Board,
    CellCoord,
    MediaObject,
    Rect,
)
from .playback import PlaybackCommand


@dataclass(frozen=True)
class ManifestObject:
    id: str
    image_ref: str
    av_channels: tuple[AvComponent, ...] = ()


@dataclass(frozen=True)
class LayoutEntry:
    object_id: str
    rect: Rect
    zoomed: Rect | None = None


@dataclass(frozen=True)
class LayoutSnapshot:
    name: str
    entries: tuple[LayoutEntry, ...] = ()


@dataclass(frozen=True)
class PosterManifest:
    poster_id: str
    title: str
    objects: tuple[ManifestObject, ...] = ()
    initial_layout: LayoutSnapshot | None = None


def rect_to_dict(rect: Rect) -> dict:
    return {"col": rect.origin.col, "row": rect.origin.row, "w": rect.width, "h": rect.height}


def _rect_from_dict(data: object, where: str) -> Rect:
    if not isinstance(data, dict):
        raise ManifestSyntaxError(f"{where}: rect must be an object")
    extra = set(data) - {"col", "row", "w", "h"}
    if extra:
        raise ManifestSyntaxError(f"{where}: unknown rect keys {sorted(extra)}")
    try:
        col, row, w, h = (int(data[k]) for k in ("col", "row", "w", "h"))
    except (KeyError, TypeError, ValueError) as exc:
        raise ManifestSyntaxError(f"{where}: rect needs integer col/row/w/h") from exc
    try:
        return Rect(CellCoord(col, row), w, h)
    except (InvalidCellError, OutOfBoundsError) as exc:
        raise ManifestSyntaxError(f"{where}: {exc}") from exc


def _require_str(data: dict, key: str, where: str) -> str:
    value = data.get(key)
    if not isinstance(value, str) or not value:
        raise ManifestSyntaxError(f"{where}: '{key}' must be a non-empty string")
    return value


# -- snapshots ---------------------------------------------------------------


def snapshot_to_dict(snapshot: LayoutSnapshot) -> dict:
    entries = []
    for entry in snapshot.entries:
        item: dict = {"object_id": entry.object_id, "rect": rect_to_dict(entry.rect)}
        if entry.zoomed is not None:
            item["zoomed"] = rect_to_dict(entry.zoomed)
        entries.append(item)
    return {"name": snapshot.name, "entries": entries}


def snapshot_from_dict(data: object, where: str = "snapshot") -> LayoutSnapshot:
    if not isinstance(data, dict):
        raise ManifestSyntaxError(f"{where}: must be a JSON object")
    name = _require_str(data, "name", where)
    raw_entries = data.get("entries", [])
    if not isinstance(raw_entries, list):
        raise ManifestSyntaxError(f"{where}: 'entries' must be a list")
    entries = []
    seen: set[str] = set()
    for i, raw in enumerate(raw_entries):
        spot = f"{where} entry {i}"
        if not isinstance(raw, dict):
            raise ManifestSyntaxError(f"{spot}: must be an object")
        object_id = _require_str(raw, "object_id", spot)
        if object_id in seen:
            raise DuplicateIdError(f"{spot}: duplicate object_id '{object_id}'")
        seen.add(object_id)
        rect = _rect_from_dict(raw.get("rect"), spot)
        zoomed = None
        if raw.get("zoomed") is not None:
            zoomed = _rect_from_dict(raw["zoomed"], spot)
            if rect != FULL_BOARD:
                raise ManifestSyntaxError(
                    f"{spot}: 'zoomed' requires a full-board rect"
                )
        entries.append(LayoutEntry(object_id, rect, zoomed))
    return LayoutSnapshot(name, tuple(entries))


def serialize_snapshot(snapshot: LayoutSnapshot) -> str:
    return json.dumps(snapshot_to_dict(snapshot), indent=2, sort_keys=True) + "\n"


def parse_snapshot(text: str) -> LayoutSnapshot:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestSyntaxError(f"snapshot: invalid JSON: {exc}") from exc
    return snapshot_from_dict(data)


# -- manifests ---------------------------------------------------------------


def manifest_to_dict(manifest: PosterManifest) -> dict:
    objects = []
    for obj in sorted(manifest.objects, key=lambda o: o.id):
        objects.append(
            {
                "id": obj.id,
                "image_ref": obj.image_ref,
                "av_channels": [
                    {"kind": comp.kind.value, "media_ref": comp.media_ref}
                    for comp in obj.av_channels
                ],
            }
        )
    data: dict = {"poster_id": manifest.poster_id, "title": manifest.title, "objects": objects}
    if manifest.initial_layout is not None:
        data["initial_layout"] = snapshot_to_dict(manifest.initial_layout)
    return data


def manifest_from_dict(data: object) -> PosterManifest:
    if not isinstance(data, dict):
        raise ManifestSyntaxError("manifest: must be a JSON object")
    poster_id = _require_str(data, "poster_id", "manifest")
    title = data.get("title", "")
    if not isinstance(title, str):
        raise ManifestSyntaxError("manifest: 'title' must be a string")
    raw_objects = data.get("objects", [])
    if not isinstance(raw_objects, list):
        raise ManifestSyntaxError("manifest: 'objects' must be a list")
    objects = []
    seen: set[str] = set()
    for i, raw in enumerate(raw_objects):
        spot = f"object {i}"
        if not isinstance(raw, dict):
            raise ManifestSyntaxError(f"{spot}: must be an object")
        object_id = _require_str(raw, "id", spot)
        if object_id in seen:
            raise DuplicateIdError(f"duplicate object id '{object_id}'")
        seen.add(object_id)
        image_ref = _require_str(raw, "image_ref", spot)
        raw_channels = raw.get("av_channels", [])
        if not isinstance(raw_channels, list):
            raise ManifestSyntaxError(f"{spot}: 'av_channels' must be a list")
        if len(raw_channels) > MAX_CHANNELS:
            raise TooManyChannelsError(
                f"object '{object_id}' declares {len(raw_channels)} channels (max {MAX_CHANNELS})"
            )
        channels = []
        for j, raw_comp in enumerate(raw_channels):
            if not isinstance(raw_comp, dict):
                raise ManifestSyntaxError(f"{spot} channel {j}: must be an object")
            kind = raw_comp.get("kind")
            if kind not in (AvKind.AUDIO.value, AvKind.VIDEO.value):
                raise ManifestSyntaxError(f"{spot} channel {j}: kind must be audio or video")
            channels.append(AvComponent(AvKind(kind), _require_str(raw_comp, "media_ref", spot)))
        objects.append(ManifestObject(object_id, image_ref, tuple(channels)))

    initial_layout = None
    if data.get("initial_layout") is not None:
        initial_layout = snapshot_from_dict(data["initial_layout"], "initial_layout")
        for entry in initial_layout.entries:
            if entry.object_id not in seen:
                raise DanglingLayoutRefError(
                    f"initial_layout references undeclared object '{entry.object_id}'"
                )
    return PosterManifest(poster_id, title, tuple(objects), initial_layout)


def serialize_manifest(manifest: PosterManifest) -> str:
    return json.dumps(manifest_to_dict(manifest), indent=2, sort_keys=True) + "\n"


def parse_manifest(text: str) -> PosterManifest:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestSyntaxError(f"manifest: invalid JSON: {exc}") from exc
    return manifest_from_dict(data)


# -- boards ------------------------------------------------------------------


def _materialize(proto: ManifestObject, rect: Rect, zoomed: Rect | None = None) -> MediaObject:
    return MediaObject(
        id=proto.id,
        image_ref=proto.image_ref,
        rect=rect,
        av_channels=proto.av_channels,
        zoom_saved=zoomed,
    )


def load_poster(manifest: PosterManifest) -> Board:
    """Build the starting board for a poster.

    With an initial layout, the arrangement is realized exactly (objects
    missing from the layout start off-board). Without one, objects are
    auto-placed as 1x1 tiles row-major from (0, 0) in declaration order;
    only the first 64 fit, the rest stay off-board (see off_board_ids).
    """
    board = Board(poster_id=manifest.poster_id, manifest=manifest)
    roster = {obj.id: obj for obj in manifest.objects}
    if manifest.initial_layout is not None:
        for entry in manifest.initial_layout.entries:
            obj = _materialize(roster[entry.object_id], entry.rect, entry.zoomed)
            board.objects[obj.id] = obj
            board.z_order.append(obj.id)
        return board
    for index, proto in enumerate(manifest.objects):
        if index >= BOARD_SIZE * BOARD_SIZE:
            break
        rect = Rect(CellCoord(index % BOARD_SIZE, index // BOARD_SIZE), 1, 1)
        board.objects[proto.id] = _materialize(proto, rect)
        board.z_order.append(proto.id)
    return board


def off_board_ids(board: Board) -> list[str]:
    """Declared objects not currently placed, in declaration order."""
    if board.manifest is None:
        return []
    return [obj.id for obj in board.manifest.objects if obj.id not in board.objects]


def save_layout(board: Board, name: str) -> LayoutSnapshot:
    """Capture the current arrangement, back-to-front."""
    entries = []
    for oid in board.z_order:
        obj = board.objects[oid]
        entries.append(LayoutEntry(oid, obj.rect, obj.zoom_saved))
    return LayoutSnapshot(name, tuple(entries))


def restore_layout(board: Board, snapshot: LayoutSnapshot) -> list[PlaybackCommand]:
    """Replace the arrangement with a saved one.

    Validates every entry first (unknown ids leave the board untouched),
    then stops all playback (returning the stop commands), rebuilds the
    on-board object set from the poster roster, clears the undo history,
    and drops any pending gesture. Objects absent from the snapshot end
    up off-board.
    """
    roster = {obj.id: obj for obj in board.manifest.objects} if board.manifest else {}
    protos: dict[str, ManifestObject] = {}
    for entry in snapshot.entries:
        proto = roster.get(entry.object_id)
        if proto is None:
            current = board.objects.get(entry.object_id)
            if current is None:
                raise UnknownSnapshotObjectError(
                    f"snapshot references unknown object '{entry.object_id}'"
                )
            proto = ManifestObject(current.id, current.image_ref, current.av_channels)
        protos[entry.object_id] = proto

    commands, _ = playback.stop(board, None)
    board.objects = {}
    board.z_order = []
    for entry in snapshot.entries:
        obj = _materialize(protos[entry.object_id], entry.rect, entry.zoomed)
        board.objects[obj.id] = obj
        board.z_order.append(obj.id)
    board.undo_stack = []
    board.pending = None
    return commands


def board_to_dict(board: Board) -> dict:
    """Canonical full-board snapshot; objects listed back-to-front."""
    objects = []
    for oid in board.z_order:
        obj = board.objects[oid]
        objects.append(
            {
                "id": obj.id,
                "image_ref": obj.image_ref,
                "av_channels": [
                    {"kind": comp.kind.value, "media_ref": comp.media_ref}
                    for comp in obj.av_channels
                ],
                "rect": rect_to_dict(obj.rect),
                "zoom_saved": rect_to_dict(obj.zoom_saved) if obj.zoom_saved else None,
                "playing": obj.playing,
            }
        )
    return {"poster_id": board.poster_id, "objects": objects}
