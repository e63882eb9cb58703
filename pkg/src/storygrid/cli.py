"""Command-line front end.

Subcommands:
  replay    rebuild a session from a poster and an event log
  stats     print the token usage table for a session
  validate  check a poster manifest and its starting board
  serve     run the session server
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import devlog, persist
from .errors import StoryGridError
from .model import check_invariants


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_inputs(poster_path: str, log_path: str):
    manifest = persist.parse_manifest(_read(poster_path))
    events = devlog.parse_log(_read(log_path))
    return manifest, events


def _format_table(summary: devlog.UsageSummary) -> str:
    lines = [f"{'token':<10} {'ops':>5} {'percent':>8}"]
    for kind in sorted(summary.per_token, key=lambda k: k.value):
        tally = summary.per_token[kind]
        lines.append(f"{kind.value:<10} {tally.count:>5} {tally.percent:>7}%")
    lines.append(f"{'total':<10} {summary.total_ops:>5}")
    lines.append(f"active time: {summary.active_seconds:.0f} s")
    if summary.mean_interval_s is not None:
        lines.append(f"mean interval: {summary.mean_interval_s:.1f} s per op")
    return "\n".join(lines)


def _cmd_replay(args: argparse.Namespace) -> int:
    manifest, events = _load_inputs(args.poster, args.log)
    result = devlog.replay(
        manifest,
        events,
        seed=args.seed,
        dead_spot_prob=args.dead_spot_prob,
        break_gap_s=args.break_gap,
    )
    dropped = sum(1 for step in result.steps if step.dropped)
    print(
        f"replayed {len(events)} events ({dropped} dropped): "
        f"{result.summary.total_ops} completed ops, "
        f"{len(result.signals)} signals, "
        f"{len(result.board.objects)} objects on board"
    )
    if args.out:
        snapshot = persist.save_layout(result.board, "final")
        Path(args.out).write_text(persist.serialize_snapshot(snapshot), encoding="utf-8")
        print(f"final layout written to {args.out}")
    if args.stats:
        text = json.dumps(result.summary.to_dict(), indent=2, sort_keys=True) + "\n"
        Path(args.stats).write_text(text, encoding="utf-8")
        print(f"usage stats written to {args.stats}")
    return 0


def _cmd_stats(args: argparse.Namespace) -> int:
    manifest, events = _load_inputs(args.poster, args.log)
    result = devlog.replay(manifest, events, break_gap_s=args.break_gap)
    if args.json:
        print(json.dumps(result.summary.to_dict(), indent=2, sort_keys=True))
    else:
        print(_format_table(result.summary))
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    manifest = persist.parse_manifest(_read(args.poster))
    board = persist.load_poster(manifest)
    problems = check_invariants(board)
    if problems:
        for problem in problems:
            print(f"invariant violation: {problem}", file=sys.stderr)
        return 1
    off_board = persist.off_board_ids(board)
    print(
        f"poster '{manifest.poster_id}' ok: {len(manifest.objects)} objects declared, "
        f"{len(board.objects)} on board"
    )
    if off_board:
        print(f"off-board: {', '.join(off_board)}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(data_dir=Path(args.data_dir) if args.data_dir else None)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="storygrid", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    replay = sub.add_parser("replay", help="rebuild a session from an event log")
    replay.add_argument("--poster", required=True, help="poster manifest (poster.json)")
    replay.add_argument("--log", required=True, help="event log (JSON lines)")
    replay.add_argument("--seed", type=int, default=0, help="drop-model seed")
    replay.add_argument(
        "--dead-spot-prob",
        type=float,
        default=0.0,
        help="probability that a placement goes unsensed (0..1)",
    )
    replay.add_argument(
        "--break-gap",
        type=float,
        default=devlog.DEFAULT_BREAK_GAP_S,
        help="gap in seconds treated as a break (default 300)",
    )
    replay.add_argument("--out", help="write the final layout snapshot here")
    replay.add_argument("--stats", help="write the usage summary JSON here")
    replay.set_defaults(func=_cmd_replay)

    stats = sub.add_parser("stats", help="token usage table for a session")
    stats.add_argument("--log", required=True, help="event log (JSON lines)")
    stats.add_argument("--poster", required=True, help="poster manifest the log ran against")
    stats.add_argument(
        "--break-gap",
        type=float,
        default=devlog.DEFAULT_BREAK_GAP_S,
        help="gap in seconds treated as a break (default 300)",
    )
    stats.add_argument("--json", action="store_true", help="emit JSON instead of a table")
    stats.set_defaults(func=_cmd_stats)

    validate = sub.add_parser("validate", help="check a poster manifest")
    validate.add_argument("--poster", required=True, help="poster manifest (poster.json)")
    validate.set_defaults(func=_cmd_validate)

    serve = sub.add_parser("serve", help="run the session server")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--data-dir", help="directory for uploaded posters and saved layouts")
    serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (StoryGridError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
