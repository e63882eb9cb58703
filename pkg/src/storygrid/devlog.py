"""Session event logs: parsing, deterministic replay, usage analytics.

A log is JSON-lines, one token event per line::

    {"ts_ms": 81000, "token": "Mover", "phase": "placed", "col": 3, "row": 4}

Timestamps must be non-decreasing. Replay is a pure function of
(manifest, log, seed, dead_spot_prob): board sensing flakiness is
modeled by dropping each `placed` record independently with probability
dead_spot_prob, drawn from a seeded generator, so a given seed always
drops the same records. Lift records are never dropped.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from json import JSONDecodeError, dumps, loads
from typing import Iterable, Sequence

from .errors import InvalidCellError, LogSyntaxError, NonMonotonicTimestampError
from .gesture import CompletedOp, Phase, TokenEvent, TokenKind, consume
from .model import Board, CellCoord
from .persist import PosterManifest, load_poster
from .signals import Signal

DEFAULT_BREAK_GAP_S = 300.0

_RECORD_KEYS = {"ts_ms", "token", "phase", "col", "row"}


def parse_log(text: str) -> list[TokenEvent]:
    """Parse a JSON-lines event log, enforcing timestamp order."""
    events: list[TokenEvent] = []
    last_ts: int | None = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        where = f"line {lineno}"
        try:
            data = loads(line)
        except JSONDecodeError as exc:
            raise LogSyntaxError(f"{where}: invalid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise LogSyntaxError(f"{where}: record must be an object")
        missing = _RECORD_KEYS - set(data)
        if missing:
            raise LogSyntaxError(f"{where}: missing keys {sorted(missing)}")
        if not isinstance(data["ts_ms"], int):
            raise LogSyntaxError(f"{where}: ts_ms must be an integer")
        try:
            token = TokenKind(data["token"])
            phase = Phase(data["phase"])
        except ValueError as exc:
            raise LogSyntaxError(f"{where}: {exc}") from exc
        if not isinstance(data["col"], int) or not isinstance(data["row"], int):
            raise LogSyntaxError(f"{where}: col/row must be integers")
        try:
            cell = CellCoord(data["col"], data["row"])
        except InvalidCellError as exc:
            raise InvalidCellError(f"{where}: {exc}") from exc
        ts = data["ts_ms"]
        if last_ts is not None and ts < last_ts:
            raise NonMonotonicTimestampError(f"{where}: {ts} after {last_ts}")
        last_ts = ts
        events.append(TokenEvent(ts, token, phase, cell))
    return events


def serialize_log(events: Iterable[TokenEvent]) -> str:
    return "".join(dumps(event.to_dict(), sort_keys=True) + "\n" for event in events)


@dataclass(frozen=True)
class TokenTally:
    count: int
    percent: int


@dataclass
class UsageSummary:
    """Aggregate view of one session's completed operations."""

    total_ops: int
    per_token: dict[TokenKind, TokenTally]
    active_seconds: float
    mean_interval_s: float | None

    def to_dict(self) -> dict:
        return {
            "total_ops": self.total_ops,
            "per_token": {
                token.value: {"count": tally.count, "percent": tally.percent}
                for token, tally in self.per_token.items()
            },
            "active_seconds": self.active_seconds,
            "mean_interval_s": self.mean_interval_s,
        }


def _round_half_up(x: float) -> int:
    return int(x + 0.5)


def summarize(
    ops: Sequence[CompletedOp], break_gap_s: float = DEFAULT_BREAK_GAP_S
) -> UsageSummary:
    """Tally completed ops per token and compute the working pace.

    Gaps between consecutive ops of break_gap_s or longer count as
    breaks and are excluded from active time. The mean interval divides
    active time by the op count and is reported to 0.1 s; with fewer
    than two ops there is no interval to speak of and the mean is None.
    """
    total = len(ops)
    if total == 0:
        return UsageSummary(0, {}, 0.0, None)
    counts = {kind: 0 for kind in TokenKind}
    for op in ops:
        counts[op.token] += 1
    per_token = {
        kind: TokenTally(count, _round_half_up(100.0 * count / total))
        for kind, count in counts.items()
    }
    span_s = (ops[-1].ts_ms - ops[0].ts_ms) / 1000.0
    breaks_s = 0.0
    for prev, cur in zip(ops, ops[1:]):
        gap = (cur.ts_ms - prev.ts_ms) / 1000.0
        if gap >= break_gap_s:
            breaks_s += gap
    active_s = span_s - breaks_s
    mean = round(active_s / total, 1) if total >= 2 else None
    return UsageSummary(total, per_token, active_s, mean)


@dataclass
class ReplayStep:
    """What one log record did during replay."""

    index: int
    event: TokenEvent
    dropped: bool
    signals: list[Signal] = field(default_factory=list)
    completed: CompletedOp | None = None


@dataclass
class ReplayResult:
    board: Board
    steps: list[ReplayStep]
    ops: list[CompletedOp]
    summary: UsageSummary

    @property
    def signals(self) -> list[Signal]:
        return [signal for step in self.steps for signal in step.signals]


def replay(
    manifest: PosterManifest,
    events: Sequence[TokenEvent],
    seed: int = 0,
    dead_spot_prob: float = 0.0,
    break_gap_s: float = DEFAULT_BREAK_GAP_S,
) -> ReplayResult:
    """Rebuild a session from its event log.

    Every consumed event's signals and completions are kept in order, so
    two replays with the same seed and drop probability are identical
    step for step.
    """
    if not 0.0 <= dead_spot_prob <= 1.0:
        raise ValueError(f"dead_spot_prob must be within [0, 1], got {dead_spot_prob}")
    board = load_poster(manifest)
    rng = random.Random(seed)
    steps: list[ReplayStep] = []
    ops: list[CompletedOp] = []
    for index, event in enumerate(events):
        dropped = (
            event.phase is Phase.PLACED
            and dead_spot_prob > 0.0
            and rng.random() < dead_spot_prob
        )
        step = ReplayStep(index, event, dropped)
        if not dropped:
            result = consume(board, event)
            step.signals = result.signals
            step.completed = result.completed
            if result.completed is not None:
                ops.append(result.completed)
        steps.append(step)
    return ReplayResult(board, steps, ops, summarize(ops, break_gap_s))
