/**
 * Wire types for the board server: JSON messages exchanged over the
 * per-session WebSocket stream plus the file-level shapes they embed.
 */

export const TOKEN_KINDS = [
  "Mover",
  "Resizer",
  "Player1",
  "Player2",
  "Stopper",
  "Undoer",
  "Zoomer",
  "Eraser",
] as const;

export type TokenKind = (typeof TOKEN_KINDS)[number];
export type Phase = "placed" | "lifted";

export const BOARD_SIZE = 8;

export interface RectDict {
  col: number;
  row: number;
  w: number;
  h: number;
}

export interface AvChannelDict {
  kind: "audio" | "video";
  media_ref: string;
}

export interface BoardObjectDict {
  id: string;
  image_ref: string;
  av_channels: AvChannelDict[];
  rect: RectDict;
  zoom_saved: RectDict | null;
  playing: number | null;
}

export interface BoardDict {
  poster_id: string;
  objects: BoardObjectDict[];
}

export interface PendingDict {
  kind: "move_awaiting_target" | "resize_awaiting_target";
  object_id: string;
}

/** Tokens currently resting on the board, keyed by token name. */
export type TokensDict = Partial<Record<TokenKind, { col: number; row: number }>>;

export interface StateMessage {
  type: "state";
  seq: number;
  board: BoardDict;
  pending: PendingDict | null;
  tokens: TokensDict;
}

export interface SignalMessage {
  type: "signal";
  seq: number;
  code: string;
  detail: string;
}

export interface PlaybackMessage {
  type: "playback";
  seq: number;
  object_id: string;
  channel: number;
  action: "start" | "stop";
  media_ref: string;
}

export interface ErrorMessage {
  type: "error";
  detail: string;
}

export type ServerMessage = StateMessage | SignalMessage | PlaybackMessage | ErrorMessage;

export interface TokenEventMessage {
  type: "token_event";
  token: TokenKind;
  phase: Phase;
  col: number;
  row: number;
}

export type ClientMessage =
  | TokenEventMessage
  | { type: "media_ended"; object_id: string }
  | { type: "save_layout"; name: string }
  | { type: "restore_layout"; name: string };

/** One line of the token-event log the client keeps for itself. */
export interface LoggedEvent {
  ts_ms: number;
  token: TokenKind;
  phase: Phase;
  col: number;
  row: number;
}

export class ProtocolError extends Error {}

function isRecord(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

function expectNumber(value: unknown, what: string): number {
  if (typeof value !== "number" || !Number.isFinite(value)) {
    throw new ProtocolError(`${what} must be a number, got ${JSON.stringify(value)}`);
  }
  return value;
}

function expectString(value: unknown, what: string): string {
  if (typeof value !== "string") {
    throw new ProtocolError(`${what} must be a string, got ${JSON.stringify(value)}`);
  }
  return value;
}

function checkRect(value: unknown, what: string): RectDict {
  if (!isRecord(value)) throw new ProtocolError(`${what} must be an object`);
  return {
    col: expectNumber(value.col, `${what}.col`),
    row: expectNumber(value.row, `${what}.row`),
    w: expectNumber(value.w, `${what}.w`),
    h: expectNumber(value.h, `${what}.h`),
  };
}

function checkBoard(value: unknown): BoardDict {
  if (!isRecord(value)) throw new ProtocolError("board must be an object");
  const objects = value.objects;
  if (!Array.isArray(objects)) throw new ProtocolError("board.objects must be an array");
  return {
    poster_id: expectString(value.poster_id, "board.poster_id"),
    objects: objects.map((raw, i) => {
      if (!isRecord(raw)) throw new ProtocolError(`board.objects[${i}] must be an object`);
      const channels = Array.isArray(raw.av_channels) ? raw.av_channels : [];
      return {
        id: expectString(raw.id, `objects[${i}].id`),
        image_ref: expectString(raw.image_ref, `objects[${i}].image_ref`),
        av_channels: channels as AvChannelDict[],
        rect: checkRect(raw.rect, `objects[${i}].rect`),
        zoom_saved: raw.zoom_saved == null ? null : checkRect(raw.zoom_saved, `objects[${i}].zoom_saved`),
        playing: raw.playing == null ? null : expectNumber(raw.playing, `objects[${i}].playing`),
      };
    }),
  };
}

/** Parse and structurally validate one frame from the server. */
export function parseServerMessage(text: string): ServerMessage {
  let data: unknown;
  try {
    data = JSON.parse(text);
  } catch {
    throw new ProtocolError(`frame is not JSON: ${text.slice(0, 80)}`);
  }
  if (!isRecord(data)) throw new ProtocolError("frame must be a JSON object");
  switch (data.type) {
    case "state": {
      const pending = data.pending;
      if (pending != null) {
        if (!isRecord(pending)) throw new ProtocolError("pending must be an object or null");
        expectString(pending.kind, "pending.kind");
        expectString(pending.object_id, "pending.object_id");
      }
      if (!isRecord(data.tokens ?? {})) throw new ProtocolError("tokens must be an object");
      return {
        type: "state",
        seq: expectNumber(data.seq, "seq"),
        board: checkBoard(data.board),
        pending: (pending ?? null) as PendingDict | null,
        tokens: (data.tokens ?? {}) as TokensDict,
      };
    }
    case "signal":
      return {
        type: "signal",
        seq: expectNumber(data.seq, "seq"),
        code: expectString(data.code, "code"),
        detail: expectString(data.detail ?? "", "detail"),
      };
    case "playback": {
      const action = data.action;
      if (action !== "start" && action !== "stop") {
        throw new ProtocolError(`playback.action must be start/stop, got ${JSON.stringify(action)}`);
      }
      return {
        type: "playback",
        seq: expectNumber(data.seq, "seq"),
        object_id: expectString(data.object_id, "object_id"),
        channel: expectNumber(data.channel, "channel"),
        action,
        media_ref: expectString(data.media_ref, "media_ref"),
      };
    }
    case "error":
      return { type: "error", detail: expectString(data.detail ?? "", "detail") };
    default:
      throw new ProtocolError(`unknown message type ${JSON.stringify(data.type)}`);
  }
}

export function tokenEventMessage(
  token: TokenKind,
  phase: Phase,
  col: number,
  row: number,
): TokenEventMessage {
  return { type: "token_event", token, phase, col, row };
}

/** Serialize a client-kept event log in the engine's JSON-lines format. */
export function eventLogToJsonl(events: readonly LoggedEvent[]): string {
  return events.map((e) => JSON.stringify(e)).join("\n") + (events.length ? "\n" : "");
}
