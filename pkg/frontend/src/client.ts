/**
 * Session stream client: a thin, transport-injected wrapper around the
 * per-session WebSocket. It keeps the ordered message history, the
 * latest full state, and a local log of every token event it emitted,
 * so a UI session can later be replayed offline from its own record.
 */

import {
  type ClientMessage,
  type LoggedEvent,
  type Phase,
  type ServerMessage,
  type StateMessage,
  type TokenKind,
  eventLogToJsonl,
  parseServerMessage,
} from "./protocol.js";

/** The part of the WebSocket API the client actually uses. */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  addEventListener(type: "open", listener: () => void): void;
  addEventListener(type: "close", listener: () => void): void;
  addEventListener(type: "message", listener: (event: { data: unknown }) => void): void;
}

export type SocketFactory = (url: string) => SocketLike;

export type MessageHandler = (message: ServerMessage) => void;

export class SessionClient {
  readonly url: string;
  readonly messages: ServerMessage[] = [];
  readonly sentEvents: LoggedEvent[] = [];
  readonly protocolErrors: string[] = [];
  latestState: StateMessage | null = null;

  private socket: SocketLike | null = null;
  private handlers = new Set<MessageHandler>();
  private lastTs = 0;
  private closed = false;

  constructor(
    url: string,
    private readonly factory: SocketFactory,
    private readonly now: () => number = Date.now,
  ) {
    this.url = url;
  }

  connect(timeoutMs = 10_000): Promise<void> {
    const socket = this.factory(this.url);
    this.socket = socket;
    socket.addEventListener("message", (event) => {
      const text =
        typeof event.data === "string" ? event.data : String(event.data ?? "");
      this.dispatch(text);
    });
    socket.addEventListener("close", () => {
      this.closed = true;
    });
    return new Promise((resolve, reject) => {
      const timer = setTimeout(
        () => reject(new Error(`connect to ${this.url} timed out`)),
        timeoutMs,
      );
      socket.addEventListener("open", () => {
        clearTimeout(timer);
        resolve();
      });
    });
  }

  private dispatch(text: string): void {
    let message: ServerMessage;
    try {
      message = parseServerMessage(text);
    } catch (error) {
      this.protocolErrors.push(String(error));
      return;
    }
    this.messages.push(message);
    if (message.type === "state") {
      this.latestState = message;
    }
    for (const handler of this.handlers) {
      handler(message);
    }
  }

  onMessage(handler: MessageHandler): () => void {
    this.handlers.add(handler);
    return () => this.handlers.delete(handler);
  }

  get isClosed(): boolean {
    return this.closed;
  }

  private send(message: ClientMessage): void {
    if (this.socket === null) {
      throw new Error("not connected");
    }
    this.socket.send(JSON.stringify(message));
  }

  /** Emit one token phase and record it in the local event log. */
  sendTokenEvent(token: TokenKind, phase: Phase, col: number, row: number): void {
    this.lastTs = Math.max(this.now(), this.lastTs);
    this.sentEvents.push({ ts_ms: this.lastTs, token, phase, col, row });
    this.send({ type: "token_event", token, phase, col, row });
  }

  /** A full press: place the token on the cell, then lift it. */
  tap(token: TokenKind, col: number, row: number): void {
    this.sendTokenEvent(token, "placed", col, row);
    this.sendTokenEvent(token, "lifted", col, row);
  }

  mediaEnded(objectId: string): void {
    this.send({ type: "media_ended", object_id: objectId });
  }

  saveLayout(name: string): void {
    this.send({ type: "save_layout", name });
  }

  restoreLayout(name: string): void {
    this.send({ type: "restore_layout", name });
  }

  /** The token events this client emitted, in the engine's log format. */
  eventLogJsonl(): string {
    return eventLogToJsonl(this.sentEvents);
  }

  /** Resolve with the first (possibly already-received) matching message. */
  waitFor(
    predicate: (message: ServerMessage) => boolean,
    timeoutMs = 10_000,
  ): Promise<ServerMessage> {
    const seen = this.messages.find(predicate);
    if (seen !== undefined) {
      return Promise.resolve(seen);
    }
    return new Promise((resolve, reject) => {
      const timer = setTimeout(() => {
        unsubscribe();
        reject(new Error("timed out waiting for a matching message"));
      }, timeoutMs);
      const unsubscribe = this.onMessage((message) => {
        if (predicate(message)) {
          clearTimeout(timer);
          unsubscribe();
          resolve(message);
        }
      });
    });
  }

  /** Wait until the authoritative state has advanced to at least `seq`. */
  async waitForSeq(seq: number, timeoutMs = 10_000): Promise<StateMessage> {
    const message = await this.waitFor(
      (m) => m.type === "state" && m.seq >= seq,
      timeoutMs,
    );
    return message as StateMessage;
  }

  close(): void {
    this.socket?.close();
  }
}
