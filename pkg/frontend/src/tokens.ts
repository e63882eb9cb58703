/**
 * Token palette: turns "pick a token, press a cell" interactions into
 * the placed/lifted event pairs the board expects. On a physical board
 * the lift happens when the hand withdraws; in the pointer UI every
 * press is a complete dab, so the palette emits both phases.
 */

import type { PendingDict, Phase, TokenKind } from "./protocol.js";
import { TOKEN_KINDS } from "./protocol.js";

export type EmitFn = (token: TokenKind, phase: Phase, col: number, row: number) => void;

export class TokenPalette {
  selected: TokenKind | null = null;

  constructor(private readonly emit: EmitFn) {}

  get kinds(): readonly TokenKind[] {
    return TOKEN_KINDS;
  }

  select(token: TokenKind): void {
    this.selected = token;
  }

  clear(): void {
    this.selected = null;
  }

  /**
   * Press the selected token onto a cell. Emits placed then lifted and
   * reports what was sent; returns an empty list when no token is
   * selected so accidental grid clicks do nothing.
   */
  pressCell(col: number, row: number): { token: TokenKind; phase: Phase }[] {
    if (this.selected === null) {
      return [];
    }
    const token = this.selected;
    this.emit(token, "placed", col, row);
    this.emit(token, "lifted", col, row);
    return [
      { token, phase: "placed" },
      { token, phase: "lifted" },
    ];
  }

  /** Status line for a half-finished two-placement gesture. */
  describePending(pending: PendingDict | null): string {
    if (pending === null) {
      return "";
    }
    if (pending.kind === "move_awaiting_target") {
      return `moving '${pending.object_id}' — press the destination cell`;
    }
    return `resizing '${pending.object_id}' — press the line the edge should reach`;
  }
}
