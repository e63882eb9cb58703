/**
 * Render model for the 8x8 board: pure data transforms from a state
 * snapshot to things a view can draw directly. No DOM dependencies, so
 * every rule here is testable headlessly.
 */

import {
  BOARD_SIZE,
  type BoardDict,
  type BoardObjectDict,
  type RectDict,
} from "./protocol.js";

export interface TileView {
  id: string;
  imageRef: string;
  rect: RectDict;
  zIndex: number;
  playing: number | null;
  zoomed: boolean;
}

export function rectContains(rect: RectDict, col: number, row: number): boolean {
  return (
    col >= rect.col && col < rect.col + rect.w && row >= rect.row && row < rect.row + rect.h
  );
}

export class BoardView {
  readonly objects: readonly BoardObjectDict[];

  constructor(board: BoardDict) {
    this.objects = board.objects;
  }

  /** Tiles in paint order (back first), with stacking indices attached. */
  tiles(): TileView[] {
    return this.objects.map((obj, index) => ({
      id: obj.id,
      imageRef: obj.image_ref,
      rect: obj.rect,
      zIndex: index,
      playing: obj.playing,
      zoomed: obj.zoom_saved !== null,
    }));
  }

  /** The object a token press on (col, row) would act upon. */
  frontmostAt(col: number, row: number): BoardObjectDict | null {
    for (let i = this.objects.length - 1; i >= 0; i--) {
      const obj = this.objects[i]!;
      if (rectContains(obj.rect, col, row)) {
        return obj;
      }
    }
    return null;
  }

  /** 8x8 matrix of frontmost object ids (null for empty cells). */
  grid(): (string | null)[][] {
    const rows: (string | null)[][] = [];
    for (let row = 0; row < BOARD_SIZE; row++) {
      const cells: (string | null)[] = [];
      for (let col = 0; col < BOARD_SIZE; col++) {
        cells.push(this.frontmostAt(col, row)?.id ?? null);
      }
      rows.push(cells);
    }
    return rows;
  }

  /** Compact one-character-per-cell sketch of the grid, for debugging. */
  ascii(): string {
    const letters = new Map<string, string>();
    this.objects.forEach((obj, i) => {
      letters.set(obj.id, String.fromCharCode(97 + (i % 26)));
    });
    return this.grid()
      .map((row) => row.map((id) => (id === null ? "." : letters.get(id) ?? "?")).join(""))
      .join("\n");
  }

  /** The object currently expanded to fill the board, if any. */
  zoomedObject(): BoardObjectDict | null {
    return this.objects.find((obj) => obj.zoom_saved !== null) ?? null;
  }

  playingObjects(): { id: string; channel: number }[] {
    return this.objects
      .filter((obj) => obj.playing !== null)
      .map((obj) => ({ id: obj.id, channel: obj.playing as number }));
  }

  byId(id: string): BoardObjectDict | null {
    return this.objects.find((obj) => obj.id === id) ?? null;
  }
}
