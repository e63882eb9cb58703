/**
 * Browser entry point: wires the palette, grid renderer, media
 * controller, and session stream into a minimal playable page.
 *
 * Query parameters:
 *   ?api=http://host:port   board server base URL (default :8000)
 *   ?poster=<id>            poster to open (default: first listed)
 */

import { BoardView } from "./board.js";
import { SessionClient } from "./client.js";
import { MediaController } from "./media.js";
import { BOARD_SIZE, type SignalMessage, type StateMessage } from "./protocol.js";
import { TokenPalette } from "./tokens.js";

const params = new URLSearchParams(window.location.search);
const apiBase = (params.get("api") ?? "http://127.0.0.1:8000").replace(/\/$/, "");
const wsBase = apiBase.replace(/^http/, "ws");

const app = document.getElementById("app")!;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

async function pickPoster(): Promise<string> {
  const response = await fetch(`${apiBase}/posters`);
  const posters = (await response.json()) as { poster_id: string; title: string }[];
  if (posters.length === 0) {
    throw new Error("the server has no posters; upload one with POST /posters");
  }
  const wanted = params.get("poster");
  const match = posters.find((p) => p.poster_id === wanted);
  return (match ?? posters[0]!).poster_id;
}

async function openSession(posterId: string): Promise<string> {
  const response = await fetch(`${apiBase}/sessions`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify({ poster_id: posterId }),
  });
  const body = (await response.json()) as { session_id: string };
  return body.session_id;
}

function main(client: SessionClient): void {
  const status = el("div", "status", "connected");
  const signalBar = el("div", "signals");
  const paletteBar = el("div", "palette");
  const grid = el("div", "grid");
  const controls = el("div", "controls");
  app.replaceChildren(status, signalBar, paletteBar, grid, controls);

  const palette = new TokenPalette((token, phase, col, row) =>
    client.sendTokenEvent(token, phase, col, row),
  );

  const media = new MediaController(
    (kind, ref) => {
      const element = document.createElement(kind === "audio" ? "audio" : "video");
      element.src = `${apiBase}/${ref}`;
      if (element instanceof HTMLVideoElement) {
        element.muted = false;
        element.style.display = "none";
        document.body.append(element);
      }
      return element;
    },
    (objectId) => client.mediaEnded(objectId),
  );

  const buttons = new Map<string, HTMLButtonElement>();
  for (const kind of palette.kinds) {
    const button = el("button", "token", kind);
    button.addEventListener("click", () => {
      palette.select(kind);
      for (const [name, b] of buttons) b.classList.toggle("selected", name === kind);
    });
    buttons.set(kind, button);
    paletteBar.append(button);
  }

  grid.style.position = "relative";
  const cellLayer = el("div", "cells");
  const tileLayer = el("div", "tiles");
  grid.append(tileLayer, cellLayer);
  for (let row = 0; row < BOARD_SIZE; row++) {
    for (let col = 0; col < BOARD_SIZE; col++) {
      const cell = el("div", "cell");
      cell.style.gridColumn = String(col + 1);
      cell.style.gridRow = String(row + 1);
      cell.addEventListener("click", () => palette.pressCell(col, row));
      cellLayer.append(cell);
    }
  }

  const saveName = el("input") as HTMLInputElement;
  saveName.placeholder = "layout name";
  const saveButton = el("button", "", "save layout");
  saveButton.addEventListener("click", () => {
    if (saveName.value) client.saveLayout(saveName.value);
  });
  const restoreButton = el("button", "", "restore layout");
  restoreButton.addEventListener("click", () => {
    if (saveName.value) client.restoreLayout(saveName.value);
  });
  controls.append(saveName, saveButton, restoreButton);

  function renderState(state: StateMessage): void {
    const view = new BoardView(state.board);
    tileLayer.replaceChildren(
      ...view.tiles().map((tile) => {
        const node = el("div", "tile" + (tile.zoomed ? " zoomed" : ""));
        node.style.gridColumn = `${tile.rect.col + 1} / span ${tile.rect.w}`;
        node.style.gridRow = `${tile.rect.row + 1} / span ${tile.rect.h}`;
        node.style.zIndex = String(tile.zIndex);
        node.style.backgroundImage = `url(${apiBase}/${tile.imageRef})`;
        node.title = tile.id;
        if (tile.playing !== null) {
          node.append(el("span", "badge", `ch${tile.playing}`));
        }
        return node;
      }),
    );
    const pendingText = palette.describePending(state.pending);
    status.textContent = pendingText || `seq ${state.seq}`;
  }

  function flashSignal(signal: SignalMessage): void {
    const note = el("div", "signal", `${signal.code}${signal.detail ? `: ${signal.detail}` : ""}`);
    signalBar.append(note);
    setTimeout(() => note.remove(), 4000);
  }

  client.onMessage((message) => {
    if (message.type === "state") renderState(message);
    else if (message.type === "signal") flashSignal(message);
    else if (message.type === "playback") media.apply(message);
    else status.textContent = `error: ${message.detail}`;
  });

  if (client.latestState) renderState(client.latestState);
}

(async () => {
  try {
    const posterId = await pickPoster();
    const sessionId = await openSession(posterId);
    const client = new SessionClient(
      `${wsBase}/sessions/${sessionId}/stream`,
      (url) => new WebSocket(url),
    );
    await client.connect();
    main(client);
  } catch (error) {
    app.textContent = String(error);
  }
})();
