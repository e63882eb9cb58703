/**
 * Playback controller: executes the server's start/stop commands on
 * audio/video elements. Elements come from an injected factory so the
 * logic — one active channel per object, switch on new start, report
 * natural endings exactly once — runs the same under test and in the
 * browser.
 */

import type { PlaybackMessage } from "./protocol.js";

export interface MediaElementLike {
  play(): void;
  pause(): void;
  /** Called by the element when playback reaches the end. */
  onended: ((ev: any) => any) | null;
}

export type MediaFactory = (kind: "audio" | "video", mediaRef: string) => MediaElementLike;

interface ActivePlayback {
  channel: number;
  element: MediaElementLike;
}

export class MediaController {
  private active = new Map<string, ActivePlayback>();

  constructor(
    private readonly factory: MediaFactory,
    private readonly onEnded: (objectId: string) => void = () => {},
  ) {}

  /** Execute one playback command from the server. */
  apply(command: PlaybackMessage): void {
    if (command.action === "stop") {
      this.stopObject(command.object_id);
      return;
    }
    // A start always supersedes whatever the object was playing; the
    // server sends the explicit stop first, so this is usually a no-op.
    this.stopObject(command.object_id);
    const kind = command.media_ref.endsWith(".mp3") ? "audio" : "video";
    const element = this.factory(kind, command.media_ref);
    const playback: ActivePlayback = { channel: command.channel, element };
    this.active.set(command.object_id, playback);
    element.onended = () => {
      // Ignore stale endings from elements we already replaced/stopped.
      if (this.active.get(command.object_id) === playback) {
        this.active.delete(command.object_id);
        this.onEnded(command.object_id);
      }
    };
    element.play();
  }

  private stopObject(objectId: string): void {
    const playback = this.active.get(objectId);
    if (playback !== undefined) {
      this.active.delete(objectId);
      playback.element.onended = null;
      playback.element.pause();
    }
  }

  activeChannel(objectId: string): number | null {
    return this.active.get(objectId)?.channel ?? null;
  }

  activeCount(): number {
    return this.active.size;
  }

  stopAll(): void {
    for (const objectId of [...this.active.keys()]) {
      this.stopObject(objectId);
    }
  }
}
