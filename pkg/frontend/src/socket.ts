/**
 * Push socket client for /rt.
 *
 * The server sends JSON push events and ignores client frames, so this
 * side only listens. On connection loss it backs off briefly and dials
 * again; every successful open fires onOpen, which the app uses to
 * refetch the session so nothing sent while offline is missed (the
 * server also replays a bounded buffer of missed events on reconnect,
 * and the store dedups the overlap).
 *
 * The constructor is injectable so tests and Node can pass the `ws`
 * package's WebSocket; the default is the browser global.
 */

import type { PushEvent } from "./types";

export type SocketLike = {
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  close(): void;
};

export type RealtimeOptions = {
  url: string;
  onEvent: (event: PushEvent) => void;
  /** Fired on every successful open, the first one included. */
  onOpen?: () => void;
  onStatus?: (status: "connecting" | "open" | "closed") => void;
  makeSocket?: (url: string) => SocketLike;
  retryDelayMs?: number;
};

export class RealtimeClient {
  private socket: SocketLike | null = null;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private stopped = false;

  constructor(private readonly options: RealtimeOptions) {}

  connect(): void {
    this.stopped = false;
    this.dial();
  }

  close(): void {
    this.stopped = true;
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    const socket = this.socket;
    this.socket = null;
    if (socket) {
      socket.onclose = null;
      socket.close();
    }
    this.options.onStatus?.("closed");
  }

  private dial(): void {
    const make =
      this.options.makeSocket ??
      ((url: string) => new WebSocket(url) as unknown as SocketLike);
    this.options.onStatus?.("connecting");
    const socket = make(this.options.url);
    this.socket = socket;

    socket.onopen = () => {
      this.options.onStatus?.("open");
      this.options.onOpen?.();
    };
    socket.onmessage = (ev) => {
      const raw = typeof ev.data === "string" ? ev.data : String(ev.data);
      let event: PushEvent;
      try {
        event = JSON.parse(raw) as PushEvent;
      } catch {
        return;
      }
      this.options.onEvent(event);
    };
    socket.onerror = () => {
      // The close handler owns recovery; errors always precede a close.
    };
    socket.onclose = () => {
      if (this.socket === socket) this.socket = null;
      this.options.onStatus?.("closed");
      if (!this.stopped) this.scheduleRedial();
    };
  }

  private scheduleRedial(): void {
    if (this.timer !== null) return;
    const delay = this.options.retryDelayMs ?? 1000;
    this.timer = setTimeout(() => {
      this.timer = null;
      if (!this.stopped) this.dial();
    }, delay);
  }
}
