/**
 * Controller wiring the pieces into a working workbook.
 *
 * Everything that touches state runs through one UpdateQueue, so a
 * socket event cannot land in the middle of a refetch: the refetch
 * task holds the lane until its response is applied, queued events
 * follow, and the store's level guard drops any the response already
 * covered. The same lane carries revision posts, which keeps the
 * optimistic append and its confirmation (or revert) in order.
 *
 * Connection loss is handled by the socket client redialing; every
 * open, the first included, triggers a refetch, so the view after a
 * reconnect is the view a fresh load would produce.
 */

import { ApiClient, ApiError } from "./api";
import { RealtimeClient, SocketLike } from "./socket";
import { UpdateQueue, WorkbookStore } from "./state";
import { renderWorkbook, RenderHandlers, WORKBOOK_CSS } from "./render";
import type { PushEvent, ReportFilterRequest } from "./types";

export type ControllerOptions = {
  api: ApiClient;
  makeSocket?: (url: string) => SocketLike;
  retryDelayMs?: number;
};

export class WorkbookController {
  readonly store: WorkbookStore;
  readonly queue = new UpdateQueue();
  private readonly api: ApiClient;
  private realtime: RealtimeClient | null = null;
  private sessionId: string | null = null;

  constructor(private readonly options: ControllerOptions) {
    this.api = options.api;
    this.store = new WorkbookStore((id) => this.api.reportUrl(id));
  }

  /** Open the push socket and load the session (on the socket's open). */
  start(sessionId: string): void {
    this.sessionId = sessionId;
    this.store.beginLoad();
    this.realtime = new RealtimeClient({
      url: this.api.realtimeUrl(),
      makeSocket: this.options.makeSocket,
      retryDelayMs: this.options.retryDelayMs,
      onEvent: (event) => this.handleEvent(event),
      onOpen: () => void this.refresh(),
      onStatus: (status) =>
        void this.queue.push(() => this.store.socketChanged(status)),
    });
    this.realtime.connect();
  }

  stop(): void {
    this.realtime?.close();
    this.realtime = null;
  }

  /** Fetch the session view and replace the mirror with it. */
  refresh(): Promise<void> {
    return this.queue.push(async () => {
      if (!this.sessionId) return;
      try {
        const view = await this.api.getSession(this.sessionId);
        this.store.sessionLoaded(view);
      } catch (err) {
        if (err instanceof ApiError) {
          this.store.loadFailed(err.status, err.detail);
        } else {
          this.store.loadFailed(null, String(err));
        }
      }
    });
  }

  /**
   * Post a revision with an optimistic "analyzing" row. A rejected or
   * failed post reverts the row and surfaces the reason; no attempt is
   * consumed until the server has the revision.
   */
  submitRevision(index: number, text: string): Promise<void> {
    return this.queue.push(async () => {
      if (!this.sessionId) return;
      if (!this.store.beginRevision(index, text)) return;
      try {
        await this.api.submitRevision(this.sessionId, index, text);
      } catch (err) {
        if (err instanceof ApiError) {
          this.store.revisionFailed(index, err.detail, false);
        } else {
          this.store.revisionFailed(index, "Network problem; nothing was sent.", true);
        }
      }
    });
  }

  /** Ask for a CSV report; the link arrives as a report_ready event. */
  requestReport(filter: ReportFilterRequest): Promise<string> {
    return this.queue.push(() => this.api.requestReport(filter));
  }

  private handleEvent(event: PushEvent): void {
    void this.queue
      .push(() => this.store.applyPush(event))
      .then((fresh) => {
        // Terminal events carry no explanation and no recomputed
        // progress; one refetch settles both.
        if (
          fresh &&
          (event.kind === "sentence_completed" || event.kind === "sentence_unresolved")
        ) {
          void this.refresh();
        }
      });
  }

  /** Render into `root` on every state change, wiring the input handlers. */
  attach(root: HTMLElement): () => void {
    const doc = root.ownerDocument;
    if (!doc.getElementById("workbook-css")) {
      const style = doc.createElement("style");
      style.id = "workbook-css";
      style.textContent = WORKBOOK_CSS;
      doc.head.appendChild(style);
    }
    const handlers: RenderHandlers = {
      onSubmit: (index, text) => void this.submitRevision(index, text),
    };
    const unsubscribe = this.store.subscribe((state) =>
      renderWorkbook(root, state, handlers),
    );
    renderWorkbook(root, this.store.getState(), handlers);
    return unsubscribe;
  }
}
