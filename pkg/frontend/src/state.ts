/**
 * Workbook view state and the transitions that move it.
 *
 * The store mirrors the server's session view and layers client-only
 * fields on top: a marker for the optimistic revision in flight, the
 * draft text to restore after a failed post, and inline error strings.
 *
 * The mirror copies the server's own bookkeeping so reconciliation is
 * mechanical: a revision joins `revisions` the moment it is submitted
 * (exactly what the service does on POST), which makes each arriving
 * hint land at level revisions + 1. From that one rule the ladder
 * invariants follow:
 *
 * - hint levels only grow, and an event whose level is already shown
 *   (a replay overtaken by a refetch) is a no-op, never a double hint;
 * - duplicate events (same correlation id) apply once;
 * - a failed post pops the optimistic revision: no attempt consumed;
 * - a refetched view replaces the mirror wholesale, which is what makes
 *   reconnect + refetch equal a fresh load.
 *
 * Mutations are synchronous. Async flows (fetches, socket events) order
 * themselves through UpdateQueue; see app.ts.
 */

import type {
  PushEvent,
  SentenceStatus,
  SentenceView,
  SessionView,
} from "./types";

export const MAX_REVISIONS = 3;

export type SentenceState = SentenceView & {
  /** Revision text posted but not yet judged; null when idle. */
  pending_text: string | null;
  /** Text to prefill the input with after a failed post. */
  draft: string | null;
  /** Inline error shown under the input. */
  input_error: string | null;
  /** True when the last failure was transient and worth retrying. */
  can_retry: boolean;
};

export type WorkbookPhase =
  | "loading"
  | "ready"
  | "not_found"
  | "auth_error"
  | "load_error";

export type ReportLink = {
  report_id: string;
  url: string;
  error: string | null;
};

export type SocketStatus = "connecting" | "open" | "closed";

export type WorkbookState = {
  phase: WorkbookPhase;
  error: string | null;
  session: Omit<SessionView, "sentences"> | null;
  sentences: SentenceState[];
  report: ReportLink | null;
  socket: SocketStatus;
};

/** Revision input is live only here; everywhere else it stays locked. */
export function inputEnabled(sentence: SentenceState): boolean {
  return (
    sentence.status === "awaiting_revision" &&
    sentence.revisions.length < MAX_REVISIONS
  );
}

function maxHintLevel(sentence: SentenceState): number {
  let level = 0;
  for (const hint of sentence.delivered_hints) {
    if (hint.level > level) level = hint.level;
  }
  return level;
}

function activeText(original: string, revisions: string[]): string {
  return revisions.length ? revisions[revisions.length - 1] : original;
}

function toSentenceState(view: SentenceView): SentenceState {
  return {
    ...view,
    char_range: [...view.char_range],
    revisions: [...view.revisions],
    delivered_hints: view.delivered_hints.map((h) => ({ ...h })),
    pending_text: null,
    draft: null,
    input_error: null,
    can_retry: false,
  };
}

type Listener = (state: WorkbookState) => void;

export class WorkbookStore {
  private state: WorkbookState = {
    phase: "loading",
    error: null,
    session: null,
    sentences: [],
    report: null,
    socket: "closed",
  };
  private listeners: Listener[] = [];
  /** Correlation ids already applied; the dedup for at-least-once pushes. */
  private seen = new Set<string>();

  /**
   * `reportUrl` turns a report id into the download href; the event's
   * body names the server's storage location, which is not fetchable.
   */
  constructor(
    private readonly reportUrl: (id: string) => string = (id) =>
      `/api/reports/${id}`,
  ) {}

  getState(): WorkbookState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private notify(): void {
    for (const listener of [...this.listeners]) listener(this.state);
  }

  beginLoad(): void {
    this.state = { ...this.state, phase: "loading", error: null };
    this.notify();
  }

  loadFailed(status: number | null, message: string): void {
    const phase: WorkbookPhase =
      status === 404 ? "not_found" : status === 401 ? "auth_error" : "load_error";
    this.state = { ...this.state, phase, error: message };
    this.notify();
  }

  /**
   * Replace the mirror with a fresh server view. The server's copy wins
   * outright; only the draft of a still-revisable sentence survives, so
   * a background refetch does not eat text the learner should retry.
   */
  sessionLoaded(view: SessionView): void {
    const previous = new Map(this.state.sentences.map((s) => [s.index, s]));
    const { sentences, ...rest } = view;
    this.state = {
      ...this.state,
      phase: "ready",
      error: null,
      session: rest,
      sentences: sentences.map((s) => {
        const fresh = toSentenceState(s);
        const old = previous.get(s.index);
        if (old && fresh.status === "awaiting_revision") {
          fresh.draft = old.draft;
          fresh.input_error = old.input_error;
          fresh.can_retry = old.can_retry;
        }
        return fresh;
      }),
    };
    this.notify();
  }

  socketChanged(status: SocketStatus): void {
    if (this.state.socket === status) return;
    this.state = { ...this.state, socket: status };
    this.notify();
  }

  /**
   * Optimistic start of a revision: record it and show "analyzing", the
   * same move the server makes when the POST lands. Returns false when
   * the input is locked.
   */
  beginRevision(index: number, text: string): boolean {
    const sentence = this.getSentence(index);
    if (!sentence || !inputEnabled(sentence)) return false;
    const revisions = [...sentence.revisions, text];
    this.patchSentence(index, {
      status: "analyzing",
      current_level: null,
      revisions,
      revisions_left: Math.max(0, MAX_REVISIONS - revisions.length),
      active_text: activeText(sentence.text, revisions),
      pending_text: text,
      draft: text,
      input_error: null,
      can_retry: false,
    });
    return true;
  }

  /**
   * The post never reached the server: pop the optimistic revision, so
   * no attempt is consumed. Transient failures keep the draft and offer
   * a retry; rejections (409/422) surface the server's message inline.
   */
  revisionFailed(index: number, message: string, canRetry: boolean): void {
    const sentence = this.getSentence(index);
    if (!sentence || sentence.pending_text === null) return;
    const revisions = sentence.revisions.slice(0, -1);
    this.patchSentence(index, {
      status: "awaiting_revision",
      current_level: maxHintLevel(sentence) || null,
      revisions,
      revisions_left: Math.max(0, MAX_REVISIONS - revisions.length),
      active_text: activeText(sentence.text, revisions),
      pending_text: null,
      input_error: message,
      can_retry: canRetry,
    });
  }

  /**
   * Apply one push event. Returns true when the event was fresh and
   * changed the view, false for duplicates and stale replays.
   */
  applyPush(event: PushEvent): boolean {
    if (event.correlation_id && this.seen.has(event.correlation_id)) return false;
    if (event.correlation_id) this.seen.add(event.correlation_id);

    if (event.kind === "report_ready") {
      this.state = {
        ...this.state,
        report: {
          report_id: event.correlation_id,
          url: this.reportUrl(event.correlation_id),
          error: event.error,
        },
      };
      this.notify();
      return true;
    }

    if (!this.state.session || event.session_id !== this.state.session.session_id) {
      return false;
    }
    if (event.sentence_index === null) return false;
    const sentence = this.getSentence(event.sentence_index);
    if (!sentence) return false;

    switch (event.kind) {
      case "hint_delivered":
        return this.applyHint(sentence, event.body);
      case "sentence_completed":
        return this.applyTerminal(sentence, "completed", null);
      case "sentence_unresolved":
        return this.applyTerminal(sentence, "unresolved", event.body);
    }
    return false;
  }

  private applyHint(sentence: SentenceState, hint: string): boolean {
    // The judged text is already in `revisions` (recorded at submit), so
    // the hint's level is one past the count: the ladder's escalation rule.
    const level = sentence.revisions.length + 1;
    if (sentence.delivered_hints.some((h) => h.level >= level)) {
      // A refetch already folded this hint in; just settle the marker.
      if (sentence.pending_text !== null) {
        this.patchSentence(sentence.index, { pending_text: null });
        return true;
      }
      return false;
    }
    this.patchSentence(sentence.index, {
      status: "awaiting_revision",
      current_level: level,
      delivered_hints: [...sentence.delivered_hints, { level, hint }],
      pending_text: null,
      input_error: null,
      can_retry: false,
    });
    return true;
  }

  private applyTerminal(
    sentence: SentenceState,
    status: Extract<SentenceStatus, "completed" | "unresolved">,
    correction: string | null,
  ): boolean {
    const accepted = status === "completed";
    this.patchSentence(sentence.index, {
      status,
      current_level: null,
      hint_level_used: accepted ? maxHintLevel(sentence) || null : sentence.hint_level_used,
      suggested_correction: accepted ? null : correction,
      pending_text: null,
      draft: null,
      input_error: null,
      can_retry: false,
    });
    return true;
  }

  private getSentence(index: number): SentenceState | undefined {
    return this.state.sentences.find((s) => s.index === index);
  }

  private patchSentence(index: number, patch: Partial<SentenceState>): void {
    this.state = {
      ...this.state,
      sentences: this.state.sentences.map((s) =>
        s.index === index ? { ...s, ...patch } : s,
      ),
    };
    this.notify();
  }
}

/**
 * One serialized lane for state updates. Fetch handlers and socket
 * events enqueue whole tasks here; a task that awaits mid-way still
 * finishes before the next one starts, so updates never interleave.
 */
export class UpdateQueue {
  private tail: Promise<void> = Promise.resolve();

  push<T>(task: () => T | Promise<T>): Promise<T> {
    const result = this.tail.then(task);
    this.tail = result.then(
      () => undefined,
      () => undefined,
    );
    return result;
  }

  /** Resolves once everything enqueued so far, including chained work, has run. */
  async drain(): Promise<void> {
    let tail;
    do {
      tail = this.tail;
      await tail;
    } while (tail !== this.tail);
  }
}
