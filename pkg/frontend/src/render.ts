/**
 * DOM rendering for the workbook. No framework: each state change
 * rebuilds the tree under the given root, carrying live input text
 * across so a push event arriving mid-keystroke loses nothing.
 *
 * Color convention, fixed on purpose: yellow marks an inaccurate
 * submitted revision, green marks the accepted version or the final
 * suggested sentence. The classes carrying it are `inaccurate` and
 * `accepted`; WORKBOOK_CSS maps them to the colors.
 */

import { inputEnabled, MAX_REVISIONS } from "./state";
import type { SentenceState, WorkbookState } from "./state";
import type { Progress } from "./types";

export const YELLOW = "#fff3a3";
export const GREEN = "#c9f0c9";

export const WORKBOOK_CSS = `
.workbook { font-family: system-ui, sans-serif; max-width: 44rem; margin: 0 auto; }
.meta, .progress { color: #555; font-size: 0.9rem; }
.sentence { border: 1px solid #ddd; border-radius: 6px; padding: 0.75rem; margin: 0.75rem 0; }
.badge { font-size: 0.8rem; text-transform: uppercase; color: #666; margin-right: 0.5rem; }
.active-text.accepted { background: ${GREEN}; }
.revision.inaccurate { background: ${YELLOW}; }
.revision.accepted { background: ${GREEN}; }
.revision.judging { color: #888; font-style: italic; }
.suggestion.accepted { background: ${GREEN}; padding: 0.25rem; }
.explanation { color: #444; font-size: 0.9rem; }
.hints { margin: 0.5rem 0 0 0; padding-left: 1.25rem; }
.hint { margin: 0.25rem 0; }
.inline-error { color: #b00020; font-size: 0.9rem; }
.socket-status[data-status="open"] { color: #2e7d32; }
.socket-status[data-status="connecting"] { color: #b08000; }
.socket-status[data-status="closed"] { color: #b00020; }
.report-link { display: inline-block; margin-top: 0.5rem; }
`;

export type RenderHandlers = {
  onSubmit: (index: number, text: string) => void;
};

const SOCKET_LABELS = { open: "live", connecting: "connecting…", closed: "offline" };

export function renderWorkbook(
  root: HTMLElement,
  state: WorkbookState,
  handlers: RenderHandlers,
): void {
  const doc = root.ownerDocument;
  const liveInputs = snapshotInputs(root);
  root.textContent = "";

  const el = (tag: string, className?: string, text?: string) => {
    const node = doc.createElement(tag);
    if (className) node.className = className;
    if (text !== undefined) node.textContent = text;
    return node;
  };

  const workbook = el("div", "workbook");
  root.appendChild(workbook);

  if (state.phase !== "ready" || !state.session) {
    const messages = {
      loading: "Loading session…",
      not_found: "Session not found.",
      auth_error: "Sign-in required: your token is missing or expired.",
      load_error: `Could not load the session: ${state.error ?? "unknown error"}`,
    };
    const phase = state.phase === "ready" ? "load_error" : state.phase;
    workbook.appendChild(el("p", `phase ${phase.replace("_", "-")}`, messages[phase]));
    return;
  }

  const session = state.session;
  const header = el("header");
  header.appendChild(el("h1", "title", `Workbook ${session.session_id}`));
  const socket = el("span", "socket-status", SOCKET_LABELS[state.socket]);
  socket.setAttribute("data-status", state.socket);
  header.appendChild(socket);
  header.appendChild(
    el(
      "p",
      "meta",
      `${session.owner}${session.task_ref ? ` · task ${session.task_ref}` : ""}` +
        ` · model ${session.model.backend_id}/${session.model.model_name}` +
        ` · temperature ${session.model.temperature}` +
        ` · max tokens ${session.model.max_tokens}`,
    ),
  );
  header.appendChild(el("p", "progress", progressLine(session.progress)));
  workbook.appendChild(header);

  for (const sentence of state.sentences) {
    workbook.appendChild(
      renderSentence(doc, sentence, liveInputs.get(sentence.index), handlers),
    );
  }

  if (state.report) {
    if (state.report.error) {
      workbook.appendChild(
        el("p", "report-error", `Report failed: ${state.report.error}`),
      );
    } else {
      const link = el("a", "report-link", `Download report ${state.report.report_id}`);
      link.setAttribute("href", state.report.url);
      link.setAttribute("download", `${state.report.report_id}.csv`);
      workbook.appendChild(link);
    }
  }
}

function progressLine(p: Progress): string {
  const levels = Object.entries(p.per_level_counts)
    .sort(([a], [b]) => Number(a) - Number(b))
    .map(([level, count]) => `L${level} ×${count}`)
    .join(" ");
  return (
    `${p.total_sentences} sentences · ${p.errors_identified} flagged` +
    ` · ${p.errors_corrected} corrected · ${p.unresolved} unresolved` +
    (levels ? ` · hints ${levels}` : "")
  );
}

const BADGES: Record<SentenceState["status"], (s: SentenceState) => string> = {
  pending: () => "queued",
  analyzing: () => "analyzing…",
  awaiting_revision: (s) => `hint level ${s.current_level ?? "?"}`,
  completed: (s) =>
    s.hint_level_used === null ? "completed" : `completed after level-${s.hint_level_used} hint`,
  unresolved: () => "unresolved",
};

function renderSentence(
  doc: Document,
  sentence: SentenceState,
  liveValue: string | undefined,
  handlers: RenderHandlers,
): HTMLElement {
  const el = (tag: string, className?: string, text?: string) => {
    const node = doc.createElement(tag);
    if (className) node.className = className;
    if (text !== undefined) node.textContent = text;
    return node;
  };

  const section = el("section", `sentence status-${sentence.status}`);
  section.setAttribute("data-index", String(sentence.index));

  const row = el("div", "sentence-row");
  row.appendChild(el("span", "badge", BADGES[sentence.status](sentence)));
  const acceptedAsIs = sentence.status === "completed" && sentence.revisions.length === 0;
  row.appendChild(
    el("span", acceptedAsIs ? "active-text accepted" : "active-text", sentence.active_text),
  );
  section.appendChild(row);

  if (sentence.revisions.length) {
    const list = el("ol", "revisions");
    sentence.revisions.forEach((text, i) => {
      const last = i === sentence.revisions.length - 1;
      let cls = "revision inaccurate";
      if (last && sentence.status === "completed") cls = "revision accepted";
      if (last && sentence.status === "analyzing") cls = "revision judging";
      list.appendChild(el("li", cls, text));
    });
    section.appendChild(list);
  }

  if (sentence.status === "unresolved" && sentence.suggested_correction) {
    section.appendChild(
      el("div", "suggestion accepted", sentence.suggested_correction),
    );
    if (sentence.explanation) {
      section.appendChild(el("p", "explanation", sentence.explanation));
    }
  }

  if (sentence.delivered_hints.length) {
    const hints = el("ul", "hints");
    for (const hint of [...sentence.delivered_hints].sort((a, b) => a.level - b.level)) {
      const item = el("li", "hint", `Level ${hint.level}: ${hint.hint}`);
      item.setAttribute("data-level", String(hint.level));
      hints.appendChild(item);
    }
    section.appendChild(hints);
  }

  const form = el("div", "revision-form");
  const input = el("textarea", "revision-input") as HTMLTextAreaElement;
  const enabled = inputEnabled(sentence);
  if (sentence.status === "analyzing") {
    input.value = sentence.pending_text ?? liveValue ?? "";
  } else if (enabled) {
    // An empty box falls back to the draft, so a failed post's text
    // comes back for the retry.
    input.value = liveValue || sentence.draft || "";
  }
  input.disabled = !enabled;
  form.appendChild(input);

  const submit = el("button", "submit", "Submit revision") as HTMLButtonElement;
  submit.disabled = !enabled;
  submit.onclick = () => {
    if (!enabled) return;
    const text = input.value;
    if (text.trim()) handlers.onSubmit(sentence.index, text);
  };
  form.appendChild(submit);

  const used = sentence.revisions.length;
  form.appendChild(
    el("span", "attempts", `${Math.max(0, MAX_REVISIONS - used)} of ${MAX_REVISIONS} attempts left`),
  );
  if (sentence.input_error) {
    const error = el("span", "inline-error", sentence.input_error);
    form.appendChild(error);
    if (sentence.can_retry && sentence.draft) {
      const retry = el("button", "retry", "Retry") as HTMLButtonElement;
      retry.onclick = () => handlers.onSubmit(sentence.index, sentence.draft ?? "");
      form.appendChild(retry);
    }
  }
  section.appendChild(form);

  return section;
}

function snapshotInputs(root: HTMLElement): Map<number, string> {
  const values = new Map<number, string>();
  for (const node of Array.from(root.querySelectorAll(".sentence"))) {
    const index = Number(node.getAttribute("data-index"));
    const input = node.querySelector(".revision-input") as HTMLTextAreaElement | null;
    if (input && !Number.isNaN(index)) values.set(index, input.value);
  }
  return values;
}
