export { ApiClient, ApiError } from "./api";
export { WorkbookController } from "./app";
export type { ControllerOptions } from "./app";
export { renderWorkbook, WORKBOOK_CSS, GREEN, YELLOW } from "./render";
export type { RenderHandlers } from "./render";
export { RealtimeClient } from "./socket";
export type { RealtimeOptions, SocketLike } from "./socket";
export {
  inputEnabled,
  MAX_REVISIONS,
  UpdateQueue,
  WorkbookStore,
} from "./state";
export type {
  ReportLink,
  SentenceState,
  SocketStatus,
  WorkbookPhase,
  WorkbookState,
} from "./state";
export type * from "./types";
