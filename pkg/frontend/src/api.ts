/**
 * Fetch client for the writecoach HTTP API.
 *
 * One class, one method per endpoint. Non-2xx responses become ApiError
 * with the status code and the server's detail string, so callers can
 * distinguish auth failures (401), missing sessions (404), and rejected
 * input (409/422) without re-parsing bodies.
 */

import type {
  BackendInfo,
  DocumentRequest,
  ReportFilterRequest,
  Role,
  SessionView,
} from "./types";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

type FetchFn = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  readonly baseUrl: string;
  token: string | null = null;
  private readonly fetchFn: FetchFn;

  constructor(baseUrl: string, fetchFn?: FetchFn) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    // Bind so a bare global fetch keeps its expected receiver.
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
  }

  private async request(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<Response> {
    const headers: Record<string, string> = {};
    if (this.token) headers["authorization"] = `Bearer ${this.token}`;
    if (body !== undefined) headers["content-type"] = "application/json";
    const response = await this.fetchFn(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const data = await response.json();
        if (data && typeof data.detail === "string") detail = data.detail;
      } catch {
        // keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return response;
  }

  private async json<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.request(method, path, body);
    return (await response.json()) as T;
  }

  /** Dev-only login; stores the token on the client for later calls. */
  async devToken(user: string, role: Role): Promise<string> {
    const data = await this.json<{ token: string }>("POST", "/api/dev/token", {
      user,
      role,
    });
    this.token = data.token;
    return data.token;
  }

  async listModels(): Promise<BackendInfo[]> {
    const data = await this.json<{ models: BackendInfo[] }>("GET", "/api/models");
    return data.models;
  }

  async createDocument(
    body: DocumentRequest,
  ): Promise<{ session_id: string; sentence_count: number }> {
    return this.json("POST", "/api/documents", body);
  }

  async getSession(sessionId: string): Promise<SessionView> {
    return this.json("GET", `/api/sessions/${sessionId}`);
  }

  async submitRevision(
    sessionId: string,
    index: number,
    text: string,
  ): Promise<string> {
    const data = await this.json<{ correlation_id: string }>(
      "POST",
      `/api/sessions/${sessionId}/sentences/${index}/revisions`,
      { text },
    );
    return data.correlation_id;
  }

  async requestReport(filter: ReportFilterRequest): Promise<string> {
    const data = await this.json<{ report_id: string }>("POST", "/api/reports", {
      filter,
    });
    return data.report_id;
  }

  reportUrl(reportId: string): string {
    return `${this.baseUrl}/api/reports/${reportId}`;
  }

  async fetchReport(reportId: string): Promise<string> {
    const response = await this.request("GET", `/api/reports/${reportId}`);
    return response.text();
  }

  /** ws:// address of the push socket, carrying the current token. */
  realtimeUrl(): string {
    if (!this.token) throw new Error("realtimeUrl needs a token; call devToken first");
    const ws = this.baseUrl.replace(/^http/, "ws");
    return `${ws}/rt?token=${encodeURIComponent(this.token)}`;
  }
}
