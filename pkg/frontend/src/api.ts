import type { ReportBundle, Session, SessionState } from "./types.js";

export class ApiError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin typed wrapper over the workflow HTTP API. All state changes go
 * through the documented POST endpoints; the client never writes artifacts. */
export class SimforgeClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      const detail =
        typeof body === "object" && body !== null && "detail" in body
          ? String((body as { detail: unknown }).detail)
          : `request failed with status ${response.status}`;
      throw new ApiError(detail, response.status);
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  health(): Promise<{ status: string }> {
    return this.request("/api/health");
  }

  listSessions(): Promise<Session[]> {
    return this.request("/sessions");
  }

  getSession(id: string): Promise<Session> {
    return this.request(`/sessions/${id}`);
  }

  submit(description: string, mode: string, frontend: string): Promise<Session> {
    return this.post("/sessions", { description, mode, frontend });
  }

  generate(id: string): Promise<Session> {
    return this.post(`/sessions/${id}/generate`, {});
  }

  approve(id: string, actor: string, reason: string): Promise<Session> {
    return this.post(`/sessions/${id}/approve`, { actor, reason });
  }

  reject(id: string, actor: string, reason: string): Promise<Session> {
    return this.post(`/sessions/${id}/reject`, { actor, reason });
  }

  execute(id: string, seed?: number): Promise<Session> {
    return this.post(`/sessions/${id}/execute`, seed === undefined ? {} : { seed });
  }

  verify(id: string, actor: string, note = ""): Promise<Session> {
    return this.post(`/sessions/${id}/verify`, { actor, note });
  }

  reports(id: string): Promise<ReportBundle> {
    return this.request(`/sessions/${id}/report`);
  }

  async seriesCsv(id: string, run: number): Promise<string> {
    const response = await this.fetchImpl(
      `${this.baseUrl}/sessions/${id}/runs/${run}/series.csv`,
    );
    if (!response.ok) throw new ApiError("run artifacts missing", response.status);
    return response.text();
  }

  plotUrl(id: string, run: number): string {
    return `${this.baseUrl}/sessions/${id}/runs/${run}/plot.svg`;
  }
}

export function isTerminal(state: SessionState): boolean {
  return state === "Verified" || state === "Failed";
}
