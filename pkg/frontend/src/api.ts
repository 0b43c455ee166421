import type {
  Box,
  LexiconEntry,
  ServiceConfig,
  SessionState,
  StrokesPayload,
  TurnResponse,
  VocabEntry,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`${status}: ${detail}`);
    this.name = "ApiError";
  }
}

export interface PanelSubmission {
  box: Box;
  strokes: StrokesPayload;
  keyword: string;
  emoji: string;
}

/** Thin typed wrapper over the service's JSON endpoints. */
export class FluxClient {
  constructor(private readonly baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: unknown };
        if (typeof body.detail === "string") detail = body.detail;
      } catch {
        // non-JSON error body: keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body?: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: body === undefined ? null : JSON.stringify(body),
    });
  }

  health(): Promise<{ status: string; version: string }> {
    return this.request("/health");
  }

  config(): Promise<ServiceConfig> {
    return this.request("/config");
  }

  async vocab(): Promise<VocabEntry[]> {
    const body = await this.request<{ keywords: VocabEntry[] }>("/vocab");
    return body.keywords;
  }

  async lexicon(): Promise<LexiconEntry[]> {
    const body = await this.request<{ emojis: LexiconEntry[] }>("/lexicon");
    return body.emojis;
  }

  createSession(
    anchor: string,
    config?: Record<string, number>,
    canvas?: [number, number],
  ): Promise<SessionState> {
    return this.post("/sessions", { anchor, config, canvas });
  }

  state(sessionId: string): Promise<SessionState> {
    return this.request(`/sessions/${sessionId}/state`);
  }

  submitPanel(sessionId: string, body: PanelSubmission): Promise<TurnResponse> {
    return this.post(`/sessions/${sessionId}/panels`, body);
  }

  regenerate(sessionId: string, turn: number): Promise<TurnResponse> {
    return this.post(`/sessions/${sessionId}/panels/${turn}/regenerate`);
  }

  /** TurnResponse.image is a service-relative path; resolve it for <img> use. */
  imageUrl(path: string): string {
    return this.baseUrl + path;
  }

  exportUrl(sessionId: string): string {
    return `${this.baseUrl}/sessions/${sessionId}/export`;
  }
}
