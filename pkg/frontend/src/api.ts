import type {
  Condition,
  ExportPayload,
  Mode,
  SessionDescriptor,
  SessionState,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Typed client for the calibration service's /v1 endpoints. The UI never
 * computes pixels; everything visible comes through this client. */
export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchImpl(`${this.baseUrl}${path}`, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    if (!res.ok) {
      throw new ApiError(res.status, await res.text());
    }
    return (await res.json()) as T;
  }

  listStimuli(): Promise<{ stimuli: string[] }> {
    return this.request("/v1/stimuli");
  }

  createSession(req: {
    stimulus: string;
    mode: Mode;
    blur_rate?: number;
    condition?: Condition;
    full_res?: boolean;
  }): Promise<SessionDescriptor> {
    return this.request("/v1/sessions", {
      method: "POST",
      body: JSON.stringify(req),
    });
  }

  getSession(sessionId: string): Promise<SessionState> {
    return this.request(`/v1/sessions/${sessionId}`);
  }

  setParam(
    sessionId: string,
    update: { value: number } | { delta: number },
  ): Promise<SessionDescriptor> {
    return this.request(`/v1/sessions/${sessionId}/param`, {
      method: "POST",
      body: JSON.stringify(update),
    });
  }

  accept(sessionId: string): Promise<SessionDescriptor> {
    return this.request(`/v1/sessions/${sessionId}/accept`, {
      method: "POST",
    });
  }

  getExport(): Promise<ExportPayload> {
    return this.request("/v1/export");
  }

  previewUrl(sessionId: string): string {
    return `${this.baseUrl}/v1/sessions/${sessionId}/preview.png`;
  }

  /** Raw preview fetch; exposes the staleness header. */
  async fetchPreview(
    sessionId: string,
    signal?: AbortSignal,
  ): Promise<{ blob: Blob; stale: boolean }> {
    const res = await this.fetchImpl(this.previewUrl(sessionId), { signal });
    if (!res.ok) {
      throw new ApiError(res.status, await res.text());
    }
    return {
      blob: await res.blob(),
      stale: res.headers.get("X-Preview-Stale") === "true",
    };
  }
}
