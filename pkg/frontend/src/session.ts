import type { ApiClient } from "./api.js";
import { PreviewLoader } from "./preview.js";
import { RateLimiter } from "./rate_limiter.js";
import type {
  Condition,
  Mode,
  SessionDescriptor,
  UiSessionState,
} from "./types.js";
import { clampToRange, stepForRange, wheelNotches } from "./wheel.js";

export type SessionListener = (state: UiSessionState) => void;

/** One calibration session as the UI sees it.
 *
 * The server owns the truth: every response descriptor overwrites the local
 * value, so client-side math is only an optimistic display while an update
 * is in flight. Wheel and slider input funnel through a newest-wins rate
 * limiter capped at 10 updates/s.
 */
export class UiSession {
  private state: UiSessionState;
  private limiter: RateLimiter<number>;
  private preview: PreviewLoader;
  private lastObjectUrl: string | null = null;

  private constructor(
    private api: ApiClient,
    desc: SessionDescriptor,
    private listener: SessionListener,
    maxUpdatesPerSecond = 10,
    makeObjectUrl?: (blob: Blob) => string,
  ) {
    this.state = {
      sessionId: desc.session_id,
      mode: desc.mode,
      value: desc.value,
      range: desc.range,
      accepted: desc.accepted_value !== null,
      previewUrl: "",
      previewStale: true,
      offline: false,
      history: [desc.value],
    };
    this.limiter = new RateLimiter<number>(
      (value) => void this.sendValue(value),
      maxUpdatesPerSecond,
    );
    this.preview = new PreviewLoader(
      api,
      (url, stale) => this.onPreview(url, stale),
      () => this.markOffline(),
      makeObjectUrl,
    );
    void this.preview.refresh(desc.session_id);
  }

  static async create(
    api: ApiClient,
    req: {
      stimulus: string;
      mode: Mode;
      blur_rate?: number;
      condition?: Condition;
    },
    listener: SessionListener,
    maxUpdatesPerSecond = 10,
    makeObjectUrl?: (blob: Blob) => string,
  ): Promise<UiSession> {
    const desc = await api.createSession(req);
    const session = new UiSession(
      api,
      desc,
      listener,
      maxUpdatesPerSecond,
      makeObjectUrl,
    );
    session.emit();
    return session;
  }

  /** Rebuild from server state after a reload; history replays the exact
   * preview sequence the server recorded. */
  static async restore(
    api: ApiClient,
    sessionId: string,
    listener: SessionListener,
    maxUpdatesPerSecond = 10,
    makeObjectUrl?: (blob: Blob) => string,
  ): Promise<UiSession> {
    const full = await api.getSession(sessionId);
    const session = new UiSession(
      api,
      full,
      listener,
      maxUpdatesPerSecond,
      makeObjectUrl,
    );
    session.state.history = full.history.map((h) => h.value);
    session.emit();
    return session;
  }

  get snapshot(): UiSessionState {
    return { ...this.state, history: [...this.state.history] };
  }

  /** Wheel event: one notch moves the value by range/100. */
  handleWheel(deltaY: number): void {
    const notches = wheelNotches(deltaY);
    if (notches === 0) {
      return;
    }
    this.adjustTo(this.state.value + notches * stepForRange(this.state.range));
  }

  /** Slider or direct entry. */
  adjustTo(rawValue: number): void {
    if (this.state.accepted) {
      return;
    }
    const value = clampToRange(rawValue, this.state.range);
    this.state.value = value; // optimistic display only
    this.state.previewStale = true;
    this.limiter.push(value);
    this.emit();
  }

  /** Enter key: freeze the session. */
  async acceptOnEnter(): Promise<void> {
    if (this.state.accepted) {
      return;
    }
    try {
      const desc = await this.api.accept(this.state.sessionId);
      this.state.accepted = true;
      this.state.value = desc.accepted_value ?? this.state.value;
      this.state.offline = false;
    } catch (err) {
      this.markOffline();
      throw err;
    }
    this.emit();
  }

  private async sendValue(value: number): Promise<void> {
    try {
      const desc = await this.api.setParam(this.state.sessionId, { value });
      this.onDescriptor(desc);
    } catch {
      this.markOffline();
    }
  }

  private onDescriptor(desc: SessionDescriptor): void {
    this.state.offline = false;
    // server truth wins unless a newer optimistic update is queued
    if (!this.limiter.hasPending) {
      this.state.value = desc.value;
    }
    this.state.history.push(desc.value);
    this.state.previewStale = true;
    this.emit();
    void this.preview.refresh(this.state.sessionId);
  }

  private onPreview(objectUrl: string, stale: boolean): void {
    if (this.lastObjectUrl && this.lastObjectUrl !== objectUrl) {
      try {
        URL.revokeObjectURL(this.lastObjectUrl);
      } catch {
        // non-browser object URLs (tests) have nothing to revoke
      }
    }
    this.lastObjectUrl = objectUrl;
    this.state.previewUrl = objectUrl;
    this.state.previewStale = stale;
    this.state.offline = false;
    this.emit();
    if (stale) {
      // the server is still rendering a newer version; poll it in
      void this.preview.refresh(this.state.sessionId);
    }
  }

  private markOffline(): void {
    this.state.offline = true;
    this.emit();
  }

  private emit(): void {
    this.listener(this.snapshot);
  }
}
