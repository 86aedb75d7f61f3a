import type { ApiClient } from "./api.js";

/** Preview loading with one in-flight request per session, newest wins.
 *
 * Each refresh aborts any request still in the air; the resolved object URL
 * plus the server's staleness flag go to the callback. Callers release the
 * previous object URL themselves (the DOM layer owns that lifecycle).
 */
export class PreviewLoader {
  private controller: AbortController | null = null;
  private generation = 0;

  constructor(
    private api: ApiClient,
    private onPreview: (objectUrl: string, stale: boolean) => void,
    private onError: (err: unknown) => void = () => undefined,
    private makeObjectUrl: (blob: Blob) => string = (blob) =>
      URL.createObjectURL(blob),
  ) {}

  async refresh(sessionId: string): Promise<void> {
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    const generation = ++this.generation;
    try {
      const { blob, stale } = await this.api.fetchPreview(
        sessionId,
        controller.signal,
      );
      if (generation === this.generation) {
        this.onPreview(this.makeObjectUrl(blob), stale);
      }
    } catch (err) {
      if (!controller.signal.aborted) {
        this.onError(err);
      }
    }
  }
}
