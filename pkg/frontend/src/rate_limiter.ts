/** Newest-wins rate limiter for parameter updates.
 *
 * The CPU preview renderer budgets at most `maxPerSecond` updates; wheel
 * events arrive much faster. Each push overwrites the pending value; sends
 * fire immediately when the interval allows and otherwise as one trailing
 * send, so the final value always reaches the server.
 */
export class RateLimiter<T> {
  private lastSend = -Infinity;
  private pending: T | undefined;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private readonly intervalMs: number;
  public sendCount = 0;

  constructor(
    private send: (value: T) => void,
    maxPerSecond = 10,
    private now: () => number = () => Date.now(),
  ) {
    this.intervalMs = 1000 / maxPerSecond;
  }

  push(value: T): void {
    this.pending = value;
    const wait = this.lastSend + this.intervalMs - this.now();
    if (wait <= 0) {
      this.flush();
    } else if (this.timer === null) {
      this.timer = setTimeout(() => this.flush(), wait);
    }
  }

  private flush(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    if (this.pending === undefined) {
      return;
    }
    const value = this.pending;
    this.pending = undefined;
    this.lastSend = this.now();
    this.sendCount += 1;
    this.send(value);
  }

  /** True while a trailing send is scheduled. */
  get hasPending(): boolean {
    return this.pending !== undefined;
  }
}
