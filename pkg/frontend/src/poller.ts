/**
 * Fixed-interval poller with at most one in-flight request. A failed
 * request raises the retry banner; the next successful poll clears it.
 */

export class Poller<T> {
  private timer: ReturnType<typeof setInterval> | null = null;
  private inFlight = false;
  offline = false;

  constructor(
    private readonly fetchOnce: () => Promise<T>,
    private readonly onData: (data: T) => void,
    private readonly onOfflineChange: (offline: boolean) => void = () => {},
    readonly intervalMs: number = 2000,
  ) {}

  start(): void {
    if (this.timer !== null) {
      return;
    }
    void this.tick();
    this.timer = setInterval(() => void this.tick(), this.intervalMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  async tick(): Promise<void> {
    if (this.inFlight) {
      return;
    }
    this.inFlight = true;
    try {
      const data = await this.fetchOnce();
      if (this.offline) {
        this.offline = false;
        this.onOfflineChange(false);
      }
      this.onData(data);
    } catch {
      if (!this.offline) {
        this.offline = true;
        this.onOfflineChange(true);
      }
    } finally {
      this.inFlight = false;
    }
  }
}
