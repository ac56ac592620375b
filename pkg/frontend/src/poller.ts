// Polling loop: one status + frame + events sweep per interval, with at
// most one sweep in flight. A rejected events page (sequence gap)
// triggers a refetch from the last confirmed cursor within the same
// sweep, so the on-screen feed never reorders or skips.

import { GatewayClient, Frame } from "./client.js";
import { ConsoleState } from "./state.js";

export const POLL_INTERVAL_MS = 250;

export class Poller {
  lastFrame: Frame | null = null;
  private timer: ReturnType<typeof setInterval> | null = null;
  private inFlight = false;

  constructor(
    private readonly client: GatewayClient,
    private readonly state: ConsoleState,
    private readonly onUpdate: () => void = () => {},
  ) {}

  start(intervalMs: number = POLL_INTERVAL_MS): void {
    this.stop();
    this.timer = setInterval(() => void this.poll(), intervalMs);
    void this.poll();
  }

  stop(): void {
    if (this.timer !== null) clearInterval(this.timer);
    this.timer = null;
  }

  /** One full sweep; safe to call directly (tests do). */
  async poll(): Promise<void> {
    if (this.inFlight) return;
    this.inFlight = true;
    try {
      const status = await this.client.getStatus();
      this.state.applyStatus(status);
      this.lastFrame = await this.client.getFrame();
      await this.pollEvents();
    } catch (err) {
      this.state.markOffline(String(err));
    } finally {
      this.inFlight = false;
      this.onUpdate();
    }
  }

  async pollEvents(maxPages = 40): Promise<void> {
    for (let i = 0; i < maxPages; i++) {
      const page = await this.client.getEvents(this.state.eventCursor);
      if (!this.state.applyEvents(page.events)) {
        // gap: full refetch from the last confirmed cursor
        const retry = await this.client.getEvents(this.state.eventCursor);
        if (!this.state.applyEvents(retry.events)) return;
        continue;
      }
      if (page.events.length === 0) return;
    }
  }
}

/** Send one chat turn; retries reuse the pending tick (idempotent). */
export async function sendTurn(
  client: GatewayClient,
  state: ConsoleState,
  text: string,
): Promise<void> {
  const tick = state.allocateTick();
  state.beginTurn(text, tick);
  try {
    const reply = await client.sendCommand(text, tick);
    state.completeTurn(tick, reply.reply, reply.job_id);
  } catch (err) {
    state.failTurn(String(err));
    throw err;
  }
}
