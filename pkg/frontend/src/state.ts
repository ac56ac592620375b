// View state and its pure update rules. No DOM, no fetch: everything
// here is exercised directly by the test suite.
//
// Invariants:
//  * the event feed is exactly a prefix-ordered copy of the gateway log
//    (strictly increasing seq, no holes, no reordering on retry);
//  * transcript entries are keyed by command tick, so a retried command
//    can never appear twice;
//  * the rendered robot pose always comes from the latest accepted
//    status snapshot.

import type { EventRecord, StatusSnapshot } from "./client.js";

export interface ChatEntry {
  role: "user" | "bot";
  text: string;
  tick: number;
  jobId?: string;
}

export interface PendingTurn {
  text: string;
  tick: number;
}

export type Connection = "online" | "offline";

export class ConsoleState {
  transcript: ChatEntry[] = [];
  events: EventRecord[] = [];
  eventCursor = 0;
  status: StatusSnapshot | null = null;
  connection: Connection = "online";
  pending: PendingTurn | null = null;
  lastError: string | null = null;
  private nextTick = 1;

  /** Tick for a new turn; a failed turn keeps its tick for the retry. */
  allocateTick(): number {
    if (this.pending) return this.pending.tick;
    return this.nextTick++;
  }

  beginTurn(text: string, tick: number): void {
    this.pending = { text, tick };
    if (!this.transcript.some((e) => e.role === "user" && e.tick === tick)) {
      this.transcript.push({ role: "user", text, tick });
    }
  }

  completeTurn(tick: number, reply: string, jobId?: string): void {
    if (this.pending?.tick === tick) this.pending = null;
    this.connection = "online";
    if (!this.transcript.some((e) => e.role === "bot" && e.tick === tick)) {
      this.transcript.push({ role: "bot", text: reply, tick, jobId });
    }
  }

  /** Connection failure: banner goes up, the input stays for retry. */
  failTurn(message: string): void {
    this.connection = "offline";
    this.lastError = message;
  }

  applyStatus(status: StatusSnapshot): void {
    this.status = status;
    this.connection = "online";
  }

  markOffline(message: string): void {
    this.connection = "offline";
    this.lastError = message;
  }

  /**
   * Append one page of events. Returns false on a sequence gap, in
   * which case nothing is mutated and the caller must refetch from the
   * last confirmed cursor.
   */
  applyEvents(batch: EventRecord[]): boolean {
    let cursor = this.eventCursor;
    const fresh: EventRecord[] = [];
    for (const event of batch) {
      if (event.seq <= cursor) continue; // already confirmed, skip
      if (event.seq !== cursor + 1) return false; // gap: reject the page
      fresh.push(event);
      cursor = event.seq;
    }
    this.events.push(...fresh);
    this.eventCursor = cursor;
    return true;
  }

  safety(): string {
    return this.status?.robot.safety ?? "unknown";
  }
}
