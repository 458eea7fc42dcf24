/**
 * Clock abstraction: the engine never talks to timers directly, so tests can
 * drive it with a virtual clock and the browser build wraps the native one.
 */

export interface Clock {
  nowMs(): number;
  schedule(callback: () => void, delayMs: number): void;
}

interface PendingTimer {
  at: number;
  callback: () => void;
  seq: number;
}

/** Deterministic clock: time moves only through advanceTo/advanceBy. */
export class VirtualClock implements Clock {
  private now = 0;
  private timers: PendingTimer[] = [];
  private seq = 0;

  nowMs(): number {
    return this.now;
  }

  schedule(callback: () => void, delayMs: number): void {
    this.timers.push({ at: this.now + Math.max(0, delayMs), callback, seq: this.seq++ });
  }

  get pendingTimers(): number {
    return this.timers.length;
  }

  advanceTo(target: number): void {
    if (target < this.now) {
      throw new Error(`virtual clock cannot go back (${this.now} -> ${target})`);
    }
    for (;;) {
      const due = this.timers
        .filter((t) => t.at <= target)
        .sort((a, b) => a.at - b.at || a.seq - b.seq)[0];
      if (!due) break;
      this.timers.splice(this.timers.indexOf(due), 1);
      this.now = Math.max(this.now, due.at);
      due.callback();
    }
    this.now = target;
  }

  advanceBy(deltaMs: number): void {
    this.advanceTo(this.now + deltaMs);
  }
}

/** Wall-clock wrapper used by the browser bundle. */
export class SystemClock implements Clock {
  private readonly origin = Date.now();

  nowMs(): number {
    return Date.now() - this.origin;
  }

  schedule(callback: () => void, delayMs: number): void {
    setTimeout(callback, delayMs);
  }
}
