/**
 * Clock abstraction: the engine never talks to timers directly, so tests can
 * drive it with a virtual clock and the browser build wraps the native one.
 */
/** Deterministic clock: time moves only through advanceTo/advanceBy. */
export class VirtualClock {
    constructor() {
        this.now = 0;
        this.timers = [];
        this.seq = 0;
    }
    nowMs() {
        return this.now;
    }
    schedule(callback, delayMs) {
        this.timers.push({ at: this.now + Math.max(0, delayMs), callback, seq: this.seq++ });
    }
    get pendingTimers() {
        return this.timers.length;
    }
    advanceTo(target) {
        if (target < this.now) {
            throw new Error(`virtual clock cannot go back (${this.now} -> ${target})`);
        }
        for (;;) {
            const due = this.timers
                .filter((t) => t.at <= target)
                .sort((a, b) => a.at - b.at || a.seq - b.seq)[0];
            if (!due)
                break;
            this.timers.splice(this.timers.indexOf(due), 1);
            this.now = Math.max(this.now, due.at);
            due.callback();
        }
        this.now = target;
    }
    advanceBy(deltaMs) {
        this.advanceTo(this.now + deltaMs);
    }
}
/** Wall-clock wrapper used by the browser bundle. */
export class SystemClock {
    constructor() {
        this.origin = Date.now();
    }
    nowMs() {
        return Date.now() - this.origin;
    }
    schedule(callback, delayMs) {
        setTimeout(callback, delayMs);
    }
}
