import { describe, expect, it } from "vitest";

import { VirtualClock } from "../src/clock.js";
import { ClockRegression, Scheduler, type Effect } from "../src/engine.js";
import { loadTimesheet, type ScheduleGraph } from "../src/timesheet.js";
import { parseXml } from "./xml.js";

function graphFor(timesheet: string, ids: string[]): ScheduleGraph {
  const divs = ids.map((id) => `<div id="${id}"></div>`).join("");
  return loadTimesheet(
    parseXml(`<html><head>${timesheet}</head><body>${divs}</body></html>`),
  );
}

function started(timesheet: string, ids: string[]): Scheduler {
  const scheduler = new Scheduler(graphFor(timesheet, ids));
  scheduler.start(new VirtualClock());
  return scheduler;
}

const SEQ_5_3 = `<timesheet><seq id="s" begin="0ms" dur="8000ms">
  <item id="i1" begin="0ms" dur="5000ms" select="#first"/>
  <item id="i2" begin="0ms" dur="3000ms" select="#second"/>
</seq></timesheet>`;

describe("sequence playback", () => {
  it("keeps the first item active until its duration elapses", () => {
    const scheduler = started(SEQ_5_3, ["first", "second"]);
    scheduler.tick(0);
    expect(scheduler.activeTargets()).toEqual(["first"]);
    scheduler.tick(4999);
    expect(scheduler.activeTargets()).toEqual(["first"]);
  });

  it("swaps items with a hide/show pair at the boundary", () => {
    const scheduler = started(SEQ_5_3, ["first", "second"]);
    scheduler.tick(4999);
    expect(scheduler.tick(5000)).toEqual([
      { kind: "hide", target: "first" },
      { kind: "show", target: "second" },
    ]);
  });

  it("stays exact under sparse ticks", () => {
    const scheduler = started(SEQ_5_3, ["first", "second"]);
    // no intermediate ticks at all: transitions use logical times
    scheduler.tick(7999);
    expect(scheduler.activeTargets()).toEqual(["second"]);
    scheduler.tick(8000);
    expect(scheduler.activeTargets()).toEqual([]);
    expect(scheduler.allDone()).toBe(true);
  });
});

describe("parallel start and terminal behavior", () => {
  it("shows every zero-offset par child on the first tick", () => {
    const scheduler = started(
      `<timesheet><par id="p">
         <item select="#a" begin="0ms" dur="1000ms"/>
         <item select="#b" begin="0ms" dur="2000ms"/>
         <item select="#c" begin="500ms" dur="1000ms"/>
       </par></timesheet>`,
      ["a", "b", "c"],
    );
    const effects = scheduler.tick(0);
    expect(effects).toContainEqual({ kind: "show", target: "a" });
    expect(effects).toContainEqual({ kind: "show", target: "b" });
    expect(effects).not.toContainEqual({ kind: "show", target: "c" });
  });

  it("returns empty effect lists forever once everything is done", () => {
    const scheduler = started(SEQ_5_3, ["first", "second"]);
    scheduler.tick(10000);
    expect(scheduler.allDone()).toBe(true);
    for (const now of [10010, 10020, 11000, 50000]) {
      expect(scheduler.tick(now)).toEqual([]);
    }
  });

  it("rejects a clock running backwards", () => {
    const scheduler = started(SEQ_5_3, ["first", "second"]);
    scheduler.tick(100);
    expect(() => scheduler.tick(99)).toThrow(ClockRegression);
  });
});

describe("media-dependent durations", () => {
  const SEQ_MEDIA = `<timesheet><seq id="s">
    <item id="i1" begin="0ms" dur="5000ms" select="#image"/>
    <item id="i2" begin="0ms" dur="media" select="#audio"/>
  </seq></timesheet>`;

  it("waits for the ended event and then lets the seq finish", () => {
    const scheduler = started(SEQ_MEDIA, ["image", "audio"]);
    scheduler.tick(5000);
    expect(scheduler.activeTargets()).toEqual(["audio"]);
    scheduler.tick(8999);
    expect(scheduler.activeTargets()).toEqual(["audio"]);
    const effects = scheduler.handleEvent({ kind: "mediaEnded", target: "audio", atMs: 9000 });
    expect(effects).toContainEqual({ kind: "hide", target: "audio" });
    expect(scheduler.allDone()).toBe(true);
  });

  it("starts playback when a media item activates", () => {
    const scheduler = started(SEQ_MEDIA, ["image", "audio"]);
    const effects = scheduler.tick(5000);
    expect(effects).toContainEqual({ kind: "playMedia", target: "audio" });
  });
});

describe("click-driven excl", () => {
  const EXCL = `<timesheet><par id="root">
    <item id="bg" select="#canvasbg" begin="0ms" dur="indefinite"/>
    <excl id="x">
      <item id="p1" select="#panel1" begin="click(btn1)" dur="2000ms"/>
      <item id="p2" select="#panel2" begin="click(btn2)" dur="indefinite"/>
    </excl>
  </par></timesheet>`;
  const IDS = ["canvasbg", "panel1", "panel2", "btn1", "btn2"];

  it("activates a child on its trigger and stops the active sibling", () => {
    const scheduler = started(EXCL, IDS);
    scheduler.tick(0);
    scheduler.handleEvent({ kind: "click", target: "btn1", atMs: 1000 });
    expect(scheduler.activeTargets()).toContain("panel1");
    const effects = scheduler.handleEvent({ kind: "click", target: "btn2", atMs: 1500 });
    expect(effects).toEqual([
      { kind: "hide", target: "panel1" },
      { kind: "stopMedia", target: "panel1" },
      { kind: "show", target: "panel2" },
    ]);
  });

  it("expires a clicked child after its fixed duration", () => {
    const scheduler = started(EXCL, IDS);
    scheduler.tick(0);
    scheduler.handleEvent({ kind: "click", target: "btn1", atMs: 2000 });
    scheduler.tick(3999);
    expect(scheduler.activeTargets()).toContain("panel1");
    const effects = scheduler.tick(4000);
    expect(effects).toEqual([{ kind: "hide", target: "panel1" }]);
  });

  it("ignores clicks on targets that trigger nothing", () => {
    const scheduler = started(EXCL, IDS);
    scheduler.tick(0);
    expect(scheduler.handleEvent({ kind: "click", target: "canvasbg", atMs: 50 })).toEqual([]);
    expect(scheduler.handleEvent({ kind: "click", target: "nope", atMs: 60 })).toEqual([]);
  });

  it("never reactivates a done child", () => {
    const scheduler = started(EXCL, IDS);
    scheduler.tick(0);
    scheduler.handleEvent({ kind: "click", target: "btn1", atMs: 100 });
    scheduler.tick(5000); // panel1 expired at 2100
    expect(scheduler.handleEvent({ kind: "click", target: "btn1", atMs: 6000 })).toEqual([]);
  });
});

describe("container cuts", () => {
  it("an authored container duration force-stops the subtree", () => {
    const scheduler = started(
      `<timesheet><par id="p" dur="3000ms">
         <item select="#held" begin="0ms" dur="indefinite"/>
       </par></timesheet>`,
      ["held"],
    );
    scheduler.tick(0);
    const effects = scheduler.tick(3000);
    expect(effects).toEqual([
      { kind: "hide", target: "held" },
      { kind: "stopMedia", target: "held" },
    ]);
    expect(scheduler.allDone()).toBe(true);
  });

  it("an authored duration keeps a container alive past its content", () => {
    const scheduler = started(
      `<timesheet><seq id="s">
         <par id="inner" dur="2000ms">
           <item select="#quick" begin="0ms" dur="500ms"/>
         </par>
         <item select="#after" begin="0ms" dur="1000ms"/>
       </seq></timesheet>`,
      ["quick", "after"],
    );
    scheduler.tick(1999);
    expect(scheduler.activeTargets()).toEqual([]);
    scheduler.tick(2000);
    expect(scheduler.activeTargets()).toEqual(["after"]);
  });
});

describe("state machine safety", () => {
  function mulberry32(seed: number): () => number {
    let a = seed >>> 0;
    return () => {
      a = (a + 0x6d2b79f5) >>> 0;
      let t = a;
      t = Math.imul(t ^ (t >>> 15), t | 1);
      t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
      return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
    };
  }

  it("no node ever leaves done under randomized ticks and clicks", () => {
    const timesheet = `<timesheet><par id="root">
      <seq id="s">
        <item id="a" select="#a" begin="100ms" dur="400ms"/>
        <item id="b" select="#b" begin="0ms" dur="300ms"/>
      </seq>
      <excl id="x">
        <item id="p" select="#p" begin="click(a)" dur="500ms"/>
        <item id="q" select="#q" begin="click(b)" dur="indefinite"/>
      </excl>
      <item id="c" select="#c" begin="250ms" dur="1000ms"/>
    </par></timesheet>`;
    const ids = ["a", "b", "c", "p", "q"];

    for (let seed = 1; seed <= 25; seed++) {
      const random = mulberry32(seed);
      const scheduler = new Scheduler(graphFor(timesheet, ids));
      scheduler.start(new VirtualClock());
      const rank = { idle: 0, active: 1, done: 2 } as const;
      let previous = scheduler.phases();
      let now = 0;
      for (let step = 0; step < 120; step++) {
        now += Math.floor(random() * 40);
        if (random() < 0.25) {
          const target = ids[Math.floor(random() * ids.length)];
          scheduler.handleEvent({ kind: "click", target, atMs: now });
        } else {
          scheduler.tick(now);
        }
        const current = scheduler.phases();
        for (const [nodeId, phase] of current) {
          const before = previous.get(nodeId) ?? "idle";
          expect(
            rank[phase] >= rank[before],
            `seed ${seed}: node ${nodeId} went ${before} -> ${phase}`,
          ).toBe(true);
        }
        previous = current;
      }
    }
  });
});

describe("effect idempotence", () => {
  function visibilityAfter(effects: Effect[], state: Map<string, boolean>): Map<string, boolean> {
    const out = new Map(state);
    for (const effect of effects) {
      if (effect.kind === "show") out.set(effect.target, true);
      if (effect.kind === "hide") out.set(effect.target, false);
    }
    return out;
  }

  it("applying a tick's effects twice gives the same visibility", () => {
    const scheduler = started(SEQ_5_3, ["first", "second"]);
    let state = new Map<string, boolean>();
    for (const now of [0, 2500, 5000, 7999, 8000, 9000]) {
      const effects = scheduler.tick(now);
      const once = visibilityAfter(effects, state);
      const twice = visibilityAfter(effects, once);
      expect(twice).toEqual(once);
      state = once;
    }
  });
});
