/**
 * Browser glue: boot the scheduler from the live document, apply effects to
 * the DOM, and forward native events.
 *
 * Visibility is driven through the `medex-hidden` class (all item targets
 * are hidden up front, the engine shows them); playback uses the media
 * element API where available. Effects are idempotent: class toggles and
 * play/pause calls repeat harmlessly.
 */

import { SystemClock } from "./clock.js";
import { Scheduler, type Effect } from "./engine.js";
import { loadTimesheet, type ElementLike } from "./timesheet.js";

const HIDDEN_CLASS = "medex-hidden";
const TICK_MS = 10;

type MediaElement = HTMLElement & {
  play?: () => Promise<void> | void;
  pause?: () => void;
  currentTime?: number;
};

export function applyEffect(doc: Document, effect: Effect): void {
  const el = doc.getElementById(effect.target) as MediaElement | null;
  if (!el) {
    return;
  }
  switch (effect.kind) {
    case "show":
      el.classList.remove(HIDDEN_CLASS);
      if (typeof el.play === "function" && (el.tagName === "AUDIO" || el.tagName === "VIDEO")) {
        void el.play();
      }
      break;
    case "hide":
      el.classList.add(HIDDEN_CLASS);
      break;
    case "playMedia":
      if (typeof el.play === "function") {
        void el.play();
      }
      break;
    case "stopMedia":
      if (typeof el.pause === "function") {
        el.pause();
      }
      break;
  }
}

export function boot(doc: Document): void {
  const graph = loadTimesheet(doc.documentElement as unknown as ElementLike);

  // items command visibility from here on: start everything hidden
  const hideTargets = (node: { target: string | null; children: any[] }): void => {
    if (node.target) {
      doc.getElementById(node.target)?.classList.add(HIDDEN_CLASS);
    }
    node.children.forEach(hideTargets);
  };
  hideTargets(graph.root);

  const scheduler = new Scheduler(graph);
  const clock = new SystemClock();
  scheduler.start(clock);

  const apply = (effects: Effect[]): void => {
    for (const effect of effects) {
      applyEffect(doc, effect);
    }
  };

  doc.addEventListener("click", (event) => {
    const target = event.target as HTMLElement | null;
    const id = target?.closest?.("[id]")?.id ?? target?.id;
    if (id) {
      apply(scheduler.handleEvent({ kind: "click", target: id, atMs: clock.nowMs() }));
    }
  });
  doc.addEventListener(
    "ended",
    (event) => {
      const id = (event.target as HTMLElement | null)?.id;
      if (id) {
        apply(scheduler.handleEvent({ kind: "mediaEnded", target: id, atMs: clock.nowMs() }));
      }
    },
    true,
  );

  const loop = (): void => {
    apply(scheduler.tick(clock.nowMs()));
    if (!scheduler.allDone()) {
      clock.schedule(loop, TICK_MS);
    }
  };
  loop();
}
