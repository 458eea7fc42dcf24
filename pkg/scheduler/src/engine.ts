/**
 * Tick-driven scheduler: containers activate their children top-down, items
 * drive visibility of their targets through explicit effects.
 *
 * Node lifecycle is idle -> active -> done, and done is terminal. Sequences
 * advance as predecessors finish (authored begins are offsets from the
 * predecessor's end), parallels start children at offsets from their own
 * start, exclusives start children only on click triggers and stop whichever
 * sibling is active. A fixed container duration is a hard cut for the whole
 * subtree; media-dependent items wait for their element's ended event.
 *
 * Effects: natural expiry hides the target; a forced stop (interrupt or
 * ancestor cut) also stops playback. Activation shows the target and starts
 * playback for media-dependent items.
 */

import type { Clock } from "./clock.js";
import type { GraphNode, ScheduleGraph } from "./timesheet.js";

export type Effect =
  | { kind: "show"; target: string }
  | { kind: "hide"; target: string }
  | { kind: "playMedia"; target: string }
  | { kind: "stopMedia"; target: string };

export type SchedulerEvent =
  | { kind: "mediaEnded"; target: string; atMs: number }
  | { kind: "click"; target: string; atMs: number };

export class ClockRegression extends Error {}

export type Phase = "idle" | "active" | "done";

interface NodeState {
  phase: Phase;
  activatedAt: number;
  doneAt: number; // logical finish time, exact even under sparse ticks
  endsAt: number | null; // planned time-driven end
  nextChild: number; // seq only
  advanceAt: number; // seq only: base time for the next child's offset
}

export class Scheduler {
  private readonly graph: ScheduleGraph;
  private readonly states = new Map<GraphNode, NodeState>();
  private readonly parents = new Map<GraphNode, GraphNode | null>();
  private started = false;
  private startedAt = 0;
  private lastNow = -Infinity;

  constructor(graph: ScheduleGraph) {
    this.graph = graph;
    const index = (node: GraphNode, parent: GraphNode | null): void => {
      this.states.set(node, {
        phase: "idle",
        activatedAt: -1,
        doneAt: -1,
        endsAt: null,
        nextChild: 0,
        advanceAt: -1,
      });
      this.parents.set(node, parent);
      for (const child of node.children) index(child, node);
    };
    index(this.graph.root, null);
    this.parents.set(this.graph.root, null);
  }

  start(clock: Clock): void {
    if (this.started) {
      throw new Error("scheduler already started");
    }
    this.started = true;
    this.startedAt = clock.nowMs();
    this.lastNow = this.startedAt;
  }

  tick(now: number): Effect[] {
    if (!this.started) {
      throw new Error("tick before start");
    }
    if (now < this.lastNow) {
      throw new ClockRegression(`clock went back: ${this.lastNow} -> ${now}`);
    }
    this.lastNow = now;
    const effects: Effect[] = [];
    this.settle(now, effects);
    return effects;
  }

  handleEvent(event: SchedulerEvent): Effect[] {
    if (!this.started) {
      throw new Error("event before start");
    }
    const now = Math.max(this.lastNow, event.atMs);
    this.lastNow = now;
    const effects: Effect[] = [];
    this.settle(now, effects);
    if (event.kind === "mediaEnded") {
      this.onMediaEnded(event.target, now, effects);
    } else if (event.kind === "click") {
      this.onClick(event.target, now, effects);
    }
    this.settle(now, effects);
    return effects;
  }

  /** Targets of currently active items, sorted (test and adapter helper). */
  activeTargets(): string[] {
    const out: string[] = [];
    for (const [node, state] of this.states) {
      if (node.kind === "item" && state.phase === "active" && node.target) {
        out.push(node.target);
      }
    }
    return out.sort();
  }

  allDone(): boolean {
    return this.states.get(this.graph.root)!.phase === "done";
  }

  /** nodeId -> phase snapshot, for diagnostics and invariant tests. */
  phases(): Map<string, Phase> {
    const out = new Map<string, Phase>();
    for (const [node, state] of this.states) {
      out.set(node.nodeId, state.phase);
    }
    return out;
  }

  // -- transitions ----------------------------------------------------------

  private settle(now: number, effects: Effect[]): void {
    let changed = true;
    while (changed) {
      changed = false;
      for (const node of this.walk()) {
        const state = this.states.get(node)!;
        if (state.phase === "idle") {
          const startAt = this.startTime(node, now);
          if (startAt !== null) {
            this.activate(node, startAt, effects);
            changed = true;
          }
        } else if (state.phase === "active") {
          if (state.endsAt !== null && now >= state.endsAt) {
            this.finish(node, state.endsAt, false, effects);
            changed = true;
          } else {
            const contentEnd = this.contentEnd(node);
            if (contentEnd !== null) {
              this.finish(node, contentEnd, false, effects);
              changed = true;
            } else if (node.kind === "seq" && this.advanceSeq(node, state)) {
              changed = true;
            }
          }
        }
      }
    }
  }

  private *walk(node: GraphNode = this.graph.root): Generator<GraphNode> {
    yield node;
    for (const child of node.children) {
      yield* this.walk(child);
    }
  }

  /** Logical start time when the node is due at `now`, else null. */
  private startTime(node: GraphNode, now: number): number | null {
    if (node.begin.type !== "offset") {
      return null; // click triggers go through onClick
    }
    const parent = this.parents.get(node) ?? null;
    let base: number;
    if (parent === null) {
      base = this.startedAt;
    } else {
      const parentState = this.states.get(parent)!;
      if (parentState.phase !== "active") {
        return null;
      }
      if (parent.kind === "par") {
        base = parentState.activatedAt;
      } else if (parent.kind === "seq") {
        if (
          parentState.nextChild >= parent.children.length ||
          parent.children[parentState.nextChild] !== node
        ) {
          return null;
        }
        base = parentState.advanceAt;
      } else {
        return null; // excl children only start on clicks
      }
      // never before the container cut
      if (parentState.endsAt !== null && base + node.begin.ms >= parentState.endsAt) {
        return null;
      }
    }
    const startAt = base + node.begin.ms;
    return now >= startAt ? startAt : null;
  }

  private activate(node: GraphNode, now: number, effects: Effect[]): void {
    const state = this.states.get(node)!;
    state.phase = "active";
    state.activatedAt = now;
    state.endsAt = node.dur.type === "ms" ? now + node.dur.ms : null;
    if (node.kind === "seq") {
      state.nextChild = 0;
      state.advanceAt = now;
    }
    if (node.kind === "item" && node.target) {
      effects.push({ kind: "show", target: node.target });
      if (node.dur.type === "media") {
        effects.push({ kind: "playMedia", target: node.target });
      }
    }
  }

  private finish(node: GraphNode, at: number, forced: boolean, effects: Effect[]): void {
    const state = this.states.get(node)!;
    const wasActive = state.phase === "active";
    state.phase = "done";
    state.doneAt = at;
    if (wasActive && node.kind === "item" && node.target) {
      effects.push({ kind: "hide", target: node.target });
      if (forced) {
        effects.push({ kind: "stopMedia", target: node.target });
      }
    }
    for (const child of node.children) {
      const childState = this.states.get(child)!;
      if (childState.phase !== "done") {
        // children outlive their container only when it is cut short
        this.finish(child, at, childState.phase === "active", effects);
      }
    }
  }

  /** Logical end time of an auto-duration container whose content is over. */
  private contentEnd(node: GraphNode): number | null {
    if (node.dur.type !== "auto") {
      return null; // an authored duration fully owns the extent
    }
    const state = this.states.get(node)!;
    if (node.kind === "par") {
      let end = state.activatedAt;
      for (const child of node.children) {
        const childState = this.states.get(child)!;
        if (childState.phase !== "done") {
          return null;
        }
        end = Math.max(end, childState.doneAt);
      }
      return end;
    }
    if (node.kind === "seq") {
      return state.nextChild >= node.children.length ? state.advanceAt : null;
    }
    return null; // excl and auto items stay active until something stops them
  }

  private advanceSeq(node: GraphNode, state: NodeState): boolean {
    if (state.nextChild >= node.children.length) {
      return false;
    }
    const child = node.children[state.nextChild];
    const childState = this.states.get(child)!;
    if (childState.phase === "done") {
      state.nextChild += 1;
      state.advanceAt = Math.max(state.advanceAt, childState.doneAt);
      return true;
    }
    return false;
  }

  private onMediaEnded(target: string, now: number, effects: Effect[]): void {
    for (const node of this.walk()) {
      if (
        node.kind === "item" &&
        node.target === target &&
        node.dur.type === "media" &&
        this.states.get(node)!.phase === "active"
      ) {
        this.finish(node, now, false, effects);
      }
    }
  }

  private onClick(target: string, now: number, effects: Effect[]): void {
    for (const node of this.walk()) {
      if (node.kind !== "excl" || this.states.get(node)!.phase !== "active") {
        continue;
      }
      for (const child of node.children) {
        if (
          child.begin.type === "click" &&
          child.begin.target === target &&
          this.states.get(child)!.phase === "idle"
        ) {
          for (const sibling of node.children) {
            if (this.states.get(sibling)!.phase === "active") {
              this.finish(sibling, now, true, effects);
            }
          }
          this.activate(child, now, effects);
          break; // one activation per excl per click
        }
      }
    }
  }
}
