"""Brute-force timeline simulation used as ground truth in timing tests.

This deliberately shares no code with the resolver: it steps the source
document millisecond by millisecond with a per-object state machine
(idle -> active -> done, done is terminal) and records when each media
object was presented. Containers drive their children top-down:

* par starts every child at its offset and ends when all children are done;
* seq starts children back-to-back, each offset counted from the moment its
  predecessor finished;
* excl starts children only on click events naming their trigger target,
  stopping whichever sibling is active; it never ends on its own.

An authored fixed duration on a container cuts the whole subtree short.
Media objects without a fixed duration take their length from the
``media_durations`` fixture map (audio/video) or display forever
(images/text) until an ancestor ends.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import ActivationTable
from .source import (
    CONTINUOUS_TYPES,
    ClickTrigger,
    ClockOffset,
    FixedDur,
    ObjectNode,
    SourceDocument,
    SpecialDur,
)

_IDLE, _ACTIVE, _DONE = "idle", "active", "done"


@dataclass(frozen=True)
class ClickEvent:
    at_ms: int
    target: str


@dataclass
class _State:
    phase: str = _IDLE
    started_at: int = -1
    done_at: int = -1
    ends_at: int | None = None  # planned time-driven end, None if unbounded
    advance_at: int = -1  # seq only: when the next pending child may begin
    next_child: int = 0  # seq only


class _Simulation:
    def __init__(self, doc: SourceDocument, events, media_durations, horizon_ms):
        self.doc = doc
        self.events = sorted(events, key=lambda e: (e.at_ms, e.target))
        self.fixtures = dict(media_durations or {})
        self.horizon = horizon_ms
        self.states: dict[str, _State] = {o.id: _State() for o in doc.root.walk()}
        self.parents: dict[str, ObjectNode | None] = {doc.root.id: None}
        for obj in doc.root.walk():
            for child in obj.children:
                self.parents[child.id] = obj
        self.intervals: dict[str, list[tuple[int, int]]] = {
            o.id: [] for o in doc.root.walk() if o.kind == "media"
        }

    # -- state transitions ---------------------------------------------------

    def activate(self, obj: ObjectNode, now: int) -> None:
        state = self.states[obj.id]
        state.phase = _ACTIVE
        state.started_at = now
        state.ends_at = self._planned_end(obj, now)
        if obj.kind == "seq":
            state.next_child = 0
            state.advance_at = now

    def _planned_end(self, obj: ObjectNode, now: int) -> int | None:
        dur = obj.timing.dur
        if isinstance(dur, FixedDur):
            return now + dur.ms
        if obj.kind != "media" or dur is SpecialDur.INDEFINITE:
            return None
        if dur is SpecialDur.MEDIA or obj.media.type in CONTINUOUS_TYPES:
            try:
                return now + self.fixtures[obj.id]
            except KeyError:
                raise ValueError(
                    f"media duration fixture missing for object {obj.id!r}"
                ) from None
        return None

    def finish(self, obj: ObjectNode, now: int) -> None:
        """Finish obj: close its interval and force the whole subtree over."""
        state = self.states[obj.id]
        if state.phase == _ACTIVE and obj.kind == "media" and now > state.started_at:
            self.intervals[obj.id].append((state.started_at, now))
        state.phase = _DONE
        state.done_at = now
        for child in obj.children:
            if self.states[child.id].phase != _DONE:
                self.finish(child, now)

    # -- per-millisecond evaluation -------------------------------------------

    def settle(self, now: int) -> None:
        """Apply every due time-driven transition; loop until stable."""
        changed = True
        while changed:
            changed = False
            for obj in self.doc.root.walk():
                state = self.states[obj.id]
                if state.phase == _IDLE:
                    if self._may_start(obj, now):
                        self.activate(obj, now)
                        changed = True
                elif state.phase == _ACTIVE:
                    if state.ends_at is not None and now >= state.ends_at:
                        self.finish(obj, now)
                        changed = True
                    elif self._content_over(obj):
                        self.finish(obj, now)
                        changed = True
                    elif obj.kind == "seq":
                        changed |= self._advance_seq(obj, state)

    def _may_start(self, obj: ObjectNode, now: int) -> bool:
        begin = obj.timing.begin
        if not isinstance(begin, ClockOffset):
            return False  # click triggers are handled by apply_click
        parent = self.parents[obj.id]
        if parent is None:
            return now >= begin.ms
        pstate = self.states[parent.id]
        if pstate.phase != _ACTIVE:
            return False
        if parent.kind == "par":
            return now >= pstate.started_at + begin.ms
        if parent.kind == "seq":
            return (
                pstate.next_child < len(parent.children)
                and parent.children[pstate.next_child] is obj
                and now >= pstate.advance_at + begin.ms
            )
        return False  # excl children only ever start on clicks

    def _content_over(self, obj: ObjectNode) -> bool:
        # an authored duration is the container's simple duration: it keeps
        # the container active after its content, or cuts it short; only
        # unspecified durations end with the content
        if obj.timing.dur is not SpecialDur.UNSPECIFIED:
            return False
        if obj.kind == "par":
            return all(self.states[c.id].phase == _DONE for c in obj.children)
        if obj.kind == "seq":
            return self.states[obj.id].next_child >= len(obj.children)
        return False

    def _advance_seq(self, obj: ObjectNode, state: _State) -> bool:
        if state.next_child >= len(obj.children):
            return False
        child = obj.children[state.next_child]
        child_state = self.states[child.id]
        if child_state.phase == _DONE:
            state.next_child += 1
            state.advance_at = max(state.advance_at, child_state.done_at)
            return True
        return False

    def apply_click(self, target: str, now: int) -> None:
        for obj in self.doc.root.walk():
            if obj.kind != "excl" or self.states[obj.id].phase != _ACTIVE:
                continue
            for child in obj.children:
                begin = child.timing.begin
                if (
                    isinstance(begin, ClickTrigger)
                    and begin.target == target
                    and self.states[child.id].phase == _IDLE
                ):
                    for sibling in obj.children:
                        if self.states[sibling.id].phase == _ACTIVE:
                            self.finish(sibling, now)
                    self.activate(child, now)
                    break  # one activation per excl per click

    # -- main loop -------------------------------------------------------------

    def run(self) -> ActivationTable:
        root_id = self.doc.root.id
        pending = list(self.events)
        cap = self.horizon if self.horizon is not None else self._safety_cap()
        now = 0
        while now <= cap:
            self.settle(now)
            while pending and pending[0].at_ms == now:
                self.apply_click(pending.pop(0).target, now)
                self.settle(now)
            if self.horizon is None and self.states[root_id].phase == _DONE:
                return self._table()
            now += 1
        if self.horizon is None:
            raise RuntimeError(
                "document never finishes; pass horizon_ms to bound the simulation"
            )
        # trim anything still active at the horizon
        for obj in self.doc.root.walk():
            if self.states[obj.id].phase != _DONE:
                self.finish(obj, self.horizon)
        return self._table()

    def _safety_cap(self) -> int:
        total = 0
        for obj in self.doc.root.walk():
            if isinstance(obj.timing.dur, FixedDur):
                total += obj.timing.dur.ms
            if isinstance(obj.timing.begin, ClockOffset):
                total += obj.timing.begin.ms
        total += sum(self.fixtures.values())
        total += max((e.at_ms for e in self.events), default=0)
        return total + 16

    def _table(self) -> ActivationTable:
        return ActivationTable(
            {object_id: sorted(spans) for object_id, spans in self.intervals.items()}
        )


def timeline_oracle(
    doc: SourceDocument,
    events: list[ClickEvent] | tuple[ClickEvent, ...] = (),
    media_durations: dict[str, int] | None = None,
    horizon_ms: int | None = None,
) -> ActivationTable:
    """Simulate the document and return per-media-object activation intervals.

    ``media_durations`` must cover every continuous media object without a
    fixed duration. Without ``horizon_ms`` the simulation runs until the root
    finishes and fails loudly if it never would; with it, still-active
    intervals are closed at the horizon.
    """
    return _Simulation(doc, events, media_durations, horizon_ms).run()
