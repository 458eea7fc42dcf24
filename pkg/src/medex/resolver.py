"""Static resolution: source tree -> fully computed pivot document.

Spatial values become integer pixels (percentages and centering computed
against the parent box, rounded half-up). The timing tree is normalized:
sequence children receive their accumulated begin even though it is
derivable from sibling durations, parallel containers get a last-end
duration, and anything depending on an actual media duration or a user
event is marked rather than guessed, so players can treat it dynamically.
"""

from __future__ import annotations

from .errors import InvariantViolation
from .model import (
    GENERATOR,
    INDEFINITE,
    MEDIA,
    UNRESOLVED,
    ActivationTable,
    Asset,
    Event,
    IntermediateDocument,
    Reference,
    RegionNode,
    Static,
    TextPayload,
    TimeKind,
    TimeNode,
)
from .source import (
    CENTER,
    ClickTrigger,
    CONTINUOUS_TYPES,
    FixedDur,
    Percent,
    Px,
    SourceDocument,
    ObjectNode,
    SpecialDur,
    validate_source,
)

_INF = float("inf")


def region_id_for(object_id: str) -> str:
    return f"r-{object_id}"


def time_id_for(object_id: str) -> str:
    return f"t-{object_id}"


def round_half_up_div(num: int, den: int) -> int:
    """num/den rounded half-up (0.5 rounds toward +inf); den must be > 0."""
    return (2 * num + den) // (2 * den)


# ---------------------------------------------------------------------------
# spatial resolution


def resolve_spatial(doc: SourceDocument) -> RegionNode:
    """Build the pixel-resolved region tree mirroring the object hierarchy."""
    return _resolve_region(doc.root, 0, 0, doc.canvas_width, doc.canvas_height)


def _resolve_length(value, parent_dim: int) -> int:
    if isinstance(value, Px):
        return value.value
    if isinstance(value, Percent):
        return round_half_up_div(parent_dim * value.value, 100)
    raise InvariantViolation(f"cannot resolve spatial value {value!r}")


def _resolve_region(obj: ObjectNode, abs_left: int, abs_top: int,
                    parent_w: int, parent_h: int) -> RegionNode:
    spatial = obj.spatial
    if spatial is None:
        rel_left = rel_top = 0
        width, height = parent_w, parent_h
        z = 0
    else:
        width = _resolve_length(spatial.width, parent_w)
        height = _resolve_length(spatial.height, parent_h)
        rel_left = (
            round_half_up_div(parent_w - width, 2)
            if spatial.left is CENTER
            else _resolve_length(spatial.left, parent_w)
        )
        rel_top = (
            round_half_up_div(parent_h - height, 2)
            if spatial.top is CENTER
            else _resolve_length(spatial.top, parent_h)
        )
        z = spatial.z
    region = RegionNode(
        region_id=region_id_for(obj.id),
        rel_left=rel_left,
        rel_top=rel_top,
        width=width,
        height=height,
        abs_left=abs_left + rel_left,
        abs_top=abs_top + rel_top,
        z=z,
    )
    region.children = [
        _resolve_region(child, region.abs_left, region.abs_top, width, height)
        for child in obj.children
    ]
    return region


# ---------------------------------------------------------------------------
# timing resolution


def resolve_timing(doc: SourceDocument) -> TimeNode:
    """Build the par/seq/excl/leaf tree and propagate static values."""
    root = _build_time_node(doc.root)
    propagate_static(root)
    return root


def _build_time_node(obj: ObjectNode) -> TimeNode:
    begin = obj.timing.begin
    begin_value = (
        Event(begin.target) if isinstance(begin, ClickTrigger) else Static(begin.ms)
    )
    dur = obj.timing.dur
    if obj.kind == "media":
        if isinstance(dur, FixedDur):
            dur_value = Static(dur.ms)
        elif dur is SpecialDur.MEDIA:
            dur_value = MEDIA
        elif dur is SpecialDur.INDEFINITE:
            dur_value = INDEFINITE
        elif obj.media is not None and obj.media.type in CONTINUOUS_TYPES:
            dur_value = MEDIA  # intrinsic playback length, known only at runtime
        else:
            dur_value = INDEFINITE  # images and text have no natural end
        return TimeNode(
            time_id=time_id_for(obj.id),
            kind=TimeKind.LEAF,
            begin=begin_value,
            dur=dur_value,
            object_id=obj.id,
        )
    if isinstance(dur, FixedDur):
        dur_value = Static(dur.ms)
    elif dur is SpecialDur.INDEFINITE:
        dur_value = INDEFINITE
    else:
        dur_value = UNRESOLVED  # unspecified: propagate_static computes it
    return TimeNode(
        time_id=time_id_for(obj.id),
        kind={"par": TimeKind.PAR, "seq": TimeKind.SEQ, "excl": TimeKind.EXCL}[obj.kind],
        begin=begin_value,
        dur=dur_value,
        children=[_build_time_node(child) for child in obj.children],
    )


def propagate_static(node: TimeNode) -> None:
    """Fill in all statically computable timing, bottom-up, in place.

    Rules: seq children get accumulated begins until a dynamic value breaks
    the chain (later begins stay unresolved); an unspecified seq duration is
    the last child end, par duration the max child end, excl duration
    indefinite. Authored container durations are never overwritten.
    """
    for child in node.children:
        propagate_static(child)

    if node.kind is TimeKind.SEQ:
        cursor: int | None = 0
        for child in node.children:
            if cursor is not None and isinstance(child.begin, Static):
                child.begin = Static(cursor + child.begin.ms)
                cursor = (
                    child.begin.ms + child.dur.ms
                    if isinstance(child.dur, Static)
                    else None
                )
            else:
                if isinstance(child.begin, Static):
                    child.begin = UNRESOLVED
                cursor = None
        if node.dur is UNRESOLVED and cursor is not None:
            node.dur = Static(cursor)
    elif node.kind is TimeKind.PAR:
        if node.dur is UNRESOLVED:
            ends: list[int] = []
            for child in node.children:
                if isinstance(child.begin, Static) and isinstance(child.dur, Static):
                    ends.append(child.begin.ms + child.dur.ms)
                else:
                    return
            node.dur = Static(max(ends, default=0))
    elif node.kind is TimeKind.EXCL:
        if node.dur is UNRESOLVED:
            node.dur = INDEFINITE


# ---------------------------------------------------------------------------
# compilation


def compile_document(doc: SourceDocument) -> IntermediateDocument:
    """Resolve a validated source document into the five-section pivot."""
    report = validate_source(doc)
    if not report.ok:
        first = report.errors[0]
        raise InvariantViolation(
            f"source document is invalid: {first.code} at {first.path}: {first.message}",
            first.path,
        )

    head = {"title": doc.title, "generator": GENERATOR}
    if doc.base_uri:
        head["base"] = doc.base_uri

    references: list[Reference] = []
    media: list[Asset] = []
    for obj in doc.root.walk():
        if obj.kind != "media":
            continue
        references.append(
            Reference(obj.id, region_id_for(obj.id), time_id_for(obj.id))
        )
        ref = obj.media
        if ref.type == "text":
            media.append(
                Asset(
                    object_id=obj.id,
                    type="text",
                    text=TextPayload(
                        content=ref.text_content,
                        font_family=ref.text_style.font_family,
                        font_size_px=ref.text_style.font_size_px,
                        color_rgb=ref.text_style.color_rgb,
                    ),
                )
            )
        else:
            media.append(Asset(object_id=obj.id, type=ref.type, src=ref.src))

    return IntermediateDocument(
        head=head,
        canvas_width=doc.canvas_width,
        canvas_height=doc.canvas_height,
        layout=resolve_spatial(doc),
        timing=resolve_timing(doc),
        references=references,
        media=media,
    )


# ---------------------------------------------------------------------------
# static activation intervals


def static_intervals(timing: TimeNode) -> tuple[ActivationTable, set[str]]:
    """Derive per-object activation intervals from the resolved tree.

    Returns the table of statically determined intervals plus the set of
    object ids whose activation cannot be known without running the document
    (media durations, begins after a dynamic sibling, endless leaves).
    Event-triggered subtrees are statically *empty*: without events they
    never activate. An authored container duration cuts its descendants;
    computed durations never do, by construction.
    """
    table: dict[str, list[tuple[int, int]]] = {}
    unknown: set[str] = set()

    def mark(node: TimeNode, into_unknown: bool) -> None:
        for sub in node.walk():
            if sub.is_leaf:
                if into_unknown:
                    unknown.add(sub.object_id)
                else:
                    table[sub.object_id] = []

    def visit(node: TimeNode, parent_start: int, cut: int | float) -> None:
        if isinstance(node.begin, Event):
            mark(node, into_unknown=False)
            return
        if not isinstance(node.begin, Static):
            mark(node, into_unknown=True)
            return
        start = parent_start + node.begin.ms
        if isinstance(node.dur, Static):
            candidate: int | float | None = start + node.dur.ms
        elif node.dur is INDEFINITE:
            candidate = _INF
        else:  # media or unresolved: end unknown unless the cut precedes start
            candidate = None
        if candidate is None:
            end = cut if cut <= start else None
        else:
            end = min(candidate, cut)

        if node.is_leaf:
            if end is None or end == _INF:
                unknown.add(node.object_id)
            elif end > start:
                table[node.object_id] = [(start, end)]
            else:
                table[node.object_id] = []
            return
        child_cut = end if isinstance(end, int) else cut
        for child in node.children:
            visit(child, start, child_cut)

    visit(timing, 0, _INF)
    return ActivationTable(table), unknown
