"""Pivot document model: regions, timing tree, references, assets.

The resolver produces these structures; the serializer, validators, and all
backends consume them. Spatial values are integer pixels and timing values
integer milliseconds throughout; anything that could not be computed
statically is carried as an explicit marker instead of a guess.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

GENERATOR = "medex 0.1.0"


@dataclass(frozen=True)
class Static:
    """A statically known time value, in milliseconds."""

    ms: int


@dataclass(frozen=True)
class Event:
    """A begin triggered by a user click on another object."""

    target: str


class Marker(Enum):
    """Non-numeric timing values: dynamic, endless, or simply unknown."""

    MEDIA = "media"
    INDEFINITE = "indefinite"
    UNRESOLVED = "unresolved"


MEDIA = Marker.MEDIA
INDEFINITE = Marker.INDEFINITE
UNRESOLVED = Marker.UNRESOLVED

# begin: offset / click trigger / not statically known
BeginValue = Static | Event | Marker
# dur: fixed / intrinsic media length / endless / not statically known
DurValue = Static | Marker


class TimeKind(Enum):
    PAR = "par"
    SEQ = "seq"
    EXCL = "excl"
    LEAF = "leaf"


@dataclass
class RegionNode:
    """One rectangular display area; geometry is fully resolved pixels.

    ``rel_left``/``rel_top`` position the region inside its parent box,
    ``abs_left``/``abs_top`` repeat the same position relative to the canvas
    origin. The redundancy is deliberate: backends pick whichever form their
    target needs without recomputing.
    """

    region_id: str
    rel_left: int
    rel_top: int
    width: int
    height: int
    abs_left: int
    abs_top: int
    z: int = 0
    children: list[RegionNode] = field(default_factory=list)

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass
class TimeNode:
    """One node of the timing tree: par/seq/excl container or media leaf."""

    time_id: str
    kind: TimeKind
    begin: BeginValue
    dur: DurValue
    object_id: str | None = None  # leaves only
    children: list[TimeNode] = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return self.kind is TimeKind.LEAF

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass(frozen=True)
class Reference:
    """Links one object to its region and its leaf time node."""

    object_id: str
    region_id: str
    time_id: str


@dataclass(frozen=True)
class TextPayload:
    """Inline text content plus the minimal styling the pipeline carries."""

    content: str
    font_family: str
    font_size_px: int
    color_rgb: tuple[int, int, int]


@dataclass(frozen=True)
class Asset:
    """One external or inline media item owned by exactly one object."""

    object_id: str
    type: str  # image | audio | video | text
    src: str | None = None
    text: TextPayload | None = None


@dataclass
class IntermediateDocument:
    """The five-section pivot: head, layout, timing, references, media.

    ``head`` is an ordered name-to-value map and always carries at least
    ``title`` and ``generator``. ``head_foreign`` holds foreign-namespace
    head content as compact canonical XML snippets so that round trips stay
    byte-exact.
    """

    head: dict[str, str]
    canvas_width: int
    canvas_height: int
    layout: RegionNode
    timing: TimeNode
    references: list[Reference]
    media: list[Asset]
    head_foreign: list[str] = field(default_factory=list)

    def regions(self) -> list[RegionNode]:
        return list(self.layout.walk())

    def time_nodes(self) -> list[TimeNode]:
        return list(self.timing.walk())

    def asset_for(self, object_id: str) -> Asset | None:
        for asset in self.media:
            if asset.object_id == object_id:
                return asset
        return None

    def reference_for(self, object_id: str) -> Reference | None:
        for ref in self.references:
            if ref.object_id == object_id:
                return ref
        return None


@dataclass
class ActivationTable:
    """Object id -> sorted disjoint half-open activation intervals [b, e)."""

    entries: dict[str, list[tuple[int, int]]] = field(default_factory=dict)

    def active_at(self, at_ms: int) -> set[str]:
        return {
            object_id
            for object_id, spans in self.entries.items()
            if any(b <= at_ms < e for b, e in spans)
        }

    def end_ms(self) -> int:
        """Largest interval end, 0 when nothing was ever active."""
        return max((e for spans in self.entries.values() for _, e in spans), default=0)
