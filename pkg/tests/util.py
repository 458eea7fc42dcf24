"""Helpers shared by the test suite: corpus loading, tree shapes, writers."""

from __future__ import annotations

import json
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path

from medex.model import IntermediateDocument, TimeNode
from medex.oracle import ClickEvent
from medex.source import (
    CENTER,
    ClickTrigger,
    ClockOffset,
    FixedDur,
    MediaRef,
    ObjectNode,
    Percent,
    Px,
    SourceDocument,
    SpecialDur,
    parse_source,
)

CORPUS_DIR = Path(__file__).parent / "corpus"
GOLDEN_DIR = Path(__file__).parent / "golden"


@dataclass
class CorpusDoc:
    name: str
    path: Path
    data: bytes
    source: SourceDocument
    meta: dict = field(default_factory=dict)

    @property
    def doc_class(self) -> str:
        return self.meta.get("class", "static")

    @property
    def media_durations(self) -> dict[str, int]:
        return self.meta.get("mediaDurations", {})

    @property
    def alt_media_durations(self) -> dict[str, int]:
        return self.meta.get("altMediaDurations", {})

    @property
    def events(self) -> list[ClickEvent]:
        return [ClickEvent(e["atMs"], e["click"]) for e in self.meta.get("events", [])]

    @property
    def horizon_ms(self) -> int | None:
        return self.meta.get("horizonMs")


def load_corpus() -> list[CorpusDoc]:
    docs = []
    for path in sorted(CORPUS_DIR.glob("c*.xml")):
        meta_path = path.with_suffix(".meta.json")
        meta = json.loads(meta_path.read_text()) if meta_path.exists() else {}
        data = path.read_bytes()
        docs.append(CorpusDoc(path.stem, path, data, parse_source(data), meta))
    return docs


# ---------------------------------------------------------------------------
# structural helpers


def time_shape(node: TimeNode) -> tuple:
    """Kind-and-order tree shape, the unit of isomorphism checks."""
    return (node.kind.value, tuple(time_shape(child) for child in node.children))


def object_geometry(doc: IntermediateDocument) -> dict[str, tuple[int, int, int, int]]:
    """object id -> (width, height, absLeft, absTop) of its bound region."""
    regions = {region.region_id: region for region in doc.layout.walk()}
    return {
        ref.object_id: (
            regions[ref.region_id].width,
            regions[ref.region_id].height,
            regions[ref.region_id].abs_left,
            regions[ref.region_id].abs_top,
        )
        for ref in doc.references
    }


def etree_shape(el: ET.Element) -> tuple:
    from medex.xmlio import split_tag

    return (split_tag(el.tag)[1], tuple(etree_shape(child) for child in el))


def parse_css(data: bytes) -> dict[str, dict[str, str]]:
    rules: dict[str, dict[str, str]] = {}
    for match in re.finditer(r"([^{}]+)\{([^}]*)\}", data.decode("utf-8")):
        selector = match.group(1).strip()
        props = {}
        for line in match.group(2).split(";"):
            if ":" in line:
                name, value = line.split(":", 1)
                props[name.strip()] = value.strip()
        rules[selector] = props
    return rules


# ---------------------------------------------------------------------------
# source XML writer (tests build documents in memory and feed the parser)


def _length_attr(value) -> str:
    if isinstance(value, Px):
        return str(value.value)
    if isinstance(value, Percent):
        return f"{value.value}%"
    if value is CENTER:
        return "center"
    raise AssertionError(f"unexpected length {value!r}")


def _timing_attrs(obj: ObjectNode) -> str:
    parts = []
    begin = obj.timing.begin
    if isinstance(begin, ClickTrigger):
        parts.append(f'begin="click({begin.target})"')
    elif isinstance(begin, ClockOffset) and begin.ms:
        parts.append(f'begin="{begin.ms}ms"')
    dur = obj.timing.dur
    if isinstance(dur, FixedDur):
        parts.append(f'dur="{dur.ms}ms"')
    elif dur is SpecialDur.MEDIA:
        parts.append('dur="media"')
    elif dur is SpecialDur.INDEFINITE:
        parts.append('dur="indefinite"')
    return (" " + " ".join(parts)) if parts else ""


def _media_attrs(media: MediaRef) -> str:
    if media.type == "text":
        style = media.text_style
        color = "#%02x%02x%02x" % style.color_rgb
        return (
            f' type="text" font="{style.font_family}"'
            f' fontSize="{style.font_size_px}" color="{color}"'
        )
    return f' type="{media.type}" src="{media.src}"'


def source_to_xml(doc: SourceDocument) -> bytes:
    def write_object(obj: ObjectNode) -> str:
        attrs = f'id="{obj.id}" kind="{obj.kind}"'
        if obj.kind == "media":
            attrs += _media_attrs(obj.media)
        inner = []
        if obj.spatial is not None:
            s = obj.spatial
            inner.append(
                f'<spatial left="{_length_attr(s.left)}" top="{_length_attr(s.top)}"'
                f' width="{_length_attr(s.width)}" height="{_length_attr(s.height)}"'
                + (f' z="{s.z}"' if s.z else "")
                + "/>"
            )
        timing = _timing_attrs(obj)
        if timing:
            inner.append(f"<timing{timing}/>")
        text = ""
        if obj.kind == "media" and obj.media.type == "text":
            text = (
                obj.media.text_content.replace("&", "&amp;").replace("<", "&lt;")
            )
        children = "".join(write_object(child) for child in obj.children)
        return f'<object {attrs}>{text}{"".join(inner)}{children}</object>'

    title = doc.title.replace("&", "&amp;").replace("<", "&lt;").replace('"', "&quot;")
    return (
        f'<doc width="{doc.canvas_width}" height="{doc.canvas_height}" title="{title}">'
        f"{write_object(doc.root)}</doc>"
    ).encode("utf-8")
