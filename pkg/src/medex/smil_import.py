"""SMIL import: parse a supported SMIL subset into the pivot format.

Supported: head/layout with root-layout and (possibly nested) regions in
pixels or percent, a body of par/seq/excl containers, media elements
(img/audio/video/text/ref) with offset or activateEvent begins and clock,
media, or indefinite durations. ``prefetch`` is skipped with a warning.
Animation, transitions, priority classes, link/anchor elements, and brushes
raise :class:`UnsupportedFeature`; timing attributes we cannot honor
(fill, repeat, end, ...) are dropped with a warning instead, which keeps
real-world files importable at the cost of an explicit fidelity loss.

A SMIL region referenced by several media elements is split into one sibling
copy per referencing element (ids suffixed ``-1..-N``) because the pivot
format gives every object its own region.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .errors import (
    SchemaError,
    UnsupportedFeature,
    ValidationReport,
    XmlSyntaxError,
)
from .model import (
    GENERATOR,
    INDEFINITE,
    MEDIA,
    UNRESOLVED,
    Asset,
    BeginValue,
    DurValue,
    Event,
    IntermediateDocument,
    Reference,
    RegionNode,
    Static,
    TextPayload,
    TimeKind,
    TimeNode,
)
from .resolver import propagate_static, round_half_up_div
from .source import NAME_RE
from .intermediate import validate_intermediate
from .xmlio import split_tag

SMIL_21_NS = "http://www.w3.org/2005/SMIL21/Language"
SMIL_30_NS = "http://www.w3.org/ns/SMIL"
_SMIL_NAMESPACES = (SMIL_21_NS, SMIL_30_NS)

DEFAULT_CANVAS = (640, 480)

_CONTAINER_TAGS = {"par": TimeKind.PAR, "seq": TimeKind.SEQ, "excl": TimeKind.EXCL}
_MEDIA_TAGS = {"img": "image", "audio": "audio", "video": "video", "text": "text", "ref": None}
_UNSUPPORTED_TAGS = {
    "animate", "animateMotion", "animateColor", "set", "transition",
    "transitionFilter", "priorityClass", "switch", "a", "anchor", "area",
    "brush", "textstream",
}
_IGNORED_TIMING_ATTRS = ("end", "fill", "repeatCount", "repeatDur", "endsync",
                         "min", "max", "restart")

_EXT_TYPES = {
    "png": "image", "jpg": "image", "jpeg": "image", "gif": "image", "bmp": "image",
    "svg": "image", "mp3": "audio", "wav": "audio", "ogg": "audio", "aac": "audio",
    "mp4": "video", "avi": "video", "mov": "video", "ogv": "video", "webm": "video",
    "txt": "text", "html": "text",
}


@dataclass
class ImportResult:
    doc: IntermediateDocument
    report: ValidationReport


@dataclass
class _SmilRegion:
    """Layout entry before duplication, geometry already in pixels."""

    smil_id: str
    rel_left: int
    rel_top: int
    width: int
    height: int
    z: int
    children: list["_SmilRegion"] = field(default_factory=list)


@dataclass
class _MediaUse:
    object_id: str
    asset: Asset
    region_id: str | None
    node: TimeNode


class _Importer:
    def __init__(self, data: bytes):
        self.data = data
        self.report = ValidationReport()
        self.media_uses: list[_MediaUse] = []
        self.taken_object_ids: set[str] = set()
        self.taken_time_ids: set[str] = set()
        self.generated_media = 0
        self.generated_containers = 0
        self.metas: dict[str, str] = {}
        self.canvas = DEFAULT_CANVAS
        self.toplevel_regions: list[_SmilRegion] = []

    # -- entry ---------------------------------------------------------------

    def run(self) -> ImportResult:
        try:
            root = ET.fromstring(self.data)
        except ET.ParseError as exc:
            raise XmlSyntaxError(f"malformed XML: {exc}") from exc
        ns, local = split_tag(root.tag)
        if local != "smil" or ns not in _SMIL_NAMESPACES:
            raise SchemaError(f"not a SMIL document root: {root.tag!r}", "/")
        self.ns = ns

        head = self._only_child(root, "head")
        body = self._only_child(root, "body")
        if head is not None:
            self._read_head(head)
        timing = self._read_body(body) if body is not None else self._empty_body()

        layout, region_map = self._build_layout()
        references, media = self._bind_references(region_map)

        head_map = {"title": self.metas.get("title", "untitled"), "generator": GENERATOR}
        for name, value in self.metas.items():
            if name not in head_map:
                head_map[name] = value

        doc = IntermediateDocument(
            head=head_map,
            canvas_width=self.canvas[0],
            canvas_height=self.canvas[1],
            layout=layout,
            timing=timing,
            references=references,
            media=media,
        )
        propagate_static(doc.timing)
        final = validate_intermediate(doc)
        if not final.ok:
            first = final.errors[0]
            raise SchemaError(
                f"imported document is not valid: {first.code} at {first.path}", first.path
            )
        return ImportResult(doc=doc, report=self.report)

    # -- generic helpers -------------------------------------------------------

    def _local(self, el: ET.Element, path: str) -> str | None:
        ns, local = split_tag(el.tag)
        if ns != self.ns:
            self.report.warn("IgnoredForeign", path, f"ignored foreign element {el.tag!r}")
            return None
        if local in _UNSUPPORTED_TAGS:
            raise UnsupportedFeature(f"SMIL feature {local!r} is not supported", path)
        return local

    def _only_child(self, root: ET.Element, name: str) -> ET.Element | None:
        found = [el for el in root if split_tag(el.tag) == (self.ns, name)]
        if len(found) > 1:
            raise SchemaError(f"multiple <{name}> elements", "/")
        return found[0] if found else None

    def _fresh_object_id(self, wanted: str | None) -> str:
        if wanted is None:
            self.generated_media += 1
            wanted = f"m{self.generated_media}"
        if not NAME_RE.match(wanted):
            raise SchemaError(f"invalid media id {wanted!r}", "body")
        if wanted in self.taken_object_ids:
            raise SchemaError(f"duplicate media id {wanted!r}", "body")
        self.taken_object_ids.add(wanted)
        return wanted

    def _fresh_time_id(self, wanted: str) -> str:
        candidate = wanted
        counter = 2
        while candidate in self.taken_time_ids:
            candidate = f"{wanted}-{counter}"
            counter += 1
        self.taken_time_ids.add(candidate)
        return candidate

    # -- head -----------------------------------------------------------------

    def _read_head(self, head: ET.Element) -> None:
        for el in head:
            local = self._local(el, "head")
            if local is None:
                continue
            if local == "meta":
                name, content = el.get("name"), el.get("content")
                if name and content is not None and name not in self.metas:
                    self.metas[name] = content
            elif local == "layout":
                self._read_layout(el)
            elif local == "prefetch":
                self.report.warn("SkippedPrefetch", "head", "prefetch element skipped")
            else:
                self.report.warn("IgnoredElement", "head", f"ignored head element {local!r}")

    def _read_layout(self, layout: ET.Element) -> None:
        root_layout = None
        regions: list[ET.Element] = []
        for el in layout:
            local = self._local(el, "layout")
            if local is None:
                continue
            if local == "root-layout":
                root_layout = el
            elif local == "region":
                regions.append(el)
            else:
                self.report.warn("IgnoredElement", "layout", f"ignored layout element {local!r}")
        if root_layout is not None:
            self.canvas = (
                self._geometry(root_layout, "width", self.canvas[0], DEFAULT_CANVAS[0]),
                self._geometry(root_layout, "height", self.canvas[1], DEFAULT_CANVAS[1]),
            )
        else:
            self.report.warn(
                "MissingRootLayout", "layout",
                f"no root-layout; assuming {DEFAULT_CANVAS[0]}x{DEFAULT_CANVAS[1]}",
            )
        self.generated_regions = 0
        self.toplevel_regions = [
            self._read_region(el, self.canvas[0], self.canvas[1]) for el in regions
        ]

    def _geometry(self, el: ET.Element, attr: str, parent_dim: int, default: int) -> int:
        raw = el.get(attr)
        if raw is None:
            return default
        if raw.endswith("%"):
            if not re.fullmatch(r"\d+", raw[:-1]):
                raise SchemaError(f"invalid {attr} value {raw!r}", "layout")
            return round_half_up_div(parent_dim * int(raw[:-1]), 100)
        if raw.endswith("px"):
            raw = raw[:-2]
        if not re.fullmatch(r"-?\d+", raw):
            raise SchemaError(f"invalid {attr} value {raw!r}", "layout")
        return int(raw)

    def _read_region(self, el: ET.Element, parent_w: int, parent_h: int) -> _SmilRegion:
        smil_id = el.get("{http://www.w3.org/XML/1998/namespace}id") or el.get("id")
        if smil_id is None:
            self.generated_regions += 1
            smil_id = f"region-{self.generated_regions}"
        path = f"layout/{smil_id}"
        for attr in ("fit", "backgroundColor", "showBackground", "regionName", "soundLevel"):
            if el.get(attr) is not None:
                self.report.warn("IgnoredAttribute", path, f"ignored region attribute {attr!r}")
        width = self._geometry(el, "width", parent_w, parent_w)
        height = self._geometry(el, "height", parent_h, parent_h)
        region = _SmilRegion(
            smil_id=smil_id,
            rel_left=self._geometry(el, "left", parent_w, 0),
            rel_top=self._geometry(el, "top", parent_h, 0),
            width=width,
            height=height,
            z=self._geometry(el, "z-index", 0, 0),
        )
        for child in el:
            local = self._local(child, path)
            if local is None:
                continue
            if local != "region":
                raise SchemaError(f"unknown element {local!r} inside region", path)
            region.children.append(self._read_region(child, width, height))
        return region

    # -- body / timing ----------------------------------------------------------

    def _empty_body(self) -> TimeNode:
        time_id = self._fresh_time_id("t-body")
        return TimeNode(time_id, TimeKind.SEQ, Static(0), UNRESOLVED)

    def _read_body(self, body: ET.Element) -> TimeNode:
        children = []
        for el in body:
            node = self._read_time_element(el, "body", parent_kind=TimeKind.SEQ)
            if node is not None:
                children.append(node)
        if len(children) == 1 and not children[0].is_leaf:
            return children[0]
        # SMIL body behaves as a seq; wrap loose children
        root = self._empty_body()
        root.children = children
        return root

    def _read_time_element(
        self, el: ET.Element, parent_path: str, parent_kind: TimeKind
    ) -> TimeNode | None:
        local = self._local(el, parent_path)
        if local is None:
            return None
        if local == "prefetch":
            self.report.warn("SkippedPrefetch", parent_path, "prefetch element skipped")
            return None
        if local in _CONTAINER_TAGS:
            return self._read_container(el, local, parent_path, parent_kind)
        if local in _MEDIA_TAGS:
            return self._read_media(el, local, parent_path, parent_kind)
        raise SchemaError(f"unknown element {local!r} in body", parent_path)

    def _timing_attrs(
        self, el: ET.Element, path: str, parent_kind: TimeKind
    ) -> tuple[BeginValue, DurValue]:
        for attr in _IGNORED_TIMING_ATTRS:
            if el.get(attr) is not None:
                self.report.warn("IgnoredAttribute", path, f"ignored timing attribute {attr!r}")
        begin = self._parse_begin(el.get("begin"), path)
        dur = self._parse_dur(el.get("dur"), path)
        if parent_kind is TimeKind.EXCL and not isinstance(begin, Event):
            self.report.warn(
                "UnreachableExclChild", path,
                "excl children activate only via click triggers; this child never will",
            )
        return begin, dur

    def _parse_begin(self, raw: str | None, path: str) -> BeginValue:
        if raw is None:
            return Static(0)
        raw = raw.strip()
        if ";" in raw:
            raise UnsupportedFeature("begin value lists are not supported", path)
        event = re.fullmatch(r"([A-Za-z_][\w.\-]*?)\.activateEvent", raw)
        if event:
            return Event(event.group(1))
        if raw == "indefinite" or raw.startswith(("wallclock(", "accesskey(")):
            raise UnsupportedFeature(f"begin value {raw!r} is not supported", path)
        return Static(parse_smil_clock(raw, path))

    def _parse_dur(self, raw: str | None, path: str) -> DurValue:
        if raw is None:
            return UNRESOLVED  # filled per element kind / propagation
        raw = raw.strip()
        if raw == "indefinite":
            return INDEFINITE
        if raw == "media":
            return MEDIA
        return Static(parse_smil_clock(raw, path))

    def _read_container(
        self, el: ET.Element, local: str, parent_path: str, parent_kind: TimeKind
    ) -> TimeNode:
        smil_id = el.get("{http://www.w3.org/XML/1998/namespace}id") or el.get("id")
        if smil_id is None or not NAME_RE.match(smil_id):
            self.generated_containers += 1
            smil_id = f"tc{self.generated_containers}"
        time_id = self._fresh_time_id(smil_id)
        path = f"{parent_path}/{time_id}"
        begin, dur = self._timing_attrs(el, path, parent_kind)
        kind = _CONTAINER_TAGS[local]
        node = TimeNode(time_id, kind, begin, dur)
        for child in el:
            child_node = self._read_time_element(child, path, parent_kind=kind)
            if child_node is not None:
                node.children.append(child_node)
        return node

    def _read_media(
        self, el: ET.Element, local: str, parent_path: str, parent_kind: TimeKind
    ) -> TimeNode:
        raw_id = el.get("{http://www.w3.org/XML/1998/namespace}id") or el.get("id")
        object_id = self._fresh_object_id(raw_id)
        path = f"{parent_path}/{object_id}"
        for child in el:
            child_local = self._local(child, path)
            if child_local is not None:
                self.report.warn("IgnoredElement", path,
                                 f"ignored media child element {child_local!r}")

        src = el.get("src")
        asset_type = _MEDIA_TAGS[local] or _sniff_type(src)
        if asset_type == "text":
            # SMIL text points at an external file; the pivot carries content
            # inline, so the import keeps the box and styling defaults only
            if src is not None:
                self.report.warn("TextContentUnavailable", path,
                                 f"text source {src!r} not inlined; importing empty text")
            asset = Asset(object_id, "text", text=TextPayload("", "sans-serif", 16, (0, 0, 0)))
        else:
            if src is None:
                raise SchemaError(f"{local} element is missing src", path)
            asset = Asset(object_id, asset_type, src=src)

        begin, dur = self._timing_attrs(el, path, parent_kind)
        if dur is UNRESOLVED:
            dur = MEDIA if asset_type in ("audio", "video") else INDEFINITE
        node = TimeNode(
            self._fresh_time_id(f"t-{object_id}"),
            TimeKind.LEAF, begin, dur, object_id=object_id,
        )
        self.media_uses.append(_MediaUse(object_id, asset, el.get("region"), node))
        return node

    # -- layout binding -----------------------------------------------------------

    def _build_layout(self) -> tuple[RegionNode, dict[str, str]]:
        """Duplicate reused regions and wrap everything under a canvas root.

        Returns the root region plus the mapping object id -> region id.
        """
        uses_by_region: dict[str, list[_MediaUse]] = {}
        for use in self.media_uses:
            uses_by_region.setdefault(use.region_id, []).append(use)

        known_ids = set()

        def collect(region: _SmilRegion):
            known_ids.add(region.smil_id)
            for child in region.children:
                collect(child)

        for region in self.toplevel_regions:
            collect(region)

        assignment: dict[str, str] = {}

        def convert(region: _SmilRegion, abs_left: int, abs_top: int) -> list[RegionNode]:
            uses = uses_by_region.get(region.smil_id, [])
            children = [
                node
                for child in region.children
                for node in convert(child, abs_left + region.rel_left, abs_top + region.rel_top)
            ]
            if len(uses) <= 1:
                node = self._region_node(region, region.smil_id, abs_left, abs_top)
                node.children = children
                if uses:
                    assignment[uses[0].object_id] = region.smil_id
                return [node]
            copies = []
            for index, use in enumerate(uses, start=1):
                copy_id = f"{region.smil_id}-{index}"
                node = self._region_node(region, copy_id, abs_left, abs_top)
                if index == 1:
                    node.children = children
                assignment[use.object_id] = copy_id
                copies.append(node)
            return copies

        root_children: list[RegionNode] = []
        for region in self.toplevel_regions:
            root_children.extend(convert(region, 0, 0))

        allocated = known_ids | set(assignment.values())

        def fresh_region_id(wanted: str) -> str:
            candidate = wanted
            counter = 2
            while candidate in allocated:
                candidate = f"{wanted}-{counter}"
                counter += 1
            allocated.add(candidate)
            return candidate

        # media bound to no or an unknown region get a synthesized full-canvas box
        for use in self.media_uses:
            if use.region_id is not None and use.region_id in known_ids:
                continue
            if use.region_id is not None:
                self.report.warn(
                    "MissingRegion", f"body/{use.object_id}",
                    f"region {use.region_id!r} is not declared; synthesizing one",
                )
            synth_id = fresh_region_id(f"r-auto-{use.object_id}")
            root_children.append(
                RegionNode(synth_id, 0, 0, self.canvas[0], self.canvas[1], 0, 0, 0)
            )
            assignment[use.object_id] = synth_id

        root = RegionNode(
            fresh_region_id("r-canvas"), 0, 0, self.canvas[0], self.canvas[1], 0, 0, 0,
            children=root_children,
        )
        return root, assignment

    def _region_node(
        self, region: _SmilRegion, region_id: str, abs_left: int, abs_top: int
    ) -> RegionNode:
        return RegionNode(
            region_id=region_id,
            rel_left=region.rel_left,
            rel_top=region.rel_top,
            width=region.width,
            height=region.height,
            abs_left=abs_left + region.rel_left,
            abs_top=abs_top + region.rel_top,
            z=region.z,
        )

    def _bind_references(
        self, region_map: dict[str, str]
    ) -> tuple[list[Reference], list[Asset]]:
        references = []
        media = []
        for use in self.media_uses:
            references.append(
                Reference(use.object_id, region_map[use.object_id], use.node.time_id)
            )
            media.append(use.asset)
        return references, media


def _sniff_type(src: str | None) -> str:
    if src:
        ext = src.rsplit(".", 1)[-1].lower() if "." in src else ""
        if ext in _EXT_TYPES:
            return _EXT_TYPES[ext]
    return "image"


def parse_smil_clock(text: str, path: str = "") -> int:
    """Parse a SMIL clock value (hh:mm:ss.f, mm:ss.f, or timecount) to ms."""
    text = text.strip()
    parts = text.split(":")
    if len(parts) == 3:
        h, m, s = parts
        if re.fullmatch(r"\d+", h) and re.fullmatch(r"[0-5]\d", m):
            return int(h) * 3600_000 + int(m) * 60_000 + _seconds_to_ms(s, path)
        raise SchemaError(f"invalid clock value {text!r}", path)
    if len(parts) == 2:
        m, s = parts
        if re.fullmatch(r"\d+", m):
            return int(m) * 60_000 + _seconds_to_ms(s, path)
        raise SchemaError(f"invalid clock value {text!r}", path)
    match = re.fullmatch(r"(\d+)(?:\.(\d+))?(h|min|s|ms)?", text)
    if match is None:
        raise SchemaError(f"invalid clock value {text!r}", path)
    whole, frac, metric = match.group(1), match.group(2) or "", match.group(3) or "s"
    scale = {"h": 3600_000, "min": 60_000, "s": 1000, "ms": 1}[metric]
    value = int(whole) * scale
    if frac:
        # fractional part scaled exactly, truncating below one millisecond
        value += int(frac) * scale // 10 ** len(frac)
    return value


def _seconds_to_ms(text: str, path: str) -> int:
    match = re.fullmatch(r"([0-5]\d)(?:\.(\d+))?", text)
    if match is None:
        raise SchemaError(f"invalid seconds field {text!r}", path)
    ms = int(match.group(1)) * 1000
    frac = match.group(2) or ""
    if frac:
        ms += int((frac + "000")[:3])
    return ms


def import_smil(data: bytes) -> ImportResult:
    """Import SMIL bytes; returns the pivot document plus a warning report."""
    return _Importer(data).run()
