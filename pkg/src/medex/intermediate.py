"""The pivot XML format: canonical serialization, parsing, validation.

The wire form is a ``document`` root in the published intermediate namespace
with five sections in fixed order: head (metadata), layout (resolved region
tree), timing (par/seq/excl/media tree), references (object -> region/time
links), media (asset list). Serialization is canonical, so equality of
documents is equality of bytes. Parsing is strict for elements and values in
the intermediate namespace; foreign-namespace content is kept only inside
``head`` and dropped with a warning elsewhere.
"""

from __future__ import annotations

import logging
import re
import xml.etree.ElementTree as ET

from .errors import (
    CrossRefViolation,
    InvariantViolation,
    SchemaError,
    ValidationReport,
    XmlSyntaxError,
)
from .model import (
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
from .source import NAME_RE, format_color, parse_color
from .xmlio import RawNode, XmlNode, compact, from_etree, serialize, split_tag

logger = logging.getLogger(__name__)

INTERMEDIATE_NS = "http://ns.inria.fr/limsee3/intermediate"

_CONTAINER_TAGS = {"par": TimeKind.PAR, "seq": TimeKind.SEQ, "excl": TimeKind.EXCL}
_KIND_TAGS = {v: k for k, v in _CONTAINER_TAGS.items()}
_CLICK_RE = re.compile(r"^click\(([^()]+)\)$")

# validation codes that parse_intermediate surfaces as CrossRefViolation
_CROSSREF_CODES = {
    "DanglingRegionRef",
    "DanglingTimeRef",
    "TimeRefNotLeaf",
    "RefWithoutAsset",
    "AssetWithoutRef",
    "RegionReuse",
    "TimeReuse",
    "DuplicateRef",
    "DuplicateAsset",
    "DuplicateRegionId",
    "DuplicateTimeId",
}


# ---------------------------------------------------------------------------
# value tokens


def begin_token(value: BeginValue) -> str | None:
    if isinstance(value, Static):
        return str(value.ms)
    if isinstance(value, Event):
        return f"click({value.target})"
    return None  # unresolved: attribute omitted


def parse_begin_token(text: str, path: str) -> BeginValue:
    click = _CLICK_RE.match(text)
    if click:
        return Event(click.group(1))
    if re.fullmatch(r"\d+", text):
        return Static(int(text))
    raise SchemaError(f"invalid begin value {text!r}", path)


def dur_token(value: DurValue) -> str | None:
    if isinstance(value, Static):
        return str(value.ms)
    if value is MEDIA:
        return "media"
    if value is INDEFINITE:
        return "indefinite"
    return None  # unresolved: attribute omitted


def parse_dur_token(text: str, path: str) -> DurValue:
    if text == "media":
        return MEDIA
    if text == "indefinite":
        return INDEFINITE
    if re.fullmatch(r"\d+", text):
        return Static(int(text))
    raise SchemaError(f"invalid dur value {text!r}", path)


# ---------------------------------------------------------------------------
# serialization


def serialize_intermediate(doc: IntermediateDocument) -> bytes:
    """Emit canonical pivot bytes; re-validates and refuses broken documents."""
    report = validate_intermediate(doc)
    if not report.ok:
        first = report.errors[0]
        raise InvariantViolation(
            f"document violates {first.code} at {first.path}: {first.message}",
            first.path,
        )
    root = XmlNode("document", {"version": "1.0", "xmlns": INTERMEDIATE_NS})

    head = root.child("head")
    for name, value in doc.head.items():
        head.child("meta", {"name": name, "content": value})
    for snippet in doc.head_foreign:
        head.children.append(RawNode(snippet))

    layout = root.child(
        "layout",
        {"width": str(doc.canvas_width), "height": str(doc.canvas_height)},
    )
    layout.children.append(_region_to_xml(doc.layout))

    timing = root.child("timing")
    timing.children.append(_time_to_xml(doc.timing))

    references = root.child("references")
    for ref in doc.references:
        references.child(
            "ref",
            {"objectId": ref.object_id, "region": ref.region_id, "time": ref.time_id},
        )

    media = root.child("media")
    for asset in doc.media:
        attrs = {"objectId": asset.object_id, "type": asset.type}
        if asset.src is not None:
            attrs["src"] = asset.src
        asset_el = media.child("asset", attrs)
        if asset.text is not None:
            asset_el.child(
                "text",
                {
                    "font": asset.text.font_family,
                    "fontSize": str(asset.text.font_size_px),
                    "color": format_color(asset.text.color_rgb),
                },
                text=asset.text.content,
            )

    return serialize(root)


def _region_to_xml(region: RegionNode) -> XmlNode:
    node = XmlNode(
        "region",
        {
            "xml:id": region.region_id,
            "left": str(region.rel_left),
            "top": str(region.rel_top),
            "width": str(region.width),
            "height": str(region.height),
            "absLeft": str(region.abs_left),
            "absTop": str(region.abs_top),
            "z": str(region.z),
        },
    )
    node.children = [_region_to_xml(child) for child in region.children]
    return node


def _time_to_xml(node: TimeNode) -> XmlNode:
    attrs = {"xml:id": node.time_id}
    if node.is_leaf:
        attrs["objectId"] = node.object_id or ""
    begin = begin_token(node.begin)
    if begin is not None:
        attrs["begin"] = begin
    dur = dur_token(node.dur)
    if dur is not None:
        attrs["dur"] = dur
    xml = XmlNode("media" if node.is_leaf else _KIND_TAGS[node.kind], attrs)
    xml.children = [_time_to_xml(child) for child in node.children]
    return xml


# ---------------------------------------------------------------------------
# parsing


def parse_intermediate(data: bytes) -> IntermediateDocument:
    """Parse pivot bytes back into a document, enforcing every invariant.

    Unknown elements in the intermediate namespace are schema errors;
    foreign-namespace elements survive only inside ``head`` (anywhere else
    they are dropped with a logged warning). Dangling or reused references
    raise :class:`CrossRefViolation`.
    """
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise XmlSyntaxError(f"malformed XML: {exc}") from exc

    ns, local = split_tag(root.tag)
    if ns != INTERMEDIATE_NS or local != "document":
        raise SchemaError(
            f"expected {{{INTERMEDIATE_NS}}}document root, got {root.tag!r}", "/"
        )
    if root.get("version") != "1.0":
        raise SchemaError(f"unsupported version {root.get('version')!r}", "/")

    sections: dict[str, ET.Element] = {}
    for child in root:
        child_ns, child_local = split_tag(child.tag)
        if child_ns != INTERMEDIATE_NS:
            logger.warning("dropping foreign element %s outside head", child.tag)
            continue
        if child_local not in ("head", "layout", "timing", "references", "media"):
            raise SchemaError(f"unknown element {child_local!r}", "/document")
        if child_local in sections:
            raise SchemaError(f"duplicate section {child_local!r}", "/document")
        sections[child_local] = child
    for required in ("head", "layout", "timing", "references", "media"):
        if required not in sections:
            raise SchemaError(f"missing section {required!r}", "/document")

    head, head_foreign = _parse_head(sections["head"])
    canvas_w = _int_attr(sections["layout"], "width", "layout")
    canvas_h = _int_attr(sections["layout"], "height", "layout")
    layout = _parse_layout(sections["layout"])
    timing = _parse_timing(sections["timing"])
    references = _parse_references(sections["references"])
    media = _parse_media(sections["media"])

    doc = IntermediateDocument(
        head=head,
        canvas_width=canvas_w,
        canvas_height=canvas_h,
        layout=layout,
        timing=timing,
        references=references,
        media=media,
        head_foreign=head_foreign,
    )
    report = validate_intermediate(doc)
    if not report.ok:
        first = report.errors[0]
        message = f"{first.code} at {first.path}: {first.message}"
        if first.code in _CROSSREF_CODES:
            raise CrossRefViolation(message, first.path)
        raise SchemaError(message, first.path)
    return doc


def _int_attr(el: ET.Element, name: str, path: str) -> int:
    raw = el.get(name)
    if raw is None:
        raise SchemaError(f"missing required attribute {name!r}", path)
    if not re.fullmatch(r"-?\d+", raw):
        raise SchemaError(f"attribute {name!r} must be an integer, got {raw!r}", path)
    return int(raw)


def _local_in_ns(el: ET.Element, path: str) -> str | None:
    """Local name for intermediate-namespace elements, None for foreign ones."""
    ns, local = split_tag(el.tag)
    if ns != INTERMEDIATE_NS:
        logger.warning("dropping foreign element %s at %s", el.tag, path)
        return None
    return local


def _parse_head(el: ET.Element) -> tuple[dict[str, str], list[str]]:
    head: dict[str, str] = {}
    foreign: list[str] = []
    for child in el:
        ns, local = split_tag(child.tag)
        if ns != INTERMEDIATE_NS:
            foreign.append(compact(from_etree(child)))
            continue
        if local != "meta":
            raise SchemaError(f"unknown element {local!r} in head", "head")
        name, content = child.get("name"), child.get("content")
        if name is None or content is None:
            raise SchemaError("meta requires name and content attributes", "head")
        if name in head:
            raise SchemaError(f"duplicate meta name {name!r}", "head")
        head[name] = content
    return head, foreign


def _parse_layout(el: ET.Element) -> RegionNode:
    regions = []
    for child in el:
        local = _local_in_ns(child, "layout")
        if local is None:
            continue
        if local != "region":
            raise SchemaError(f"unknown element {local!r} in layout", "layout")
        regions.append(_parse_region(child))
    if len(regions) != 1:
        raise SchemaError(
            f"layout must contain exactly one root region, found {len(regions)}",
            "layout",
        )
    return regions[0]


def _parse_region(el: ET.Element) -> RegionNode:
    region_id = el.get("{http://www.w3.org/XML/1998/namespace}id")
    if region_id is None:
        raise SchemaError("region is missing xml:id", "layout")
    path = f"layout/{region_id}"
    region = RegionNode(
        region_id=region_id,
        rel_left=_int_attr(el, "left", path),
        rel_top=_int_attr(el, "top", path),
        width=_int_attr(el, "width", path),
        height=_int_attr(el, "height", path),
        abs_left=_int_attr(el, "absLeft", path),
        abs_top=_int_attr(el, "absTop", path),
        z=_int_attr(el, "z", path) if el.get("z") is not None else 0,
    )
    for child in el:
        local = _local_in_ns(child, path)
        if local is None:
            continue
        if local != "region":
            raise SchemaError(f"unknown element {local!r} in region", path)
        region.children.append(_parse_region(child))
    return region


def _parse_timing(el: ET.Element) -> TimeNode:
    nodes = []
    for child in el:
        local = _local_in_ns(child, "timing")
        if local is None:
            continue
        nodes.append(_parse_time_node(child, local))
    if len(nodes) != 1:
        raise SchemaError(
            f"timing must contain exactly one root node, found {len(nodes)}", "timing"
        )
    return nodes[0]


def _parse_time_node(el: ET.Element, local: str) -> TimeNode:
    time_id = el.get("{http://www.w3.org/XML/1998/namespace}id")
    if time_id is None:
        raise SchemaError("timing node is missing xml:id", "timing")
    path = f"timing/{time_id}"

    begin: BeginValue = UNRESOLVED
    if el.get("begin") is not None:
        begin = parse_begin_token(el.get("begin"), path)
    dur: DurValue = UNRESOLVED
    if el.get("dur") is not None:
        dur = parse_dur_token(el.get("dur"), path)

    if local == "media":
        object_id = el.get("objectId")
        if object_id is None:
            raise SchemaError("media timing leaf is missing objectId", path)
        for child in el:
            if _local_in_ns(child, path) is not None:
                raise SchemaError("media timing leaves cannot have children", path)
        return TimeNode(time_id, TimeKind.LEAF, begin, dur, object_id=object_id)
    if local not in _CONTAINER_TAGS:
        raise SchemaError(f"unknown element {local!r} in timing", path)
    node = TimeNode(time_id, _CONTAINER_TAGS[local], begin, dur)
    for child in el:
        child_local = _local_in_ns(child, path)
        if child_local is None:
            continue
        node.children.append(_parse_time_node(child, child_local))
    return node


def _parse_references(el: ET.Element) -> list[Reference]:
    references = []
    for child in el:
        local = _local_in_ns(child, "references")
        if local is None:
            continue
        if local != "ref":
            raise SchemaError(f"unknown element {local!r} in references", "references")
        object_id = child.get("objectId")
        region = child.get("region")
        time = child.get("time")
        if object_id is None or region is None or time is None:
            raise SchemaError("ref requires objectId, region and time", "references")
        references.append(Reference(object_id, region, time))
    return references


def _parse_media(el: ET.Element) -> list[Asset]:
    assets = []
    for child in el:
        local = _local_in_ns(child, "media")
        if local is None:
            continue
        if local != "asset":
            raise SchemaError(f"unknown element {local!r} in media", "media")
        object_id = child.get("objectId")
        asset_type = child.get("type")
        if object_id is None or asset_type is None:
            raise SchemaError("asset requires objectId and type", "media")
        path = f"media/{object_id}"
        if asset_type not in ("image", "audio", "video", "text"):
            raise SchemaError(f"invalid asset type {asset_type!r}", path)
        if asset_type == "text":
            if child.get("src") is not None:
                raise SchemaError("text assets cannot carry src", path)
            text_els = [c for c in child if _local_in_ns(c, path) is not None]
            if len(text_els) != 1 or split_tag(text_els[0].tag)[1] != "text":
                raise SchemaError("text asset requires exactly one text child", path)
            text_el = text_els[0]
            payload = TextPayload(
                content=text_el.text or "",
                font_family=text_el.get("font", "sans-serif"),
                font_size_px=_int_attr(text_el, "fontSize", path)
                if text_el.get("fontSize") is not None
                else 16,
                color_rgb=parse_color(text_el.get("color", "#000000"), path),
            )
            assets.append(Asset(object_id, "text", text=payload))
        else:
            src = child.get("src")
            if src is None:
                raise SchemaError(f"{asset_type} asset requires src", path)
            assets.append(Asset(object_id, asset_type, src=src))
    return assets


# ---------------------------------------------------------------------------
# validation


def validate_intermediate(doc: IntermediateDocument) -> ValidationReport:
    """Check every pivot invariant; empty errors means any backend can emit it.

    Works on arbitrarily broken in-memory documents: spatial fields may hold
    leaked strings, references may dangle, sections may disagree. Each
    violation gets a stable code so defect-injection tests can assert them.
    """
    report = ValidationReport()

    for required in ("title", "generator"):
        if required not in doc.head:
            report.error("MissingMeta", "head", f"head is missing {required!r} metadata")

    for dim, value in (("width", doc.canvas_width), ("height", doc.canvas_height)):
        if not isinstance(value, int) or value <= 0:
            report.error("InvalidCanvas", "layout", f"canvas {dim} must be a positive integer")

    region_ids = _validate_layout(doc, report)
    leaf_objects, time_ids = _validate_timing(doc, report)
    _validate_references(doc, report, region_ids, leaf_objects, time_ids)
    return report


def _validate_layout(doc: IntermediateDocument, report: ValidationReport) -> set[str]:
    region_ids: set[str] = set()

    def visit(region: RegionNode, parent: RegionNode | None) -> None:
        path = f"layout/{region.region_id}"
        if not isinstance(region.region_id, str) or not NAME_RE.match(region.region_id):
            report.error("InvalidId", path, f"invalid region id {region.region_id!r}")
        if region.region_id in region_ids:
            report.error("DuplicateRegionId", path, f"region id {region.region_id!r} reused")
        region_ids.add(region.region_id)

        clean = True
        for attr in ("rel_left", "rel_top", "width", "height", "abs_left", "abs_top", "z"):
            value = getattr(region, attr)
            if not isinstance(value, int):
                report.error(
                    "UnresolvedSpatialValue", path,
                    f"{attr} must be resolved to integer pixels, got {value!r}",
                )
                clean = False
        if clean and (region.width < 0 or region.height < 0):
            report.error("NegativeExtent", path, "region extents must be >= 0")
        if clean:
            base_left = parent.abs_left if parent is not None else 0
            base_top = parent.abs_top if parent is not None else 0
            if isinstance(base_left, int) and isinstance(base_top, int):
                if (region.abs_left != base_left + region.rel_left
                        or region.abs_top != base_top + region.rel_top):
                    report.error(
                        "AbsRelMismatch", path,
                        "absolute coordinates disagree with parent + relative offset",
                    )
        for child in region.children:
            visit(child, region)

    visit(doc.layout, None)
    return region_ids


def _validate_timing(
    doc: IntermediateDocument, report: ValidationReport
) -> tuple[dict[str, str], set[str]]:
    leaf_objects: dict[str, str] = {}
    time_ids: set[str] = set()

    def visit(node: TimeNode) -> None:
        path = f"timing/{node.time_id}"
        if not isinstance(node.time_id, str) or not NAME_RE.match(node.time_id):
            report.error("InvalidId", path, f"invalid time id {node.time_id!r}")
        if node.time_id in time_ids:
            report.error("DuplicateTimeId", path, f"time id {node.time_id!r} reused")
        time_ids.add(node.time_id)

        if node.is_leaf:
            leaf_objects[node.time_id] = node.object_id or ""
            if node.children:
                report.error("LeafWithChildren", path, "leaf time nodes cannot have children")
            if not node.object_id:
                report.error("LeafWithoutObject", path, "leaf time nodes must name an object")
        elif node.object_id is not None:
            report.error("ObjectOnContainer", path, "containers cannot name an object")

        begin = node.begin
        if not (isinstance(begin, (Static, Event)) or begin is UNRESOLVED):
            report.error("InvalidBeginValue", path, f"invalid begin {begin!r}")
        elif isinstance(begin, Static) and begin.ms < 0:
            report.error("InvalidBeginValue", path, "begin offsets must be >= 0")

        dur = node.dur
        if isinstance(dur, Static):
            if dur.ms < 0:
                report.error("InvalidDurValue", path, "durations must be >= 0")
        elif dur is MEDIA:
            if not node.is_leaf:
                report.error("MediaDurOnContainer", path, "containers cannot have dur='media'")
        elif dur is not INDEFINITE and dur is not UNRESOLVED:
            report.error("InvalidDurValue", path, f"invalid dur {dur!r}")

        if node.kind is TimeKind.SEQ:
            _check_seq_order(node, report)
        for child in node.children:
            visit(child)

    visit(doc.timing)
    return leaf_objects, time_ids


def _check_seq_order(node: TimeNode, report: ValidationReport) -> None:
    # children carry accumulated begins; a static begin before the previous
    # static end means the stored order contradicts the redundant values
    previous_end: int | None = 0
    for child in node.children:
        if isinstance(child.begin, Static) and previous_end is not None:
            if child.begin.ms < previous_end:
                report.error(
                    "SeqBeginRegression",
                    f"timing/{child.time_id}",
                    f"begin {child.begin.ms} precedes the previous sibling end {previous_end}",
                )
            previous_end = (
                child.begin.ms + child.dur.ms if isinstance(child.dur, Static) else None
            )
        else:
            previous_end = None


def _validate_references(
    doc: IntermediateDocument,
    report: ValidationReport,
    region_ids: set[str],
    leaf_objects: dict[str, str],
    time_ids: set[str],
) -> None:
    seen_objects: set[str] = set()
    seen_regions: set[str] = set()
    seen_times: set[str] = set()
    asset_ids: list[str] = [asset.object_id for asset in doc.media]

    for ref in doc.references:
        path = f"references/{ref.object_id}"
        if ref.object_id in seen_objects:
            report.error("DuplicateRef", path, f"object {ref.object_id!r} referenced twice")
        seen_objects.add(ref.object_id)

        if ref.region_id not in region_ids:
            report.error("DanglingRegionRef", path, f"region {ref.region_id!r} does not exist")
        elif ref.region_id in seen_regions:
            report.error("RegionReuse", path, f"region {ref.region_id!r} used by two references")
        seen_regions.add(ref.region_id)

        if ref.time_id not in time_ids:
            report.error("DanglingTimeRef", path, f"time node {ref.time_id!r} does not exist")
        elif ref.time_id not in leaf_objects:
            report.error("TimeRefNotLeaf", path, f"time node {ref.time_id!r} is not a leaf")
        elif ref.time_id in seen_times:
            report.error("TimeReuse", path, f"time node {ref.time_id!r} used by two references")
        elif leaf_objects[ref.time_id] != ref.object_id:
            report.error(
                "RefTimeObjectMismatch", path,
                f"time node {ref.time_id!r} belongs to object {leaf_objects[ref.time_id]!r}",
            )
        seen_times.add(ref.time_id)

        if ref.object_id not in asset_ids:
            report.error("RefWithoutAsset", path, f"object {ref.object_id!r} has no asset")

    referenced = {ref.object_id for ref in doc.references}
    seen_assets: set[str] = set()
    for asset in doc.media:
        path = f"media/{asset.object_id}"
        if asset.object_id in seen_assets:
            report.error("DuplicateAsset", path, f"asset {asset.object_id!r} listed twice")
        seen_assets.add(asset.object_id)
        if asset.object_id not in referenced:
            report.error("AssetWithoutRef", path, f"asset {asset.object_id!r} is never referenced")
        if asset.type == "text":
            if asset.text is None or asset.src is not None:
                report.error("AssetShapeMismatch", path,
                             "text assets carry a payload and no src")
        else:
            if asset.src is None or asset.text is not None:
                report.error("AssetShapeMismatch", path,
                             f"{asset.type} assets carry a src and no text payload")
