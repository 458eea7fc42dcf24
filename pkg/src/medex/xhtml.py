"""XHTML + CSS + Timesheets backend.

The region tree becomes nested, absolutely positioned ``div`` elements; the
timing tree becomes a declarative ``timesheet`` in the page head, interpreted
at runtime by the scheduler script referenced from the page. Text renders
natively here (styled markup), unlike the SMIL path: browsers format text
fine, the PNG workaround exists only for SMIL players.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .bundles import ManifestEntry, asset_paths, manifest_for
from .errors import InvariantViolation
from .intermediate import validate_intermediate
from .model import (
    INDEFINITE,
    MEDIA,
    Asset,
    Event,
    IntermediateDocument,
    RegionNode,
    Static,
    TimeKind,
    TimeNode,
)
from .xmlio import XmlNode, serialize

XHTML_NS = "http://www.w3.org/1999/xhtml"
TIMESHEET_NS = "http://www.w3.org/2007/07/SMIL30/Timesheets"
XHTML_DOCTYPE = (
    '<!DOCTYPE html PUBLIC "-//W3C//DTD XHTML 1.0 Strict//EN" '
    '"http://www.w3.org/TR/xhtml1/DTD/xhtml1-strict.dtd">'
)
HIDDEN_CLASS = "medex-hidden"
SCHEDULER_FILENAME = "scheduler.js"

# tags a browser refuses in self-closed form
_EXPANDED = frozenset({"script", "div", "span", "title", "audio", "video", "p", "a", "textarea"})

# stand-in written when no scheduler bundle is configured; keeps the page
# loadable with every object visible
PLACEHOLDER_SCHEDULER_JS = """\
/* medex placeholder scheduler: static rendering only.
   Build the timesheet scheduler bundle and point MEDEX_SCHEDULER_PATH at it
   to get timed playback. */
void 0;
"""


@dataclass
class XhtmlBundle:
    html_bytes: bytes
    css_bytes: bytes
    manifest: list[ManifestEntry]
    scheduler_ref: str = SCHEDULER_FILENAME
    files: dict[str, bytes] = field(default_factory=dict)


def emit_xhtml(doc: IntermediateDocument) -> XhtmlBundle:
    """Emit the XHTML page and stylesheet plus the media manifest."""
    report = validate_intermediate(doc)
    if not report.ok:
        first = report.errors[0]
        raise InvariantViolation(
            f"cannot export invalid document: {first.code} at {first.path}", first.path
        )

    paths = asset_paths(doc, rasterize_text=False)

    html = XmlNode("html", {"xmlns": XHTML_NS})
    head = html.child("head")
    head.child("title", text=doc.head.get("title", ""))
    for name, value in doc.head.items():
        if name != "title":
            head.child("meta", {"name": name, "content": value})
    head.child("link", {"href": "styles.css", "rel": "stylesheet", "type": "text/css"})
    head.child("script", {"src": SCHEDULER_FILENAME, "type": "text/javascript"})
    timesheet = head.child("timesheet", {"xmlns": TIMESHEET_NS})
    timesheet.children.append(_time_to_timesheet(doc.timing, _plain_begin(doc.timing)))

    body = html.child("body")
    assets = {asset.object_id: asset for asset in doc.media}
    media_by_region = {ref.region_id: ref.object_id for ref in doc.references}
    body.children.append(_region_to_div(doc.layout, assets, media_by_region, paths))

    return XhtmlBundle(
        html_bytes=serialize(html, doctype=XHTML_DOCTYPE, expand_empty=_EXPANDED),
        css_bytes=_stylesheet(doc),
        manifest=manifest_for(doc, paths),
    )


# ---------------------------------------------------------------------------
# markup


def _region_to_div(
    region: RegionNode,
    assets: dict[str, Asset],
    media_by_region: dict[str, str],
    paths: dict[str, tuple[str, str]],
) -> XmlNode:
    div = XmlNode("div", {"id": region.region_id})
    for child in region.children:
        div.children.append(_region_to_div(child, assets, media_by_region, paths))
    object_id = media_by_region.get(region.region_id)
    if object_id is not None:
        div.children.append(_media_element(assets[object_id], object_id, paths))
    return div


def _media_element(
    asset: Asset, object_id: str, paths: dict[str, tuple[str, str]]
) -> XmlNode:
    if asset.type == "image":
        return XmlNode("img", {"id": object_id, "alt": "", "src": paths[object_id][0]})
    if asset.type in ("audio", "video"):
        return XmlNode(
            asset.type, {"id": object_id, "preload": "auto", "src": paths[object_id][0]}
        )
    return XmlNode("div", {"id": object_id}, text=asset.text.content)


def _plain_begin(node: TimeNode) -> str | None:
    if isinstance(node.begin, Static):
        return f"{node.begin.ms}ms"
    if isinstance(node.begin, Event):
        return f"click({node.begin.target})"
    return None


def _dur_attr(node: TimeNode) -> str | None:
    if isinstance(node.dur, Static):
        return f"{node.dur.ms}ms"
    if node.dur is INDEFINITE:
        return "indefinite"
    if node.dur is MEDIA:
        return "media"  # the scheduler waits for the element's ended event
    return None


def _time_to_timesheet(node: TimeNode, begin_attr: str | None) -> XmlNode:
    if node.is_leaf:
        xml = XmlNode("item", {"id": node.time_id, "select": f"#{node.object_id}"})
    else:
        xml = XmlNode(node.kind.value, {"id": node.time_id})
    if begin_attr is not None:
        xml.attrs["begin"] = begin_attr
    dur = _dur_attr(node)
    if dur is not None:
        xml.attrs["dur"] = dur

    if node.kind is TimeKind.SEQ:
        # same offset re-derivation as the SMIL backend: the scheduler counts
        # a seq child's begin from its predecessor's end
        cursor: int | None = 0
        for child in node.children:
            if isinstance(child.begin, Static) and cursor is not None:
                child_begin = f"{child.begin.ms - cursor}ms"
                cursor = (
                    child.begin.ms + child.dur.ms
                    if isinstance(child.dur, Static)
                    else None
                )
            else:
                child_begin = (
                    f"click({child.begin.target})"
                    if isinstance(child.begin, Event)
                    else None
                )
                cursor = None
            xml.children.append(_time_to_timesheet(child, child_begin))
    else:
        for child in node.children:
            xml.children.append(_time_to_timesheet(child, _plain_begin(child)))
    return xml


# ---------------------------------------------------------------------------
# stylesheet


def _css_font_family(family: str) -> str:
    if re.fullmatch(r"[A-Za-z][A-Za-z0-9\-]*", family):
        return family
    return '"%s"' % family.replace('"', '\\"')


def _stylesheet(doc: IntermediateDocument) -> bytes:
    rules: list[tuple[str, list[str]]] = [
        ("body", ["margin: 0;"]),
        (f".{HIDDEN_CLASS}", ["visibility: hidden;"]),
    ]
    for region in doc.layout.walk():
        rules.append(
            (
                f"#{region.region_id}",
                [
                    "position: absolute;",
                    f"left: {region.rel_left}px;",
                    f"top: {region.rel_top}px;",
                    f"width: {region.width}px;",
                    f"height: {region.height}px;",
                    f"z-index: {region.z};",
                ],
            )
        )
    for asset in doc.media:
        if asset.type in ("image", "video"):
            rules.append((f"#{asset.object_id}", ["width: 100%;", "height: 100%;"]))
        elif asset.type == "text":
            rules.append(
                (
                    f"#{asset.object_id}",
                    [
                        f"font-family: {_css_font_family(asset.text.font_family)};",
                        f"font-size: {asset.text.font_size_px}px;",
                        "color: #%02x%02x%02x;" % asset.text.color_rgb,
                        "overflow: hidden;",
                    ],
                )
            )
    lines: list[str] = []
    for selector, props in rules:
        lines.append(selector + " {")
        lines.extend(f"  {prop}" for prop in props)
        lines.append("}")
        lines.append("")
    return "\n".join(lines).encode("utf-8")
