"""SMIL 2.1 Language backend.

Head metadata and the region hierarchy map straight onto SMIL's head; the
timing tree becomes the body. References are resolved on the fly: each media
leaf picks up its region binding and asset source. Two target-specific
adjustments happen here: sequence children carry begin *offsets* again
(SMIL counts them from the predecessor's end, the pivot stores accumulated
values), and text objects are rasterized to PNG because SMIL players have no
portable text formatting.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol

from .bundles import ManifestEntry, asset_paths, manifest_for
from .errors import InvariantViolation, MedexError, RasterizeError
from .intermediate import validate_intermediate
from .model import (
    INDEFINITE,
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
from .rasterize import default_rasterize
from .xmlio import XmlNode, serialize

SMIL_NS = "http://www.w3.org/2005/SMIL21/Language"

_MEDIA_TAG = {"image": "img", "audio": "audio", "video": "video", "text": "img"}


class Rasterizer(Protocol):
    def __call__(self, payload: TextPayload, width_px: int, height_px: int) -> bytes: ...


@dataclass
class SmilBundle:
    document_bytes: bytes
    manifest: list[ManifestEntry]
    # bytes for generated entries; copied media is materialized by the caller
    files: dict[str, bytes] = field(default_factory=dict)


def emit_smil(
    doc: IntermediateDocument, rasterizer: Rasterizer = default_rasterize
) -> SmilBundle:
    """Emit a SMIL presentation plus its asset manifest."""
    report = validate_intermediate(doc)
    if not report.ok:
        first = report.errors[0]
        raise InvariantViolation(
            f"cannot export invalid document: {first.code} at {first.path}", first.path
        )

    paths = asset_paths(doc, rasterize_text=True)
    regions = {region.region_id: region for region in doc.layout.walk()}
    assets = {asset.object_id: asset for asset in doc.media}
    refs = {ref.object_id: ref for ref in doc.references}

    root = XmlNode("smil", {"xmlns": SMIL_NS})
    head = root.child("head")
    for name, value in doc.head.items():
        head.child("meta", {"name": name, "content": value})
    layout = head.child("layout")
    layout.child(
        "root-layout",
        {"width": str(doc.canvas_width), "height": str(doc.canvas_height)},
    )
    layout.children.append(_region_to_smil(doc.layout))

    body = root.child("body")
    body.children.append(
        _time_to_smil(doc.timing, assets, refs, paths, begin_attr=_plain_begin(doc.timing))
    )

    files: dict[str, bytes] = {}
    for asset in doc.media:
        if asset.type != "text":
            continue
        region = regions[refs[asset.object_id].region_id]
        path, _ = paths[asset.object_id]
        try:
            # zero-area regions are legal (the object is simply invisible);
            # still ship a 1x1 PNG so the bundle has no dangling src
            files[path] = rasterizer(
                asset.text, max(1, region.width), max(1, region.height)
            )
        except MedexError:
            raise
        except Exception as exc:
            raise RasterizeError(
                f"rasterizer failed for object {asset.object_id!r}: {exc}"
            ) from exc

    return SmilBundle(
        document_bytes=serialize(root),
        manifest=manifest_for(doc, paths),
        files=files,
    )


def _region_to_smil(region: RegionNode) -> XmlNode:
    node = XmlNode(
        "region",
        {
            "id": region.region_id,
            "left": str(region.rel_left),
            "top": str(region.rel_top),
            "width": str(region.width),
            "height": str(region.height),
            "z-index": str(region.z),
        },
    )
    node.children = [_region_to_smil(child) for child in region.children]
    return node


def _plain_begin(node: TimeNode) -> str | None:
    if isinstance(node.begin, Static):
        return f"{node.begin.ms}ms"
    if isinstance(node.begin, Event):
        return f"{node.begin.target}.activateEvent"
    return None


def _dur_attr(node: TimeNode) -> str | None:
    if isinstance(node.dur, Static):
        return f"{node.dur.ms}ms"
    if node.dur is INDEFINITE:
        return "indefinite"
    return None  # intrinsic media duration or unresolved: the player decides


def _time_to_smil(
    node: TimeNode,
    assets: dict[str, Asset],
    refs: dict[str, Reference],
    paths: dict[str, tuple[str, str]],
    begin_attr: str | None,
) -> XmlNode:
    if node.is_leaf:
        asset = assets[node.object_id]
        ref = refs[node.object_id]
        attrs = {"id": node.object_id, "region": ref.region_id}
        attrs["src"] = paths[node.object_id][0]
        xml = XmlNode(_MEDIA_TAG[asset.type], attrs)
    else:
        xml = XmlNode(node.kind.value, {"id": node.time_id})
    if begin_attr is not None:
        xml.attrs["begin"] = begin_attr
    dur = _dur_attr(node)
    if dur is not None:
        xml.attrs["dur"] = dur

    if node.kind is TimeKind.SEQ:
        # pivot begins are accumulated; SMIL counts each child's begin from
        # the end of its predecessor, so emit the differences
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
                child_begin = _event_begin_only(child)
                cursor = None
            xml.children.append(_time_to_smil(child, assets, refs, paths, child_begin))
    else:
        for child in node.children:
            xml.children.append(_time_to_smil(child, assets, refs, paths, _plain_begin(child)))
    return xml


def _event_begin_only(node: TimeNode) -> str | None:
    if isinstance(node.begin, Event):
        return f"{node.begin.target}.activateEvent"
    return None
