"""Authoring-level source format: types, XML parsing, validation.

The source format is a small XML dialect (namespace ``urn:medex:source:1``,
also accepted without a namespace): nested ``<object>`` elements carrying an
optional ``<spatial>`` box, a ``<timing>`` spec, and, for media leaves, the
asset reference or inline text. Parsing is strict about syntax and raises;
structural rule violations are collected by :func:`validate_source` instead,
so authors get every problem reported at once.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from enum import Enum

from .errors import DuplicateId, SchemaError, ValidationReport, XmlSyntaxError

SOURCE_NS = "urn:medex:source:1"

NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9._\-]*$")
CLICK_RE = re.compile(r"^click\(([^()]+)\)$")
CLOCK_RE = re.compile(r"^(\d+)(ms|s)$|^(\d+)\.(\d+)s$")
COLOR_RE = re.compile(r"^#([0-9a-fA-F]{6})$")

CONTAINER_KINDS = ("par", "seq", "excl")
OBJECT_KINDS = CONTAINER_KINDS + ("media",)
MEDIA_TYPES = ("image", "audio", "video", "text")
CONTINUOUS_TYPES = ("audio", "video")


# ---------------------------------------------------------------------------
# value types


@dataclass(frozen=True)
class Px:
    value: int


@dataclass(frozen=True)
class Percent:
    value: int


class Keyword(Enum):
    CENTER = "center"


CENTER = Keyword.CENTER

# left/top accept center; width/height do not
Length = Px | Percent
PosValue = Px | Percent | Keyword


@dataclass(frozen=True)
class ClockOffset:
    ms: int


@dataclass(frozen=True)
class ClickTrigger:
    target: str


BeginSpec = ClockOffset | ClickTrigger


@dataclass(frozen=True)
class FixedDur:
    ms: int


class SpecialDur(Enum):
    MEDIA = "media"
    INDEFINITE = "indefinite"
    UNSPECIFIED = "unspecified"


DurSpec = FixedDur | SpecialDur


@dataclass(frozen=True)
class SpatialSpec:
    left: PosValue
    top: PosValue
    width: Length
    height: Length
    z: int = 0


@dataclass(frozen=True)
class TimingSpec:
    begin: BeginSpec = ClockOffset(0)
    dur: DurSpec = SpecialDur.UNSPECIFIED


@dataclass(frozen=True)
class TextStyle:
    font_family: str = "sans-serif"
    font_size_px: int = 16
    color_rgb: tuple[int, int, int] = (0, 0, 0)


@dataclass(frozen=True)
class MediaRef:
    type: str
    src: str | None = None
    text_content: str | None = None
    text_style: TextStyle | None = None


@dataclass
class ObjectNode:
    id: str
    kind: str
    timing: TimingSpec = TimingSpec()
    spatial: SpatialSpec | None = None
    media: MediaRef | None = None
    children: list[ObjectNode] = field(default_factory=list)

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass
class SourceDocument:
    canvas_width: int
    canvas_height: int
    root: ObjectNode
    title: str = ""
    base_uri: str = ""

    def objects(self) -> list[ObjectNode]:
        return list(self.root.walk())

    def object_ids(self) -> set[str]:
        return {obj.id for obj in self.root.walk()}


# ---------------------------------------------------------------------------
# scalar parsing


def parse_clock_value(text: str, path: str = "") -> int:
    """Parse ``Nms`` / ``Ns`` / ``N.Ns`` into integer milliseconds.

    Sub-millisecond digits are truncated so downstream arithmetic stays in
    exact integers.
    """
    match = CLOCK_RE.match(text)
    if match is None:
        raise SchemaError(f"invalid clock value {text!r}", path)
    if match.group(1) is not None:
        value = int(match.group(1))
        return value if match.group(2) == "ms" else value * 1000
    whole, frac = match.group(3), match.group(4)
    return int(whole) * 1000 + int((frac + "000")[:3])


def format_clock_value(ms: int) -> str:
    return f"{ms}ms"


def _parse_length(text: str, path: str, allow_center: bool) -> PosValue:
    if text == "center":
        if not allow_center:
            raise SchemaError("'center' is only allowed for left/top", path)
        return CENTER
    if text.endswith("%"):
        body = text[:-1]
    else:
        body = text
    if not re.fullmatch(r"[+-]?\d+", body):
        raise SchemaError(f"invalid length {text!r}", path)
    # out-of-range values parse fine and are rejected by validate_source
    return Percent(int(body)) if text.endswith("%") else Px(int(body))


def _parse_begin(text: str, path: str) -> BeginSpec:
    click = CLICK_RE.match(text)
    if click:
        target = click.group(1)
        if not NAME_RE.match(target):
            raise SchemaError(f"invalid click target {target!r}", path)
        return ClickTrigger(target)
    return ClockOffset(parse_clock_value(text, path))


def _parse_dur(text: str, path: str) -> DurSpec:
    if text == "media":
        return SpecialDur.MEDIA
    if text == "indefinite":
        return SpecialDur.INDEFINITE
    return FixedDur(parse_clock_value(text, path))


def parse_color(text: str, path: str = "") -> tuple[int, int, int]:
    match = COLOR_RE.match(text)
    if match is None:
        raise SchemaError(f"invalid color {text!r}, expected #RRGGBB", path)
    raw = match.group(1)
    return tuple(int(raw[i : i + 2], 16) for i in (0, 2, 4))


def format_color(rgb: tuple[int, int, int]) -> str:
    return "#{:02x}{:02x}{:02x}".format(*rgb)


# ---------------------------------------------------------------------------
# XML parsing


def _split_tag(tag: str) -> tuple[str, str]:
    if tag.startswith("{"):
        ns, _, local = tag[1:].partition("}")
        return ns, local
    return "", tag


def _expect(el: ET.Element, local: str, path: str) -> None:
    ns, name = _split_tag(el.tag)
    if ns not in ("", SOURCE_NS):
        raise SchemaError(f"element {name!r} in unexpected namespace {ns!r}", path)
    if name != local:
        raise SchemaError(f"unexpected element {name!r}, expected {local!r}", path)


def _check_attrs(el: ET.Element, allowed: set[str], path: str) -> None:
    for attr in el.attrib:
        ns, name = _split_tag(attr)
        if ns:
            raise SchemaError(f"namespaced attribute {name!r} not allowed", path)
        if name not in allowed:
            raise SchemaError(f"unknown attribute {name!r}", path)


def _int_attr(el: ET.Element, name: str, path: str) -> int:
    raw = el.get(name)
    if raw is None:
        raise SchemaError(f"missing required attribute {name!r}", path)
    if not re.fullmatch(r"[+-]?\d+", raw):
        raise SchemaError(f"attribute {name!r} must be an integer, got {raw!r}", path)
    return int(raw)


def parse_source(data: bytes) -> SourceDocument:
    """Parse source XML bytes into a :class:`SourceDocument`.

    Defaults are applied here (begin 0, z 0, dur unspecified, text styling)
    so the returned tree is total. Raises :class:`XmlSyntaxError`,
    :class:`SchemaError`, or :class:`DuplicateId`; everything else is left to
    :func:`validate_source`.
    """
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise XmlSyntaxError(f"malformed XML: {exc}") from exc

    _expect(root, "doc", "/")
    _check_attrs(root, {"width", "height", "title", "base"}, "/")
    width = _int_attr(root, "width", "/")
    height = _int_attr(root, "height", "/")

    object_els = list(root)
    if len(object_els) != 1:
        raise SchemaError(
            f"doc must contain exactly one root object, found {len(object_els)}", "/"
        )
    root_obj = _parse_object(object_els[0], "/")

    seen: set[str] = set()
    for obj in root_obj.walk():
        if obj.id in seen:
            raise DuplicateId(f"duplicate object id {obj.id!r}", f"/{obj.id}")
        seen.add(obj.id)

    return SourceDocument(
        canvas_width=width,
        canvas_height=height,
        root=root_obj,
        title=root.get("title", ""),
        base_uri=root.get("base", ""),
    )


def _parse_object(el: ET.Element, parent_path: str) -> ObjectNode:
    _expect(el, "object", parent_path)
    object_id = el.get("id")
    if object_id is None:
        raise SchemaError("object is missing required attribute 'id'", parent_path)
    path = f"{parent_path.rstrip('/')}/{object_id}"
    kind = el.get("kind")
    if kind not in OBJECT_KINDS:
        raise SchemaError(f"invalid object kind {kind!r}", path)

    if kind == "media":
        _check_attrs(el, {"id", "kind", "type", "src", "font", "fontSize", "color"}, path)
        media = _parse_media_ref(el, path)
        carries_text = media.type == "text"
    else:
        _check_attrs(el, {"id", "kind"}, path)
        media = None
        carries_text = False
    if not carries_text and (el.text or "").strip():
        raise SchemaError("text content is only allowed on text media objects", path)

    spatial: SpatialSpec | None = None
    timing = TimingSpec()
    seen_spatial = seen_timing = False
    children: list[ObjectNode] = []
    for child in el:
        _, local = _split_tag(child.tag)
        if local == "spatial":
            if seen_spatial:
                raise SchemaError("duplicate <spatial> element", path)
            seen_spatial = True
            spatial = _parse_spatial(child, path)
        elif local == "timing":
            if seen_timing:
                raise SchemaError("duplicate <timing> element", path)
            seen_timing = True
            timing = _parse_timing(child, path)
        elif local == "object":
            children.append(_parse_object(child, path))
        else:
            _expect(child, local, path)  # normalizes namespace error message
            raise SchemaError(f"unknown element {local!r}", path)
        if not carries_text and (child.tail or "").strip():
            raise SchemaError("text content is only allowed on text media objects", path)

    return ObjectNode(
        id=object_id, kind=kind, timing=timing, spatial=spatial, media=media,
        children=children,
    )


def _parse_media_ref(el: ET.Element, path: str) -> MediaRef:
    media_type = el.get("type")
    if media_type not in MEDIA_TYPES:
        raise SchemaError(f"invalid media type {media_type!r}", path)
    src = el.get("src")
    if media_type == "text":
        if src is not None:
            raise SchemaError("text media must not carry a 'src' attribute", path)
        style = TextStyle()
        if "font" in el.attrib:
            style = TextStyle(el.get("font"), style.font_size_px, style.color_rgb)
        if "fontSize" in el.attrib:
            style = TextStyle(style.font_family, _int_attr(el, "fontSize", path), style.color_rgb)
        if "color" in el.attrib:
            style = TextStyle(style.font_family, style.font_size_px, parse_color(el.get("color"), path))
        return MediaRef(type="text", text_content=_gather_text(el), text_style=style)
    for attr in ("font", "fontSize", "color"):
        if attr in el.attrib:
            raise SchemaError(f"attribute {attr!r} is only allowed on text media", path)
    if src is None:
        raise SchemaError(f"{media_type} media is missing required attribute 'src'", path)
    return MediaRef(type=media_type, src=src)


def _gather_text(el: ET.Element) -> str:
    # direct text nodes only; nested <timing>/<spatial> text stays out
    parts = [el.text or ""]
    parts.extend(child.tail or "" for child in el)
    return " ".join("".join(parts).split())


def _parse_spatial(el: ET.Element, path: str) -> SpatialSpec:
    _check_attrs(el, {"left", "top", "width", "height", "z"}, path)
    if len(el):
        raise SchemaError("<spatial> must be empty", path)
    values = {}
    for attr in ("left", "top", "width", "height"):
        raw = el.get(attr)
        if raw is None:
            raise SchemaError(f"<spatial> is missing required attribute {attr!r}", path)
        values[attr] = _parse_length(raw, path, allow_center=attr in ("left", "top"))
    z = _int_attr(el, "z", path) if "z" in el.attrib else 0
    return SpatialSpec(values["left"], values["top"], values["width"], values["height"], z)


def _parse_timing(el: ET.Element, path: str) -> TimingSpec:
    _check_attrs(el, {"begin", "dur"}, path)
    if len(el):
        raise SchemaError("<timing> must be empty", path)
    begin: BeginSpec = ClockOffset(0)
    dur: DurSpec = SpecialDur.UNSPECIFIED
    if "begin" in el.attrib:
        begin = _parse_begin(el.get("begin"), path)
    if "dur" in el.attrib:
        dur = _parse_dur(el.get("dur"), path)
    return TimingSpec(begin=begin, dur=dur)


# ---------------------------------------------------------------------------
# validation


def validate_source(doc: SourceDocument) -> ValidationReport:
    """Check every structural invariant and report all violations at once.

    An empty error list means the document is safe to hand to the resolver.
    """
    report = ValidationReport()
    if doc.canvas_width <= 0 or doc.canvas_height <= 0:
        report.error(
            "InvalidCanvas", "/",
            f"canvas must be positive, got {doc.canvas_width}x{doc.canvas_height}",
        )
    if doc.root.kind not in CONTAINER_KINDS:
        report.error("RootNotContainer", f"/{doc.root.id}",
                     f"root object must be par/seq/excl, got {doc.root.kind!r}")

    all_ids: set[str] = set()
    seen: set[str] = set()
    for obj in doc.root.walk():
        if obj.id in seen:
            report.error("DuplicateId", f"/{obj.id}", f"duplicate object id {obj.id!r}")
        seen.add(obj.id)
        all_ids.add(obj.id)

    _validate_object(doc.root, "/", all_ids, report, parent_kind=None)

    derived = {f"r-{i}" for i in all_ids} | {f"t-{i}" for i in all_ids}
    for clash in sorted(all_ids & derived):
        report.error(
            "DerivedIdCollision", f"/{clash}",
            f"object id {clash!r} collides with a derived region/time id",
        )
    return report


def _validate_object(
    obj: ObjectNode,
    parent_path: str,
    all_ids: set[str],
    report: ValidationReport,
    parent_kind: str | None,
) -> None:
    path = f"{parent_path.rstrip('/')}/{obj.id}"
    if not obj.id or not NAME_RE.match(obj.id):
        report.error("InvalidId", path, f"object id {obj.id!r} is not a valid XML name")
    if obj.kind not in OBJECT_KINDS:
        report.error("InvalidKind", path, f"invalid object kind {obj.kind!r}")

    if obj.kind == "media":
        if obj.children:
            report.error("MediaWithChildren", path, "media objects cannot have children")
        if obj.media is None:
            report.error("MediaRefMissing", path, "media object carries no media reference")
        else:
            _validate_media_ref(obj.media, path, report)
    else:
        if obj.media is not None:
            report.error("MediaRefOnContainer", path,
                         "container objects cannot carry a media reference")

    begin = obj.timing.begin
    if isinstance(begin, ClickTrigger):
        if begin.target not in all_ids:
            report.error("DanglingClickTarget", path,
                         f"click target {begin.target!r} names no object")
        if parent_kind != "excl":
            report.warn("EventBeginOutsideExcl", path,
                        "click-triggered begins only take effect on excl children")
    elif isinstance(begin, ClockOffset) and begin.ms < 0:
        report.error("NegativeBegin", path, "begin offset must be >= 0")

    dur = obj.timing.dur
    if isinstance(dur, FixedDur) and dur.ms <= 0:
        report.error("NonPositiveDuration", path, "fixed durations must be > 0 ms")
    elif dur is SpecialDur.MEDIA:
        if obj.kind != "media":
            report.error("MediaDurOnContainer", path,
                         "dur='media' is only valid on media objects")
        elif obj.media is not None and obj.media.type not in CONTINUOUS_TYPES:
            report.error("MediaDurOnStaticMedia", path,
                         f"dur='media' is invalid on {obj.media.type} media")

    if parent_kind == "excl" and not isinstance(begin, ClickTrigger):
        report.warn("UnreachableExclChild", path,
                    "excl children activate only via click triggers; this child never will")

    if obj.spatial is not None:
        _validate_spatial(obj.spatial, path, report)

    for child in obj.children:
        _validate_object(child, path, all_ids, report, parent_kind=obj.kind)


def _validate_media_ref(media: MediaRef, path: str, report: ValidationReport) -> None:
    if media.type not in MEDIA_TYPES:
        report.error("InvalidMediaType", path, f"invalid media type {media.type!r}")
        return
    if media.type == "text":
        if media.src is not None:
            report.error("SrcOnText", path, "text media cannot reference a src URI")
        if media.text_content is None or media.text_style is None:
            report.error("TextContentMissing", path,
                         "text media must carry content and styling")
        elif media.text_style.font_size_px <= 0:
            report.error("InvalidFontSize", path, "font size must be > 0 px")
    else:
        if media.src is None:
            report.error("SrcMissing", path, f"{media.type} media must reference a src URI")
        if media.text_content is not None or media.text_style is not None:
            report.error("TextOnNonText", path,
                         "only text media may carry text content or styling")


def _validate_spatial(spatial: SpatialSpec, path: str, report: ValidationReport) -> None:
    for attr in ("left", "top", "width", "height"):
        value = getattr(spatial, attr)
        if isinstance(value, Percent) and not 0 <= value.value <= 100:
            report.error("PercentOutOfRange", path,
                         f"{attr}={value.value}% is outside [0, 100]")
        elif isinstance(value, Px) and value.value < 0:
            report.error("NegativePixel", path, f"{attr}={value.value}px is negative")
        elif value is CENTER and attr in ("width", "height"):
            report.error("CenterOnExtent", path, "'center' is only allowed for left/top")
