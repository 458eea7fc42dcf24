from __future__ import annotations

import xml.etree.ElementTree as ET

from medex.resolver import compile_document
from medex.source import parse_source
from medex.xhtml import TIMESHEET_NS, XHTML_NS, emit_xhtml
from medex.xmlio import split_tag
from util import GOLDEN_DIR, parse_css, time_shape

_TS_CONTAINERS = {"par", "seq", "excl"}


def _timesheet_shape(html_bytes: bytes) -> tuple:
    root = ET.fromstring(html_bytes)
    sheet = root.find(f".//{{{TIMESHEET_NS}}}timesheet")
    assert sheet is not None

    def shape(el):
        local = split_tag(el.tag)[1]
        kind = local if local in _TS_CONTAINERS else "leaf"
        return (kind, tuple(shape(child) for child in el))

    children = list(sheet)
    assert len(children) == 1
    return shape(children[0])


def test_one_image_matches_golden():
    source = (GOLDEN_DIR / "one_image_source.xml").read_bytes()
    bundle = emit_xhtml(compile_document(parse_source(source)))
    assert bundle.html_bytes == (GOLDEN_DIR / "one_image.html").read_bytes()
    assert bundle.css_bytes == (GOLDEN_DIR / "one_image.css").read_bytes()


def test_region_css_values_copied_exactly():
    doc = compile_document(parse_source(
        b'<doc width="800" height="600" title="x"><object id="r" kind="par">'
        b'<object id="m" kind="media" type="image" src="i.png">'
        b'<spatial left="25%" top="60" width="50%" height="300"/>'
        b"</object></object></doc>"
    ))
    css = parse_css(emit_xhtml(doc).css_bytes)
    rule = css["#r-m"]
    assert rule["position"] == "absolute"
    assert rule["left"] == "200px"
    assert rule["top"] == "60px"
    assert rule["width"] == "400px"
    assert rule["height"] == "300px"


def test_object_ids_appear_exactly_once(corpus):
    for entry in corpus:
        doc = compile_document(entry.source)
        root = ET.fromstring(emit_xhtml(doc).html_bytes)
        body = root.find(f"{{{XHTML_NS}}}body")
        ids = [el.get("id") for el in body.iter() if el.get("id")]
        assert len(ids) == len(set(ids)), entry.name
        id_set = set(ids)
        for ref in doc.references:
            assert ref.object_id in id_set, entry.name
            assert sum(1 for i in ids if i == ref.object_id) == 1


def test_region_ids_are_css_selectors(corpus):
    for entry in corpus:
        doc = compile_document(entry.source)
        css = parse_css(emit_xhtml(doc).css_bytes)
        for region in doc.layout.walk():
            rule = css[f"#{region.region_id}"]
            assert rule["position"] == "absolute"
            assert rule["left"] == f"{region.rel_left}px"
            assert rule["top"] == f"{region.rel_top}px"
            assert rule["width"] == f"{region.width}px"
            assert rule["height"] == f"{region.height}px"


def test_timesheet_isomorphism(corpus):
    for entry in corpus:
        doc = compile_document(entry.source)
        assert _timesheet_shape(emit_xhtml(doc).html_bytes) == time_shape(doc.timing), entry.name


def test_text_rendered_natively():
    doc = compile_document(parse_source(
        b'<doc width="100" height="100" title="x"><object id="r" kind="par">'
        b'<object id="quote" kind="media" type="text" font="Liberation Serif" '
        b'fontSize="18" color="#112233">Vive le pivot</object></object></doc>'
    ))
    bundle = emit_xhtml(doc)
    root = ET.fromstring(bundle.html_bytes)
    div = next(
        el for el in root.iter(f"{{{XHTML_NS}}}div") if el.get("id") == "quote"
    )
    assert div.text == "Vive le pivot"
    css = parse_css(bundle.css_bytes)
    assert css["#quote"]["font-family"] == '"Liberation Serif"'
    assert css["#quote"]["font-size"] == "18px"
    assert css["#quote"]["color"] == "#112233"
    assert bundle.manifest == []  # nothing rasterized, nothing copied


def test_click_trigger_attribute(corpus):
    entry = next(doc for doc in corpus if doc.name == "c13_excl_menu")
    bundle = emit_xhtml(compile_document(entry.source))
    assert b'begin="click(btn1)"' in bundle.html_bytes
    assert b'begin="click(btn2)"' in bundle.html_bytes


def test_native_media_elements():
    doc = compile_document(parse_source(
        b'<doc width="100" height="100" title="x"><object id="r" kind="par">'
        b'<object id="song" kind="media" type="audio" src="s.mp3"/>'
        b'<object id="film" kind="media" type="video" src="f.mp4"><timing dur="2s"/></object>'
        b"</object></doc>"
    ))
    data = emit_xhtml(doc).html_bytes
    root = ET.fromstring(data)
    audio = root.find(f".//{{{XHTML_NS}}}audio")
    video = root.find(f".//{{{XHTML_NS}}}video")
    assert audio.get("preload") == "auto"
    assert audio.get("src") == "assets/s.mp3"
    assert video.get("src") == "assets/f.mp4"
    assert b"<audio" in data and b"</audio>" in data  # never self-closed


def test_single_script_and_stylesheet(corpus):
    for entry in corpus:
        doc = compile_document(entry.source)
        bundle = emit_xhtml(doc)
        root = ET.fromstring(bundle.html_bytes)  # well-formed XML by parsing
        scripts = root.findall(f".//{{{XHTML_NS}}}script")
        links = root.findall(f".//{{{XHTML_NS}}}link")
        assert len(scripts) == 1 and scripts[0].get("src") == bundle.scheduler_ref
        assert len(links) == 1 and links[0].get("href") == "styles.css"


def test_hidden_class_rule_present():
    doc = compile_document(parse_source(
        b'<doc width="10" height="10" title="x"><object id="r" kind="par"/></doc>'
    ))
    css = parse_css(emit_xhtml(doc).css_bytes)
    assert css[".medex-hidden"]["visibility"] == "hidden"
