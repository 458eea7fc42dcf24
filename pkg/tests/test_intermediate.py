from __future__ import annotations

import copy

import pytest

from medex.errors import (
    CrossRefViolation,
    InvariantViolation,
    SchemaError,
    XmlSyntaxError,
)
from medex.intermediate import (
    parse_intermediate,
    serialize_intermediate,
    validate_intermediate,
)
from medex.model import MEDIA
from medex.resolver import compile_document
from medex.source import parse_source

ONE_IMAGE = (
    b'<doc width="800" height="600" title="One image">'
    b'<object id="root" kind="par">'
    b'<object id="pic" kind="media" type="image" src="media/photo.png">'
    b'<spatial left="200" top="150" width="400" height="300"/>'
    b'<timing dur="5s"/></object></object></doc>'
)


@pytest.fixture()
def one_image_doc():
    return compile_document(parse_source(ONE_IMAGE))


def test_one_image_matches_golden_pivot():
    from util import GOLDEN_DIR

    source = (GOLDEN_DIR / "one_image_source.xml").read_bytes()
    golden = (GOLDEN_DIR / "one_image.medex.xml").read_bytes()
    assert serialize_intermediate(compile_document(parse_source(source))) == golden


def test_root_has_five_sections(one_image_doc):
    import xml.etree.ElementTree as ET

    root = ET.fromstring(serialize_intermediate(one_image_doc))
    assert root.tag.endswith("}document")
    locals_ = [child.tag.split("}")[1] for child in root]
    assert locals_ == ["head", "layout", "timing", "references", "media"]


def test_serialization_is_canonical_and_idempotent(one_image_doc):
    first = serialize_intermediate(one_image_doc)
    assert serialize_intermediate(one_image_doc) == first
    reparsed = parse_intermediate(first)
    assert serialize_intermediate(reparsed) == first


def test_parse_round_trip_structural_equality(corpus):
    for entry in corpus:
        doc = compile_document(entry.source)
        data = serialize_intermediate(doc)
        assert parse_intermediate(data) == doc, entry.name


def test_unknown_element_in_namespace_rejected(one_image_doc):
    data = serialize_intermediate(one_image_doc).replace(
        b"<references>", b"<bogus/><references>"
    )
    with pytest.raises(SchemaError):
        parse_intermediate(data)


def test_dangling_region_ref_raises_crossref(one_image_doc):
    data = serialize_intermediate(one_image_doc).replace(
        b'region="r-pic"', b'region="rX"'
    )
    with pytest.raises(CrossRefViolation):
        parse_intermediate(data)


def test_malformed_bytes(one_image_doc):
    with pytest.raises(XmlSyntaxError):
        parse_intermediate(b"<document")


def test_percent_leak_in_bytes_is_schema_error(one_image_doc):
    data = serialize_intermediate(one_image_doc).replace(b'left="200"', b'left="50%"')
    with pytest.raises(SchemaError):
        parse_intermediate(data)


def test_foreign_namespace_head_content_round_trips(one_image_doc):
    data = serialize_intermediate(one_image_doc).replace(
        b"</head>",
        b'<dc:creator xmlns:dc="http://purl.org/dc/elements/1.1/">me</dc:creator></head>',
    )
    doc = parse_intermediate(data)
    assert doc.head_foreign == [
        '<creator xmlns="http://purl.org/dc/elements/1.1/">me</creator>'
    ]
    again = serialize_intermediate(doc)
    assert b'<creator xmlns="http://purl.org/dc/elements/1.1/">me</creator>' in again
    assert parse_intermediate(again) == doc


def test_foreign_namespace_dropped_outside_head(one_image_doc, caplog):
    data = serialize_intermediate(one_image_doc).replace(
        b"<references>", b'<x:junk xmlns:x="urn:other"/><references>'
    )
    with caplog.at_level("WARNING", logger="medex.intermediate"):
        doc = parse_intermediate(data)
    assert doc == one_image_doc
    assert any("foreign element" in rec.message for rec in caplog.records)


def test_serializer_refuses_invalid_document(one_image_doc):
    broken = copy.deepcopy(one_image_doc)
    broken.references[0] = type(broken.references[0])("pic", "r-missing", "t-pic")
    with pytest.raises(InvariantViolation):
        serialize_intermediate(broken)


def test_validate_accepts_compiled_corpus(corpus):
    for entry in corpus:
        report = validate_intermediate(compile_document(entry.source))
        assert report.errors == [], entry.name


# ---------------------------------------------------------------------------
# single-defect mutations: every broken document must be caught with the
# expected code (the deliberate redundancy makes these checkable)


def _region(doc, region_id):
    return next(r for r in doc.layout.walk() if r.region_id == region_id)


def _time(doc, time_id):
    return next(t for t in doc.timing.walk() if t.time_id == time_id)


def _seq_doc():
    return compile_document(parse_source(
        b'<doc width="800" height="600" title="seq">'
        b'<object id="root" kind="seq">'
        b'<object id="a" kind="media" type="image" src="a.png"><timing dur="5s"/></object>'
        b'<object id="b" kind="media" type="image" src="b.png"><timing dur="3s"/></object>'
        b"</object></doc>"
    ))


def mutate_dangling_region(doc):
    doc.references[0] = type(doc.references[0])("a", "r-ghost", "t-a")


def mutate_dangling_time(doc):
    doc.references[0] = type(doc.references[0])("a", "r-a", "t-ghost")


def mutate_time_ref_not_leaf(doc):
    doc.references[0] = type(doc.references[0])("a", "r-a", "t-root")


def mutate_region_reuse(doc):
    doc.references[1] = type(doc.references[1])("b", "r-a", "t-b")


def mutate_time_reuse(doc):
    doc.references[1] = type(doc.references[1])("b", "r-b", "t-a")


def mutate_duplicate_ref(doc):
    doc.references.append(doc.references[0])


def mutate_ref_without_asset(doc):
    doc.media.pop(0)


def mutate_asset_without_ref(doc):
    doc.references.pop(0)


def mutate_duplicate_asset(doc):
    doc.media.append(doc.media[0])


def mutate_percent_leak(doc):
    _region(doc, "r-a").rel_left = "50%"


def mutate_center_leak(doc):
    _region(doc, "r-b").rel_top = "center"


def mutate_abs_rel_mismatch(doc):
    _region(doc, "r-a").abs_left += 7


def mutate_negative_extent(doc):
    region = _region(doc, "r-a")
    region.width = -10
    region.abs_left -= 0  # keep consistency checks focused on the extent


def mutate_reordered_seq(doc):
    doc.timing.children.reverse()


def mutate_missing_title(doc):
    del doc.head["title"]


def mutate_duplicate_region_id(doc):
    _region(doc, "r-b").region_id = "r-a"


def mutate_duplicate_time_id(doc):
    _time(doc, "t-b").time_id = "t-a"


def mutate_leaf_without_object(doc):
    _time(doc, "t-a").object_id = None


def mutate_media_dur_on_container(doc):
    doc.timing.dur = MEDIA


def mutate_ref_time_object_mismatch(doc):
    doc.references[0] = type(doc.references[0])("a", "r-a", "t-b")
    doc.references[1] = type(doc.references[1])("b", "r-b", "t-a")


MUTATIONS = [
    (mutate_dangling_region, "DanglingRegionRef"),
    (mutate_dangling_time, "DanglingTimeRef"),
    (mutate_time_ref_not_leaf, "TimeRefNotLeaf"),
    (mutate_region_reuse, "RegionReuse"),
    (mutate_time_reuse, "TimeReuse"),
    (mutate_duplicate_ref, "DuplicateRef"),
    (mutate_ref_without_asset, "RefWithoutAsset"),
    (mutate_asset_without_ref, "AssetWithoutRef"),
    (mutate_duplicate_asset, "DuplicateAsset"),
    (mutate_percent_leak, "UnresolvedSpatialValue"),
    (mutate_center_leak, "UnresolvedSpatialValue"),
    (mutate_abs_rel_mismatch, "AbsRelMismatch"),
    (mutate_negative_extent, "NegativeExtent"),
    (mutate_reordered_seq, "SeqBeginRegression"),
    (mutate_missing_title, "MissingMeta"),
    (mutate_duplicate_region_id, "DuplicateRegionId"),
    (mutate_duplicate_time_id, "DuplicateTimeId"),
    (mutate_leaf_without_object, "LeafWithoutObject"),
    (mutate_media_dur_on_container, "MediaDurOnContainer"),
    (mutate_ref_time_object_mismatch, "RefTimeObjectMismatch"),
]


@pytest.mark.parametrize("mutate, code", MUTATIONS, ids=[c for _, c in MUTATIONS])
def test_single_defect_mutations(mutate, code):
    doc = _seq_doc()
    assert validate_intermediate(doc).errors == []
    mutate(doc)
    report = validate_intermediate(doc)
    assert report.errors, f"mutation for {code} went unnoticed"
    assert code in report.error_codes()


def test_pixel_closure_tokens_absent(corpus):
    import re

    for entry in corpus:
        data = serialize_intermediate(compile_document(entry.source))
        layout = re.search(rb"<layout.*</layout>", data, re.S).group(0)
        assert b"%" not in layout, entry.name
        assert b"center" not in layout, entry.name
