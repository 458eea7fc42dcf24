from __future__ import annotations

import re

from hypothesis import given, settings, strategies as st

from medex.intermediate import parse_intermediate, serialize_intermediate
from medex.model import Static
from medex.oracle import timeline_oracle
from medex.resolver import compile_document, resolve_timing, static_intervals
from medex.smil import emit_smil
from medex.smil_import import import_smil
from medex.errors import MedexError
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
    SpatialSpec,
    SpecialDur,
    TextStyle,
    TimingSpec,
    parse_source,
    validate_source,
)
from medex.xhtml import emit_xhtml
from util import object_geometry, source_to_xml, time_shape

# ---------------------------------------------------------------------------
# document strategies


def _lengths():
    return st.one_of(
        st.integers(0, 100).map(Percent),
        st.integers(0, 400).map(Px),
    )


def _positions():
    return st.one_of(_lengths(), st.just(CENTER))


_spatials = st.one_of(
    st.none(),
    st.builds(
        SpatialSpec,
        left=_positions(),
        top=_positions(),
        width=_lengths(),
        height=_lengths(),
        z=st.integers(-3, 9),
    ),
)

_fonts = st.sampled_from(["serif", "sans-serif", "monospace", "Liberation Serif"])
_srcs = st.sampled_from(["media/a.png", "media/b.jpg", "clips/c.mp4", "snd/d.mp3"])
_texts = st.text(
    st.characters(min_codepoint=32, max_codepoint=0x2FFF, blacklist_categories=("Cs",)),
    max_size=24,
).map(lambda s: " ".join(s.split()))


@st.composite
def _documents(draw, allow_dynamic: bool):
    counter = [0]

    def fresh_id() -> str:
        counter[0] += 1
        return f"o{counter[0]}"

    def leaf_timing() -> TimingSpec:
        begin = ClockOffset(draw(st.integers(0, 400)))
        if allow_dynamic and draw(st.integers(0, 3)) == 0:
            return TimingSpec(begin, SpecialDur.UNSPECIFIED)
        return TimingSpec(begin, FixedDur(draw(st.integers(1, 800))))

    def media_node() -> ObjectNode:
        choice = draw(st.integers(0, 3))
        if choice == 0:
            media = MediaRef(
                type="text",
                text_content=draw(_texts),
                text_style=TextStyle(draw(_fonts), draw(st.integers(6, 40)),
                                     tuple(draw(st.integers(0, 255)) for _ in range(3))),
            )
            timing = TimingSpec(ClockOffset(draw(st.integers(0, 400))),
                                FixedDur(draw(st.integers(1, 800))))
        elif choice == 1 and allow_dynamic:
            media = MediaRef(type=draw(st.sampled_from(["audio", "video"])), src=draw(_srcs))
            timing = leaf_timing()
        else:
            media = MediaRef(type="image", src=draw(_srcs))
            timing = leaf_timing()
        return ObjectNode(
            id=fresh_id(), kind="media", timing=timing,
            spatial=draw(_spatials), media=media,
        )

    def container(depth: int) -> ObjectNode:
        kinds = ["par", "seq", "excl"] if allow_dynamic and depth else ["par", "seq"]
        kind = draw(st.sampled_from(kinds))
        size = draw(st.integers(0, 3 if depth else 2))
        children = []
        for _ in range(size):
            if depth < 2 and draw(st.integers(0, 2)) == 0:
                children.append(container(depth + 1))
            else:
                children.append(media_node())
        if kind == "excl":
            # triggers are rewritten to a real object id after the build
            children = [
                ObjectNode(
                    id=child.id, kind=child.kind,
                    timing=TimingSpec(ClickTrigger("placeholder"), child.timing.dur),
                    spatial=child.spatial, media=child.media, children=child.children,
                )
                for child in children
            ]
        dur = (
            FixedDur(draw(st.integers(1, 1500)))
            if draw(st.integers(0, 3)) == 0
            else SpecialDur.UNSPECIFIED
        )
        return ObjectNode(
            id=fresh_id(), kind=kind,
            timing=TimingSpec(ClockOffset(draw(st.integers(0, 200))), dur),
            spatial=draw(_spatials), children=children,
        )

    doc = SourceDocument(
        canvas_width=draw(st.integers(50, 1200)),
        canvas_height=draw(st.integers(50, 900)),
        root=container(0),
        title=draw(_texts),
    )
    first_id = doc.root.id
    for obj in doc.root.walk():
        if isinstance(obj.timing.begin, ClickTrigger):
            obj.timing = TimingSpec(ClickTrigger(first_id), obj.timing.dur)
    return doc


static_documents = _documents(allow_dynamic=False)
any_documents = _documents(allow_dynamic=True)


# ---------------------------------------------------------------------------
# properties


@given(static_documents)
@settings(max_examples=60, deadline=None)
def test_oracle_equivalence_on_random_static_documents(doc):
    assert validate_source(doc).ok
    table, unknown = static_intervals(resolve_timing(doc))
    assert unknown == set()
    oracle = timeline_oracle(doc)
    assert oracle.entries == table.entries


@given(any_documents)
@settings(max_examples=60, deadline=None)
def test_compile_serialize_parse_round_trip(doc):
    compiled = compile_document(doc)
    data = serialize_intermediate(compiled)
    reparsed = parse_intermediate(data)
    assert reparsed == compiled
    assert serialize_intermediate(reparsed) == data


@given(any_documents)
@settings(max_examples=60, deadline=None)
def test_pixel_closure(doc):
    data = serialize_intermediate(compile_document(doc))
    layout = re.search(rb"<layout.*</layout>", data, re.S).group(0)
    assert b"%" not in layout
    assert b"center" not in layout


@given(any_documents)
@settings(max_examples=60, deadline=None)
def test_absolute_relative_consistency(doc):
    compiled = compile_document(doc)

    def check(region, base_left, base_top):
        assert region.abs_left == base_left + region.rel_left
        assert region.abs_top == base_top + region.rel_top
        assert region.width >= 0 and region.height >= 0
        for child in region.children:
            check(child, region.abs_left, region.abs_top)

    check(compiled.layout, 0, 0)


@given(static_documents)
@settings(max_examples=60, deadline=None)
def test_monotone_seq_begins(doc):
    from medex.model import TimeKind

    for node in resolve_timing(doc).walk():
        if node.kind is not TimeKind.SEQ:
            continue
        begins = []
        if all(
            isinstance(c.begin, Static) and isinstance(c.dur, Static) and c.dur.ms > 0
            for c in node.children
        ):
            begins = [c.begin.ms for c in node.children]
        assert begins == sorted(begins)
        assert len(set(begins)) == len(begins)


@given(any_documents)
@settings(max_examples=40, deadline=None)
def test_compile_is_deterministic(doc):
    assert serialize_intermediate(compile_document(doc)) == serialize_intermediate(
        compile_document(doc)
    )


@given(any_documents)
@settings(max_examples=40, deadline=None)
def test_source_writer_parser_agree(doc):
    assert parse_source(source_to_xml(doc)) == doc


@given(any_documents)
@settings(max_examples=40, deadline=None)
def test_backends_accept_every_valid_document(doc):
    compiled = compile_document(doc)
    smil = emit_smil(compiled)
    xhtml = emit_xhtml(compiled)
    assert smil.document_bytes.startswith(b"<?xml")
    assert xhtml.html_bytes.startswith(b"<?xml")
    pngs = [e for e in smil.manifest if e.kind == "generated-png"]
    texts = [a for a in compiled.media if a.type == "text"]
    assert len(pngs) == len(texts)


@given(any_documents)
@settings(max_examples=40, deadline=None)
def test_pivot_round_trip_random(doc):
    compiled = compile_document(doc)
    imported = import_smil(emit_smil(compiled).document_bytes)
    assert time_shape(imported.doc.timing) == time_shape(compiled.timing)
    assert object_geometry(imported.doc) == object_geometry(compiled)


@given(any_documents, st.integers(0, 10**9), st.integers(0, 255))
@settings(max_examples=80, deadline=None)
def test_parser_is_total_on_mutated_bytes(doc, position, value):
    # any single-byte corruption must surface as a pipeline error, never as
    # an unhandled exception
    data = bytearray(serialize_intermediate(compile_document(doc)))
    data[position % len(data)] = value
    try:
        parse_intermediate(bytes(data))
    except MedexError:
        pass
