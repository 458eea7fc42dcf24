"""Shared export-bundle plumbing: manifest entries and asset path layout.

Both backends ship self-contained bundles: every referenced media file is
rewritten to live under ``assets/`` next to the emitted document. Name
collisions get a ``-2``, ``-3``, ... suffix in document order, so the layout
is deterministic for a given input.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import IntermediateDocument

GENERATED_PNG = "generated-png"
COPIED_MEDIA = "copied-media"


@dataclass(frozen=True)
class ManifestEntry:
    path: str  # bundle-relative, forward slashes
    kind: str  # generated-png | copied-media
    source_object_id: str


def _basename(src: str) -> str:
    name = src.rsplit("/", 1)[-1]
    name = name.split("?", 1)[0].split("#", 1)[0]
    return name


def _dedupe(name: str, taken: set[str]) -> str:
    if name not in taken:
        return name
    stem, dot, ext = name.rpartition(".")
    if not dot:
        stem, ext = name, ""
    counter = 2
    while True:
        candidate = f"{stem}-{counter}.{ext}" if dot else f"{stem}-{counter}"
        if candidate not in taken:
            return candidate
        counter += 1


def asset_paths(
    doc: IntermediateDocument, rasterize_text: bool
) -> dict[str, tuple[str, str]]:
    """Map object id -> (bundle path, manifest kind), in document order.

    Text assets only appear when ``rasterize_text`` is set (the SMIL path);
    the XHTML backend renders text natively and ships no file for it.
    """
    taken: set[str] = set()
    table: dict[str, tuple[str, str]] = {}
    for asset in doc.media:
        if asset.type == "text":
            if not rasterize_text:
                continue
            name = _dedupe(f"text-{asset.object_id}.png", taken)
            kind = GENERATED_PNG
        else:
            name = _dedupe(_basename(asset.src) or asset.object_id, taken)
            kind = COPIED_MEDIA
        taken.add(name)
        table[asset.object_id] = (f"assets/{name}", kind)
    return table


def manifest_for(doc: IntermediateDocument, paths: dict[str, tuple[str, str]]) -> list[ManifestEntry]:
    return [
        ManifestEntry(path=paths[asset.object_id][0], kind=paths[asset.object_id][1],
                      source_object_id=asset.object_id)
        for asset in doc.media
        if asset.object_id in paths
    ]

