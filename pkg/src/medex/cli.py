"""Command-line front end: compile, export, import, validate, inspect.

Inputs are routed by their root namespace, so every command accepts source
documents, intermediate documents, or SMIL where that makes sense (exporting
a SMIL file transparently imports it first — the pivot in action).
Diagnostics go to stderr, one per line, as ``LEVEL CODE PATH MESSAGE``.
Exit codes: 0 success, 1 validation or unsupported-feature failure,
2 I/O failure, 3 usage error.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from urllib.parse import urljoin

from .errors import MedexError, SchemaError, ValidationReport, XmlSyntaxError
from .intermediate import (
    INTERMEDIATE_NS,
    parse_intermediate,
    serialize_intermediate,
    validate_intermediate,
)
from .model import MEDIA, UNRESOLVED, Event, IntermediateDocument
from .resolver import compile_document
from .smil import emit_smil
from .smil_import import _SMIL_NAMESPACES, import_smil
from .source import SOURCE_NS, parse_source, validate_source
from .xhtml import PLACEHOLDER_SCHEDULER_JS, emit_xhtml
from .xmlio import split_tag

SCHEDULER_ENV = "MEDEX_SCHEDULER_PATH"

_REMOTE_RE = re.compile(r"^[a-zA-Z][a-zA-Z0-9+.\-]*://")


@dataclass
class CliConfig:
    command: str
    input_path: Path
    output_path: Path | None = None
    target: str | None = None  # export only
    copy_assets: bool = True


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 3 instead of argparse's default 2
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="medex", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    compile_cmd = sub.add_parser("compile", help="resolve a source document to the pivot format")
    compile_cmd.add_argument("input", type=Path)
    compile_cmd.add_argument("--out", type=Path, required=True, help="output file")

    export_cmd = sub.add_parser("export", help="emit a publication bundle")
    export_cmd.add_argument("input", type=Path)
    export_cmd.add_argument("--to", dest="target", choices=("smil", "xhtml"), required=True)
    export_cmd.add_argument("--out", type=Path, required=True, help="output directory")
    export_cmd.add_argument(
        "--no-copy-assets", dest="copy_assets", action="store_false",
        help="do not copy referenced media into the bundle",
    )

    import_cmd = sub.add_parser("import-smil", help="import SMIL into the pivot format")
    import_cmd.add_argument("input", type=Path)
    import_cmd.add_argument("--out", type=Path, required=True, help="output file")

    validate_cmd = sub.add_parser("validate", help="report every problem in a document")
    validate_cmd.add_argument("input", type=Path)

    inspect_cmd = sub.add_parser("inspect", help="print a five-section summary")
    inspect_cmd.add_argument("input", type=Path)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 3
    config = CliConfig(
        command=args.command,
        input_path=args.input,
        output_path=getattr(args, "out", None),
        target=getattr(args, "target", None),
        copy_assets=getattr(args, "copy_assets", True),
    )
    try:
        return _dispatch(config)
    except MedexError as exc:
        _diag("ERROR", exc.code, exc.path, exc.message)
        return 1
    except OSError as exc:
        _diag("ERROR", "IoError", str(getattr(exc, "filename", "") or ""), str(exc))
        return 2


def _dispatch(config: CliConfig) -> int:
    handler = {
        "compile": _cmd_compile,
        "export": _cmd_export,
        "import-smil": _cmd_import,
        "validate": _cmd_validate,
        "inspect": _cmd_inspect,
    }[config.command]
    return handler(config)


# ---------------------------------------------------------------------------
# diagnostics and input routing


def _diag(level: str, code: str, path: str, message: str) -> None:
    print(f"{level} {code} {path or '-'} {message}", file=sys.stderr)


def _print_report(report: ValidationReport) -> None:
    for issue in report.errors:
        _diag("ERROR", issue.code, issue.path, issue.message)
    for issue in report.warnings:
        _diag("WARN", issue.code, issue.path, issue.message)


def _detect(data: bytes) -> str:
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise XmlSyntaxError(f"malformed XML: {exc}") from exc
    ns, local = split_tag(root.tag)
    if ns in ("", SOURCE_NS) and local == "doc":
        return "source"
    if ns == INTERMEDIATE_NS:
        return "intermediate"
    if ns in _SMIL_NAMESPACES:
        return "smil"
    raise SchemaError(f"unrecognized document root {root.tag!r}")


def _load_intermediate(config: CliConfig, data: bytes) -> IntermediateDocument | None:
    """Bring any accepted input to the pivot; None means errors were printed."""
    kind = _detect(data)
    if kind == "source":
        doc = parse_source(data)
        report = validate_source(doc)
        _print_report(report)
        if not report.ok:
            return None
        return compile_document(doc)
    if kind == "intermediate":
        return parse_intermediate(data)
    result = import_smil(data)
    _print_report(result.report)
    return result.doc


# ---------------------------------------------------------------------------
# commands


def _cmd_compile(config: CliConfig) -> int:
    data = config.input_path.read_bytes()
    if _detect(data) != "source":
        raise SchemaError("compile expects a source document")
    doc = parse_source(data)
    report = validate_source(doc)
    _print_report(report)
    if not report.ok:
        return 1
    _atomic_write(config.output_path, serialize_intermediate(compile_document(doc)))
    return 0


def _cmd_import(config: CliConfig) -> int:
    data = config.input_path.read_bytes()
    if _detect(data) != "smil":
        raise SchemaError("import-smil expects a SMIL document")
    result = import_smil(data)
    _print_report(result.report)
    _atomic_write(config.output_path, serialize_intermediate(result.doc))
    return 0


def _cmd_validate(config: CliConfig) -> int:
    data = config.input_path.read_bytes()
    kind = _detect(data)
    if kind == "source":
        report = validate_source(parse_source(data))
    elif kind == "intermediate":
        report = validate_intermediate(parse_intermediate(data))
    else:
        report = import_smil(data).report
    _print_report(report)
    return 0 if report.ok else 1


def _cmd_inspect(config: CliConfig) -> int:
    doc = _load_intermediate(config, config.input_path.read_bytes())
    if doc is None:
        return 1
    time_nodes = doc.time_nodes()
    unresolved = sum(
        1 for n in time_nodes if n.begin is UNRESOLVED or n.dur is UNRESOLVED
    )
    dynamic = sum(
        1 for n in time_nodes if isinstance(n.begin, Event) or n.dur is MEDIA
    )
    print(f"canvas.width={doc.canvas_width}")
    print(f"canvas.height={doc.canvas_height}")
    print(f"head.title={doc.head.get('title', '')}")
    print(f"sections.head={len(doc.head)}")
    print(f"sections.regions={len(doc.regions())}")
    print(f"sections.timeNodes={len(time_nodes)}")
    print(f"sections.references={len(doc.references)}")
    print(f"sections.assets={len(doc.media)}")
    print(f"timing.unresolved={unresolved}")
    print(f"timing.dynamic={dynamic}")
    return 0


def _cmd_export(config: CliConfig) -> int:
    data = config.input_path.read_bytes()
    doc = _load_intermediate(config, data)
    if doc is None:
        return 1

    outputs: list[tuple[str, bytes]] = []
    if config.target == "smil":
        bundle = emit_smil(doc)
        outputs.extend(sorted(bundle.files.items()))
        outputs.extend(_copied_assets(config, doc, bundle.manifest))
        index = ("index.smil", bundle.document_bytes)
    else:
        bundle = emit_xhtml(doc)
        outputs.extend(_copied_assets(config, doc, bundle.manifest))
        outputs.append(("styles.css", bundle.css_bytes))
        outputs.append((bundle.scheduler_ref, _scheduler_bytes()))
        index = ("index.html", bundle.html_bytes)

    outdir = config.output_path
    outdir.mkdir(parents=True, exist_ok=True)
    for rel_path, payload in outputs:
        _atomic_write(outdir / rel_path, payload)
    # the index is written last so a failed export never leaves a half bundle
    _atomic_write(outdir / index[0], index[1])
    return 0


def _copied_assets(config: CliConfig, doc: IntermediateDocument, manifest) -> list[tuple[str, bytes]]:
    if not config.copy_assets:
        return []
    base = doc.head.get("base", "")
    out = []
    for entry in manifest:
        if entry.kind != "copied-media":
            continue
        asset = doc.asset_for(entry.source_object_id)
        source = urljoin(base, asset.src) if base else asset.src
        if _REMOTE_RE.match(source):
            _diag("WARN", "SkippedRemoteAsset", entry.path,
                  f"{source!r} is remote; not copied")
            continue
        file_path = Path(source)
        if not file_path.is_absolute():
            file_path = config.input_path.parent / file_path
        if not file_path.is_file():
            _diag("WARN", "MissingAsset", entry.path, f"{str(file_path)!r} not found")
            continue
        out.append((entry.path, file_path.read_bytes()))
    return out


def _scheduler_bytes() -> bytes:
    override = os.environ.get(SCHEDULER_ENV)
    if override:
        return Path(override).read_bytes()
    return PLACEHOLDER_SCHEDULER_JS.encode("utf-8")


def _atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f"{path.name}.{os.getpid()}.tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


if __name__ == "__main__":
    sys.exit(main())
