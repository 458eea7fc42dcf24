"""medex: a multi-backend multimedia document compiler.

Source documents are resolved into a fully computed pivot format (pixel
layout, normalized par/seq/excl timing, references, assets) from which SMIL
and XHTML+CSS+Timesheets bundles are emitted; a SMIL subset imports back
into the same pivot.
"""

from .errors import (
    CrossRefViolation,
    DegenerateBox,
    DuplicateId,
    InvariantViolation,
    Issue,
    MedexError,
    RasterizeError,
    SchemaError,
    UnsupportedFeature,
    ValidationReport,
    XmlSyntaxError,
)
from .intermediate import (
    INTERMEDIATE_NS,
    parse_intermediate,
    serialize_intermediate,
    validate_intermediate,
)
from .model import (
    GENERATOR,
    INDEFINITE,
    MEDIA,
    UNRESOLVED,
    ActivationTable,
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
from .oracle import ClickEvent, timeline_oracle
from .rasterize import default_rasterize
from .resolver import (
    compile_document,
    propagate_static,
    resolve_spatial,
    resolve_timing,
    static_intervals,
)
from .smil import SMIL_NS, SmilBundle, emit_smil
from .smil_import import ImportResult, import_smil, parse_smil_clock
from .source import SourceDocument, parse_source, validate_source
from .xhtml import TIMESHEET_NS, XhtmlBundle, emit_xhtml

__version__ = "0.1.0"

__all__ = [
    "ActivationTable",
    "Asset",
    "ClickEvent",
    "CrossRefViolation",
    "DegenerateBox",
    "DuplicateId",
    "Event",
    "GENERATOR",
    "INDEFINITE",
    "INTERMEDIATE_NS",
    "ImportResult",
    "IntermediateDocument",
    "InvariantViolation",
    "Issue",
    "MEDIA",
    "MedexError",
    "RasterizeError",
    "Reference",
    "RegionNode",
    "SMIL_NS",
    "SchemaError",
    "SmilBundle",
    "SourceDocument",
    "Static",
    "TIMESHEET_NS",
    "TextPayload",
    "TimeKind",
    "TimeNode",
    "UNRESOLVED",
    "UnsupportedFeature",
    "ValidationReport",
    "XhtmlBundle",
    "XmlSyntaxError",
    "compile_document",
    "default_rasterize",
    "emit_smil",
    "emit_xhtml",
    "import_smil",
    "parse_intermediate",
    "parse_smil_clock",
    "parse_source",
    "propagate_static",
    "resolve_spatial",
    "resolve_timing",
    "serialize_intermediate",
    "static_intervals",
    "timeline_oracle",
    "validate_intermediate",
    "validate_source",
]
