"""Exception hierarchy and validation report types shared by all stages."""

from __future__ import annotations

from dataclasses import dataclass, field


class MedexError(Exception):
    """Base class for all pipeline errors.

    ``code`` is the stable machine-readable identifier printed by the CLI;
    ``path`` locates the offending node inside the document, when known.
    """

    code = "MedexError"

    def __init__(self, message: str, path: str = ""):
        super().__init__(message)
        self.message = message
        self.path = path


class XmlSyntaxError(MedexError):
    """Input bytes are not well-formed XML."""

    code = "XmlSyntaxError"


class SchemaError(MedexError):
    """Well-formed XML that does not fit the expected schema."""

    code = "SchemaError"


class DuplicateId(MedexError):
    """Two objects in one document share an id."""

    code = "DuplicateId"


class CrossRefViolation(MedexError):
    """A reference names a region, time node, or asset that does not exist."""

    code = "CrossRefViolation"


class InvariantViolation(MedexError):
    """A document handed to a backend fails its structural invariants."""

    code = "InvariantViolation"


class UnsupportedFeature(MedexError):
    """Imported document uses a feature outside the supported subset."""

    code = "UnsupportedFeature"


class RasterizeError(MedexError):
    """Text rasterization failed."""

    code = "RasterizeError"


class DegenerateBox(RasterizeError):
    """Rasterization was requested for an empty box."""

    code = "DegenerateBox"


@dataclass(frozen=True)
class Issue:
    """One diagnostic: a stable code, a node path, and a human message."""

    code: str
    path: str
    message: str


@dataclass
class ValidationReport:
    """Outcome of a validation pass; empty ``errors`` means the input is valid."""

    errors: list[Issue] = field(default_factory=list)
    warnings: list[Issue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def error(self, code: str, path: str, message: str) -> None:
        self.errors.append(Issue(code, path, message))

    def warn(self, code: str, path: str, message: str) -> None:
        self.warnings.append(Issue(code, path, message))

    def error_codes(self) -> set[str]:
        return {issue.code for issue in self.errors}

    def warning_codes(self) -> set[str]:
        return {issue.code for issue in self.warnings}
