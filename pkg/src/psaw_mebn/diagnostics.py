"""Source spans, diagnostics and the exception hierarchy shared by all modules."""

from __future__ import annotations

import enum
from dataclasses import dataclass


class Severity(str, enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    message: str
    span: SourceSpan | None = None

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def promoted(self) -> Diagnostic:
        """Return a copy with warning severity raised to error."""
        return Diagnostic(Severity.ERROR, self.code, self.message, self.span)

    def to_dict(self) -> dict:
        span = self.span
        return {
            "severity": self.severity.value,
            "code": self.code,
            "message": self.message,
            "file": span.file if span else None,
            "line": span.line if span else None,
            "column": span.column if span else None,
        }

    def __str__(self) -> str:
        where = f"{self.span}: " if self.span else ""
        return f"{where}{self.severity.value}[{self.code}]: {self.message}"


def error(code: str, message: str, span: SourceSpan | None = None) -> Diagnostic:
    return Diagnostic(Severity.ERROR, code, message, span)


def warning(code: str, message: str, span: SourceSpan | None = None) -> Diagnostic:
    return Diagnostic(Severity.WARNING, code, message, span)


class MebnError(Exception):
    """Base class for all engine errors; ``code`` is a stable identifier."""

    code = "MEBN"

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code

    def __str__(self) -> str:
        return f"{self.code}: {self.args[0]}"


class ParseError(MebnError):
    """Raised by the parsers; carries every diagnostic found."""

    code = "PARSE"

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        first = self.diagnostics[0] if self.diagnostics else None
        super().__init__(str(first) if first else "parse failed", first.code if first else None)

    def __str__(self) -> str:
        return "\n".join(str(d) for d in self.diagnostics)


class NotFound(MebnError):
    code = "NOT-FOUND"


class MultipleHomes(MebnError):
    code = "UH-1"


class UnresolvedReference(MebnError):
    code = "UH-2"


class UnknownState(MebnError):
    code = "UNKNOWN-STATE"


class GroundingError(MebnError):
    code = "GROUND"


class InferenceError(MebnError):
    code = "INFER-1"


class OracleError(MebnError):
    code = "ORACLE-1"
