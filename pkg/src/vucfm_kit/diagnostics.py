"""Positioned diagnostics shared by the parser, validator and derivations.

Codes are stable: ``P###`` parse, ``V###`` validation, ``D###`` derivation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True, order=True)
class SourcePosition:
    offset: int  # 0-based byte offset into the UTF-8 encoding
    line: int  # 1-based
    column: int  # 1-based, counted in characters

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    message: str
    position: Optional[SourcePosition] = None

    @classmethod
    def error(cls, code: str, message: str, position: Optional[SourcePosition] = None) -> Diagnostic:
        return cls(Severity.ERROR, code, message, position)

    @classmethod
    def warning(cls, code: str, message: str, position: Optional[SourcePosition] = None) -> Diagnostic:
        return cls(Severity.WARNING, code, message, position)

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def sort_key(self) -> tuple:
        pos = self.position
        return (pos is None, pos.offset if pos else 0, self.code, self.message)

    def format(self, filename: str = "<input>") -> str:
        """``FILE:LINE:COL: SEVERITY[CODE]: MESSAGE``; model-level issues omit LINE:COL."""
        where = f"{filename}:{self.position}" if self.position else filename
        return f"{where}: {self.severity.value}[{self.code}]: {self.message}"

    def __str__(self) -> str:
        return self.format()


def has_errors(diagnostics: Iterable[Diagnostic]) -> bool:
    return any(d.is_error for d in diagnostics)


def sort_diagnostics(diagnostics: Iterable[Diagnostic]) -> list[Diagnostic]:
    return sorted(diagnostics, key=Diagnostic.sort_key)


class DiagnosticError(Exception):
    """Base for failures that carry one or more diagnostics."""

    def __init__(self, diagnostics: Iterable[Diagnostic]) -> None:
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(f"[{d.code}] {d.message}" for d in self.diagnostics))

    @property
    def codes(self) -> list[str]:
        return [d.code for d in self.diagnostics]
