"""
Verification reports and their tabular plot data.
"""
from __future__ import annotations

import json
import logging
from collections import namedtuple
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional

import mpmath

from .constant import CheckName, Provenance
from .artifact import ArtifactFile, to_csv

logger = logging.getLogger(__name__)

PLOTDATA_HEADER = ("check", "k", "p", "depth", "constant", "bound", "pass")

Constant = namedtuple('Constant', 'value provenance error_bound')


def encode_number(value):
    """Fractions as ``"p/q"`` strings, high-precision floats as floats."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, mpmath.mpf):
        return float(value)
    if isinstance(value, dict):
        return {str(k): encode_number(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode_number(v) for v in value]
    if hasattr(value, "value") and not isinstance(value, (int, float, str)):
        return value.value
    return value


def decode_number(value):
    if isinstance(value, str) and "/" in value:
        try:
            return Fraction(value)
        except ValueError:
            return value
    return value


@dataclass
class VerificationReport:
    check: CheckName
    parameters: dict = field(default_factory=dict)
    constants: Dict[str, Constant] = field(default_factory=dict)
    bounds: Dict[str, object] = field(default_factory=dict)
    passed: bool = False
    notes: List[str] = field(default_factory=list)
    rows: List[dict] = field(default_factory=list)

    def add_constant(self, name: str, value, provenance: Provenance = Provenance.EXACT, error_bound=0.0) -> None:
        self.constants[name] = Constant(value, provenance, error_bound)

    def add_row(self, constant, bound, passed: bool, k=None, p=None, depth=None) -> None:
        self.rows.append({"k": k, "p": p, "depth": depth, "constant": constant, "bound": bound, "pass": passed})

    def note(self, message: str) -> None:
        logger.warning(f"{self.check.value}: {message}")
        self.notes.append(message)

    @property
    def key(self):
        return self.check.value, json.dumps(encode_number(self.parameters), sort_keys=True)

    def to_dict(self) -> dict:
        return {
            "check": self.check.value,
            "parameters": encode_number(self.parameters),
            "constants": {name: {"value": encode_number(c.value), "provenance": c.provenance.value,
                                 "error_bound": encode_number(c.error_bound)}
                          for name, c in sorted(self.constants.items())},
            "bounds": encode_number(self.bounds),
            "pass": self.passed,
            "notes": list(self.notes),
            "rows": [encode_number(row) for row in self.rows],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "VerificationReport":
        report = cls(CheckName(data["check"]), dict(data.get("parameters", {})))
        for name, c in data.get("constants", {}).items():
            report.constants[name] = Constant(decode_number(c["value"]), Provenance(c["provenance"]),
                                              decode_number(c.get("error_bound", 0.0)))
        report.bounds = {k: decode_number(v) for k, v in data.get("bounds", {}).items()}
        report.passed = bool(data.get("pass", False))
        report.notes = list(data.get("notes", []))
        report.rows = [{k: decode_number(v) for k, v in row.items()} for row in data.get("rows", [])]
        return report


def merge_reports(reports: Iterable[VerificationReport]) -> List[VerificationReport]:
    """Reports in deterministic order, sorted by check name and parameters."""
    return sorted(reports, key=lambda report: report.key)


def reports_to_dict(reports: Iterable[VerificationReport]) -> dict:
    merged = merge_reports(reports)
    return {"pass": all(r.passed for r in merged), "reports": [r.to_dict() for r in merged]}


def reports_from_dict(data: dict) -> List[VerificationReport]:
    if "reports" in data:
        return [VerificationReport.from_dict(item) for item in data["reports"]]
    return [VerificationReport.from_dict(data)]


def _cell(value):
    value = encode_number(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    return value


def emit_plotdata(reports: Iterable[VerificationReport], path: Optional[str] = None) -> str:
    """Tidy CSV with one line per report row; header only for an empty set."""
    lines = []
    for report in merge_reports(reports):
        for row in report.rows:
            lines.append([report.check.value] + [_cell(row.get(column)) for column in PLOTDATA_HEADER[1:]])
    text = to_csv(PLOTDATA_HEADER, lines)
    if path is not None:
        ArtifactFile(path).write(text)
    return text
