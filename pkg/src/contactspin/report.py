"""Verification checks and reports with deterministic JSON and text rendering."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, List, Optional

import numpy as np

from .forms import Form, format_form

REPORT_VERSION = 1


def to_jsonable(value: Any) -> Any:
    """Convert forms, rationals and arrays into plain JSON values."""
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, Form):
        return {"form": format_form(value), **value.to_json()}
    if isinstance(value, Fraction):
        return str(value) if value.denominator != 1 else value.numerator
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return round(float(value), 12) + 0.0
    if isinstance(value, complex):
        return [to_jsonable(value.real), to_jsonable(value.imag)]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if hasattr(value, "to_json"):
        return to_jsonable(value.to_json())
    raise TypeError(f"cannot serialize {type(value).__name__}")


@dataclass
class Check:
    name: str
    anchor: str
    passed: bool
    value: Any = None
    residual: Any = None
    skipped: bool = False
    note: str = ""

    def to_json(self) -> dict:
        out = {"name": self.name, "paper_anchor": self.anchor, "pass": bool(self.passed)}
        if self.value is not None:
            out["value"] = to_jsonable(self.value)
        if self.residual is not None:
            out["residual"] = to_jsonable(self.residual)
        if self.skipped:
            out["skipped"] = True
        if self.note:
            out["note"] = self.note
        return out


def skip(name: str, anchor: str, reason: str) -> Check:
    """An explicit placeholder for a check whose hypotheses do not hold."""
    return Check(name, anchor, True, skipped=True, note=reason)


def exact_check(name: str, anchor: str, lhs, rhs) -> Check:
    """Pass iff ``lhs == rhs`` exactly; the residual is their difference."""
    residual = lhs - rhs
    ok = not residual if isinstance(residual, Form) else residual == 0
    return Check(name, anchor, bool(ok), value=lhs, residual=residual if not ok else None)


def numeric_check(name: str, anchor: str, lhs, rhs, tol: float) -> Check:
    err = float(np.max(np.abs(np.asarray(lhs, dtype=complex) - np.asarray(rhs, dtype=complex)), initial=0.0))
    return Check(name, anchor, err <= tol, value=lhs, residual=err)


@dataclass
class Report:
    checks: List[Check] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]

    def extend(self, checks) -> "Report":
        self.checks.extend(checks)
        return self

    def prefixed(self, prefix: str) -> List[Check]:
        return [Check(f"{prefix}{c.name}", c.anchor, c.passed, c.value, c.residual, c.skipped, c.note)
                for c in self.checks]

    def to_json(self) -> dict:
        return {
            "report_version": REPORT_VERSION,
            "checks": [c.to_json() for c in self.checks],
            "metadata": to_jsonable(self.metadata),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        return render_text(self.to_json())


def render_text(data: dict) -> str:
    """Human-readable summary derived from the JSON form."""
    lines = []
    meta = data.get("metadata", {})
    for key in sorted(meta):
        lines.append(f"# {key}: {json.dumps(meta[key], sort_keys=True)}")
    for c in data["checks"]:
        status = "SKIP" if c.get("skipped") else ("PASS" if c["pass"] else "FAIL")
        line = f"{status}  {c['name']}  [{c['paper_anchor']}]"
        if "residual" in c and not c["pass"]:
            line += f"  residual={json.dumps(c['residual'], sort_keys=True)}"
        lines.append(line)
    total = len(data["checks"])
    failed = sum(1 for c in data["checks"] if not c["pass"])
    lines.append(f"{total - failed}/{total} checks passed")
    return "\n".join(lines) + "\n"


def definition_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the target directory and rename into place."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".report-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def merge(reports: List[Report], metadata: Optional[dict] = None) -> Report:
    out = Report(metadata=dict(metadata or {}))
    for r in reports:
        out.checks.extend(r.checks)
    return out
