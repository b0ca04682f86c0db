"""Machine-readable run reports with stable field ordering."""
from __future__ import annotations

import enum
import json
import sys
from dataclasses import asdict, dataclass, field, is_dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np


@dataclass
class Check:
    name: str
    passed: bool
    value: object = None
    expected: object = None
    asserted: bool = True

    @property
    def status(self) -> str:
        if not self.asserted:
            return "REPORT"
        return "PASS" if self.passed else "FAIL"


@dataclass
class RunReport:
    command: list[str] = field(default_factory=list)
    config: dict = field(default_factory=dict)
    seeds: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    results: dict = field(default_factory=dict)
    artifacts: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    timing: dict | None = None

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks if c.asserted)

    def add(self, name: str, passed: bool, value=None, expected=None, asserted: bool = True) -> Check:
        check = Check(name, bool(passed), value, expected, asserted)
        self.checks.append(check)
        return check

    def to_dict(self) -> dict:
        out = {
            "command": self.command,
            "config": self.config,
            "seeds": self.seeds,
            "checks": [{**asdict(c), "status": c.status} for c in self.checks],
            "results": self.results,
            "artifacts": self.artifacts,
            "warnings": self.warnings,
            "ok": self.ok,
        }
        if self.timing is not None:
            out["timing"] = self.timing
        return out


def _jsonable(obj):
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if is_dataclass(obj):
        return asdict(obj)
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def render_report(report: RunReport, fmt: str = "json") -> str:
    """JSON with sorted keys (byte-identical for identical inputs) or a line-per-check text form."""
    if fmt == "json":
        return json.dumps(report.to_dict(), sort_keys=True, indent=2, default=_jsonable) + "\n"
    lines = [f"{c.status} {c.name}" + ("" if c.value is None else f" value={json.dumps(c.value, default=_jsonable)}")
             for c in report.checks]
    for key in sorted(report.results):
        lines.append(f"{key}: {json.dumps(report.results[key], sort_keys=True, default=_jsonable)}")
    lines += [f"warning: {w}" for w in report.warnings]
    lines += [f"artifact: {a}" for a in report.artifacts]
    lines.append("OK" if report.ok else "FAILED")
    return "\n".join(lines) + "\n"


def emit_report(report: RunReport, fmt: str = "json", out: str | Path | None = None) -> str:
    """Render and write to ``out`` (or stdout); returns the text."""
    text = render_report(report, fmt)
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)
    return text
