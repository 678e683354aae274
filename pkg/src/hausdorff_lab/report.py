"""Machine-readable run reports with a canonical, diff-stable JSON form."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path

import numpy as np

FLOAT_FORMAT = "%.12e"


def package_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0.0.0"


@dataclass
class Check:
    """One pass/fail record; ``provenance`` says where each number came from."""

    name: str
    passed: bool
    bound: float | None = None
    empirical: float | None = None
    residuals: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "bound": self.bound,
            "empirical": self.empirical,
            "residuals": self.residuals,
            "provenance": self.provenance,
            "detail": self.detail,
        }


@dataclass
class Report:
    command: str
    config: dict
    checks: list[Check] = field(default_factory=list)
    constants: dict = field(default_factory=dict)
    version: str = field(default_factory=package_version)
    wall_clock: float | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def to_dict(self) -> dict:
        out = {
            "command": self.command,
            "config": self.config,
            "checks": [c.to_dict() for c in self.checks],
            "constants": self.constants,
            "summary": {
                "n_checks": len(self.checks),
                "n_failed": sum(not c.passed for c in self.checks),
                "passed": self.passed,
            },
            "version": self.version,
        }
        if self.wall_clock is not None:
            out["wall_clock_s"] = self.wall_clock
        return out


def _plain(obj):
    """Convert numpy scalars/arrays and tuples into JSON-native values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def _format_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return FLOAT_FORMAT % x


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_encode(obj[k], indent, level + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + _encode(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=True)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def canonical_json(data, indent: int = 2) -> str:
    """Sorted keys, floats as %.12e, non-finite floats as strings; ends with a newline."""
    if isinstance(data, Report):
        data = data.to_dict()
    return _encode(_plain(data), indent, 0) + "\n"


def _flatten(prefix: str, obj, out: dict):
    if isinstance(obj, dict):
        for k in sorted(obj):
            _flatten(f"{prefix}.{k}" if prefix else str(k), obj[k], out)
    elif isinstance(obj, list):
        out[prefix] = json.dumps(_plain(obj))
    elif isinstance(obj, float):
        out[prefix] = _format_float(obj).strip('"')
    elif obj is None:
        out[prefix] = ""
    else:
        out[prefix] = obj


def csv_text(report: Report | dict) -> str:
    """One row per check, nested fields flattened with dotted column names."""
    data = report.to_dict() if isinstance(report, Report) else report
    rows = []
    for check in data["checks"]:
        flat: dict = {}
        _flatten("", _plain(check), flat)
        rows.append(flat)
    columns = sorted({k for r in rows for k in r}) or ["name", "passed"]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow(r)
    return buf.getvalue()


def emit_report(report: Report, path: str | Path | None = None, fmt: str = "json") -> str:
    """Write the report (stdout when ``path`` is None) and return the text."""
    if fmt == "json":
        text = canonical_json(report)
    elif fmt == "csv":
        text = csv_text(report)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path is None or str(path) == "-":
        print(text, end="")
    else:
        Path(path).write_text(text, encoding="ascii")
    return text


def load_report(text: str) -> dict:
    return json.loads(text)
