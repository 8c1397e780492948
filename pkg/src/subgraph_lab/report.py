"""Machine-readable run reports.

A report is PASS iff every check record passes.  Serialization is canonical
(sorted keys, repr floats), so identical runs produce byte-identical payloads;
the wall-clock field is excluded from the canonical payload used by
determinism comparisons.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import __version__
from .errors import NoInput


@dataclass(frozen=True)
class CheckRecord:
    name: str
    status: str  # PASS | FAIL
    value: float | None = None
    tol: float | None = None

    def to_json(self) -> dict:
        return {"name": self.name, "status": self.status, "value": self.value, "tol": self.tol}

    @staticmethod
    def from_json(doc: dict) -> "CheckRecord":
        return CheckRecord(doc["name"], doc["status"], doc.get("value"), doc.get("tol"))


def check(name: str, value: float | None, tol: float | None, ok: bool | None = None) -> CheckRecord:
    if ok is None:
        ok = value is not None and tol is not None and value <= tol
    return CheckRecord(name, "PASS" if ok else "FAIL", value, tol)


@dataclass(frozen=True)
class Report:
    command: str
    config: dict
    records: tuple
    extra: dict = field(default_factory=dict)
    wall_clock_s: float = 0.0
    version: str = __version__

    @property
    def passed(self) -> bool:
        return all(r.status == "PASS" for r in self.records)

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "version": self.version,
            "pass": self.passed,
            "records": [r.to_json() for r in self.records],
            "extra": self.extra,
            "wall_clock_s": self.wall_clock_s,
        }

    def payload(self) -> str:
        """Canonical JSON with the wall-clock field dropped (determinism checks)."""
        doc = self.to_json()
        doc.pop("wall_clock_s")
        return json.dumps(doc, sort_keys=True)

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, sort_keys=True, indent=1)
            fh.write("\n")

    @staticmethod
    def from_json(doc: dict) -> "Report":
        return Report(
            command=doc["command"],
            config=doc.get("config", {}),
            records=tuple(CheckRecord.from_json(r) for r in doc.get("records", [])),
            extra=doc.get("extra", {}),
            wall_clock_s=doc.get("wall_clock_s", 0.0),
            version=doc.get("version", "?"),
        )

    @staticmethod
    def load(path) -> "Report":
        with open(path) as fh:
            return Report.from_json(json.load(fh))


def merge_reports(paths: list) -> Report:
    """Concatenate reports (stable input order); PASS iff every input passes."""
    if not paths:
        raise NoInput("no report files given")
    records = []
    inputs = []
    for p in paths:
        rep = Report.load(p)
        inputs.append(str(p))
        for rec in rep.records:
            records.append(CheckRecord(f"{rep.command}:{rec.name}", rec.status, rec.value, rec.tol))
    return Report("report", {"inputs": inputs}, tuple(records))
