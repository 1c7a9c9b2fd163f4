"""Structured check records shared by the verification routines and the CLI."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List


@dataclass
class CheckRecord:
    """One verified identity: named terms, residual, tolerance, verdict."""

    check_id: str
    terms: Dict[str, float]
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)

    def to_json(self) -> str:
        payload = {
            "check": self.check_id,
            "terms": {k: float(v) for k, v in sorted(self.terms.items())},
            "residual": float(self.residual),
            "tolerance": float(self.tolerance),
            "pass": self.passed,
        }
        return json.dumps(payload, sort_keys=True)


@dataclass
class RunReport:
    """All records from one scenario run plus the overall verdict."""

    scenario_digest: str
    records: List[CheckRecord] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def add(self, record: CheckRecord) -> None:
        self.records.append(record)

    def lines(self) -> List[str]:
        ordered = sorted(self.records, key=lambda r: r.check_id)
        out = [r.to_json() for r in ordered]
        summary = {
            "check": "summary",
            "scenario": self.scenario_digest,
            "records": len(self.records),
            "pass": self.passed,
        }
        out.append(json.dumps(summary, sort_keys=True))
        return out
