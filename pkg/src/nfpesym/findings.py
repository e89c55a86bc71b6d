"""Discrepancies between a published claim and what the machine derives.

A finding is data, never an exception to be swallowed: it names the claim
it contradicts and carries the machine-derived replacement.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any


@dataclass(frozen=True)
class Finding:
    ident: str
    anchor: str  # where the published claim lives, e.g. "optimal-system list, Case A"
    claim: str
    machine_result: str
    verified_by: str = ""
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


class OutsideOrbitsError(ValueError):
    """An algebra element equivalent to none of the listed representatives."""

    def __init__(self, finding: Finding):
        super().__init__(f"{finding.anchor}: {finding.machine_result}")
        self.finding = finding


def dump_findings(findings, path=None) -> str:
    doc = sorted((f.to_dict() for f in findings), key=lambda d: d["ident"])
    text = json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
