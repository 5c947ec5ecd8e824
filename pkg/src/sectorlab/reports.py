"""Pass/fail reports emitted by the verification operations.

Every check returns a CheckReport instead of raising, so batch drivers can
collect failures and print witnesses. Reports serialize to deterministic JSON
(sorted keys, repr floats) to keep harness outputs byte-stable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass(frozen=True)
class CheckReport:
    name: str
    passed: bool
    max_defect: float
    tolerance: float
    witnesses: tuple = ()
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "pass": bool(self.passed),
            "max_defect": float(self.max_defect),
            "tolerance": float(self.tolerance),
            "witnesses": [str(w) for w in self.witnesses],
            "details": {k: self.details[k] for k in sorted(self.details)},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def combine(name: str, reports: list[CheckReport]) -> CheckReport:
    """Aggregate sub-reports; the defect is the worst relative exceedance."""
    worst = max((r.max_defect for r in reports), default=0.0)
    tol = min((r.tolerance for r in reports), default=0.0)
    bad = [r.name for r in reports if not r.passed]
    return CheckReport(
        name=name,
        passed=not bad,
        max_defect=worst,
        tolerance=tol,
        witnesses=tuple(bad),
        details={"n_checks": len(reports)},
    )
