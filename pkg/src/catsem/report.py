"""Check results with machine-readable counterexamples."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

PASS = "pass"
FAIL = "fail"
ERROR = "error"


@dataclass
class Report:
    check: str
    status: str = PASS
    witnesses: list[dict[str, Any]] = field(default_factory=list)
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def __bool__(self) -> bool:
        return self.passed

    def fail(self, **witness) -> Report:
        self.status = FAIL
        self.witnesses.append(witness)
        return self

    def absorb(self, other: Report, **context) -> Report:
        """Merge a sub-check; its witnesses are tagged with ``context``."""
        if not other.passed:
            self.status = FAIL if other.status == FAIL else other.status
            for w in other.witnesses:
                self.witnesses.append({**context, "check": other.check, **w})
        return self

    def to_dict(self) -> dict[str, Any]:
        return {
            "check": self.check,
            "status": self.status,
            "witnesses": self.witnesses,
            "details": self.details,
        }

    def __str__(self) -> str:
        head = f"{self.check}: {self.status.upper()}"
        if self.passed:
            return head
        lines = [head]
        for w in self.witnesses[:5]:
            lines.append("  witness: " + json.dumps(w, sort_keys=True, ensure_ascii=False, default=str))
        if len(self.witnesses) > 5:
            lines.append(f"  ... {len(self.witnesses) - 5} more")
        return "\n".join(lines)
