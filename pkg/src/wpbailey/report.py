"""Outcome records shared by pair verification and the identity harness."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Optional

from .arith import MIN_SIGNIFICANT, NomeSeries, as_series, comparison_order
from .errors import InsufficientTruncation

PASS, FAIL, DEGENERATE = "pass", "fail", "degenerate"


@dataclass
class IdentityReport:
    identity: str
    point: str
    order: Optional[int]
    max_n: int
    status: str
    first_failure: Optional[dict] = None
    ms: float = 0.0
    checks: int = 0
    compared_mod: Optional[int] = None
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self, timing: bool = True) -> dict:
        d: dict[str, Any] = {
            "identity": self.identity,
            "point": self.point,
            "order": self.order,
            "max_n": self.max_n,
            "status": self.status,
        }
        if self.first_failure is not None:
            d["first_failure"] = self.first_failure
        d["checks"] = self.checks
        d["compared_mod"] = self.compared_mod
        if self.notes:
            d["notes"] = self.notes
        if timing:
            d["ms"] = round(self.ms, 1)
        return d

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), sort_keys=False, default=str)


def digest(obj) -> str:
    """Stable short digest of a JSON-able description of a point."""
    text = json.dumps(obj, sort_keys=True, default=str)
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def compare_sides(lhs, rhs):
    """Return ``(equal, compared_mod)``; raises if the comparison would be vacuous."""
    lhs, rhs = as_series(lhs), as_series(rhs)
    mod = comparison_order(lhs, rhs)
    if mod is not None:
        vals = [s.valuation for s in (lhs, rhs) if not s.is_zero()]
        floor = min(vals) if vals else 0
        if mod - floor < MIN_SIGNIFICANT:
            raise InsufficientTruncation(
                f"comparison modulo w^{mod} keeps only {mod - floor} significant orders"
            )
    return (lhs - rhs).is_zero(), mod


def failure_data(label, lhs: NomeSeries, rhs: NomeSeries, mod) -> dict:
    diff = as_series(lhs) - as_series(rhs)
    return {
        "check": str(label),
        "lhs": as_series(lhs).render(),
        "rhs": as_series(rhs).render(),
        "residual": diff.render(),
        "compared_mod": mod,
    }
