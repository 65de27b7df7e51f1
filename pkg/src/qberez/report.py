"""Structured outcomes for verification checks."""

from __future__ import annotations

import time
from dataclasses import dataclass, field


PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"


@dataclass
class CheckReport:
    """Outcome of one verification: name, parameters, status, witness."""

    name: str
    params: dict = field(default_factory=dict)
    status: str = PASS
    reason: str | None = None
    witness: dict | None = None
    details: dict = field(default_factory=dict)
    duration_ms: float = 0.0

    @property
    def ok(self):
        return self.status != FAIL

    def as_dict(self):
        out = {
            "name": self.name,
            "params": self.params,
            "status": self.status,
            "duration_ms": round(self.duration_ms, 3),
        }
        if self.reason is not None:
            out["reason"] = self.reason
        if self.witness is not None:
            out["witness"] = self.witness
        if self.details:
            out["details"] = self.details
        return out

    def sort_key(self):
        return (self.name, sorted((k, str(v)) for k, v in self.params.items()))


class timed:
    """Context manager filling a report's duration."""

    def __init__(self, report):
        self.report = report

    def __enter__(self):
        self._t0 = time.perf_counter()
        return self.report

    def __exit__(self, exc_type, exc, tb):
        self.report.duration_ms = (time.perf_counter() - self._t0) * 1000.0
        return False


def failing(report, witness=None, reason=None):
    report.status = FAIL
    if witness is not None:
        report.witness = witness
    if reason is not None:
        report.reason = reason
    return report


def verdict(report, condition, witness_op=None):
    """Set pass/fail from a condition, pulling a witness from an operator."""
    if condition:
        return report
    w = witness_op.first_witness() if witness_op is not None else None
    return failing(report, witness=w)
