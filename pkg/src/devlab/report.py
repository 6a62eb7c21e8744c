"""Experiment report records shared by the deviation lab and the CLI."""
from __future__ import annotations

from dataclasses import dataclass, field

PASS = "PASS"
FAIL = "FAIL"
INFO = "INFO"

REPORT_COLUMNS = ("metric", "estimate", "stderr", "target", "tolerance", "verdict")


@dataclass
class ReportRow:
    metric: str
    estimate: float
    stderr: float | None = None
    target: float | None = None
    tolerance: float | None = None
    verdict: str = INFO

    def as_tuple(self):
        return tuple(getattr(self, c) for c in REPORT_COLUMNS)


@dataclass
class ExperimentReport:
    rows: list = field(default_factory=list)
    trials: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    wall_clock: float = 0.0
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.verdict != FAIL for r in self.rows)

    def add(self, metric, estimate, stderr=None, target=None, tolerance=None, verdict=INFO):
        row = ReportRow(metric, estimate, stderr, target, tolerance, verdict)
        self.rows.append(row)
        return row

    def check(self, metric, estimate, target, tolerance, stderr=None):
        """Add a row that passes when ``|estimate - target| < tolerance``."""
        ok = abs(estimate - target) < tolerance
        return self.add(metric, estimate, stderr, target, tolerance, PASS if ok else FAIL)

    def check_below(self, metric, estimate, bound, stderr=None):
        return self.add(metric, estimate, stderr, bound, None, PASS if estimate < bound else FAIL)
