"""Run traces: budget-indexed performance records plus per-epoch diagnostics.

A trace records the indicator ``fbest - f* - precision`` against the number of
function evaluations spent, with optional per-epoch diagnostics for the
adversarial optimizer.  Traces serialize to a single file: one JSON line
(header and termination reason) followed by a CSV body.  Serialization is
canonical, so ``parse -> serialize`` reproduces the file byte for byte and
identically-seeded runs can be compared as strings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import json

TERMINATION_REASONS = ("precision", "budget", "time")

_COLUMNS = "fes,indicator,capacity,best_fitness,w_exploit,w_explore"


@dataclass
class EpochDiagnostics:
    """Observables logged once per optimizer epoch."""

    fes: int
    capacity: int
    best_fitness: float
    w_exploit: float
    w_explore: float


@dataclass
class RunTrace:
    """One optimization run: header metadata, records, diagnostics, stop reason.

    ``records`` are ``(fes, indicator)`` pairs with strictly increasing fes and
    non-increasing indicator; the indicator between records is the step
    function holding the last recorded value.
    """

    header: dict
    records: list[tuple[int, float]]
    diagnostics: list[EpochDiagnostics] = field(default_factory=list)
    termination_reason: str = "budget"

    def final_fes(self) -> int:
        return self.records[-1][0] if self.records else 0

    def final_indicator(self) -> float:
        return self.records[-1][1] if self.records else float("inf")

    def first_fes_below(self, target: float) -> int | None:
        """Smallest recorded fes at which the indicator is strictly below target."""
        for fes, indicator in self.records:
            if indicator < target:
                return fes
        return None


def _check_reason(reason: str):
    if reason not in TERMINATION_REASONS:
        raise ValueError(f"unknown termination reason {reason!r}")


def trace_to_string(trace: RunTrace) -> str:
    """Canonical single-file form: JSON line, column line, CSV rows."""
    _check_reason(trace.termination_reason)
    head = json.dumps({"header": trace.header,
                       "termination_reason": trace.termination_reason},
                      sort_keys=True, separators=(",", ":"))
    diag_by_fes = {d.fes: d for d in trace.diagnostics}
    lines = [head, _COLUMNS]
    for fes, indicator in trace.records:
        d = diag_by_fes.get(fes)
        if d is None:
            lines.append(f"{fes},{indicator!r},,,,")
        else:
            lines.append(f"{fes},{indicator!r},{d.capacity},{d.best_fitness!r},"
                         f"{d.w_exploit!r},{d.w_explore!r}")
    return "\n".join(lines) + "\n"


def trace_from_string(text: str) -> RunTrace:
    lines = text.splitlines()
    if len(lines) < 2 or lines[1] != _COLUMNS:
        raise ValueError("not a trace file")
    head = json.loads(lines[0])
    records: list[tuple[int, float]] = []
    diagnostics: list[EpochDiagnostics] = []
    for line in lines[2:]:
        if not line:
            continue
        cells = line.split(",")
        fes = int(cells[0])
        records.append((fes, float(cells[1])))
        if cells[2]:
            diagnostics.append(EpochDiagnostics(
                fes, int(cells[2]), float(cells[3]), float(cells[4]),
                float(cells[5])))
    return RunTrace(head["header"], records, diagnostics,
                    head["termination_reason"])


def write_trace(trace: RunTrace, path) -> Path:
    path = Path(path)
    path.write_text(trace_to_string(trace))
    return path


def read_trace(path) -> RunTrace:
    return trace_from_string(Path(path).read_text())
