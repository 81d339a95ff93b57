"""Bug detection: the metamorphic oracle and per-run validity checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .pipeline import LOW_SEVERITY_CLASSES, PipelineRun, Stage, StageOutcome, Status

MT = "MT"
VC = "VC"


@dataclass
class BugReport:
    """One detected divergence.

    ``context`` carries everything needed to reproduce it (printed circuits,
    inputs, settings, transformation log, runs, seed); the campaign fills it.
    """

    oracle: str
    stage: str
    description: str
    severity: str = "high"
    context: dict = field(default_factory=dict)

    @property
    def signature(self) -> tuple[str, str, str]:
        return self.oracle, self.stage, self.description

    def to_json(self) -> dict:
        return {"oracle": self.oracle, "stage": self.stage, "description": self.description,
                "severity": self.severity, "context": self.context}

    @classmethod
    def from_json(cls, d: Mapping) -> "BugReport":
        return cls(d["oracle"], d["stage"], d["description"], d.get("severity", "high"), dict(d.get("context", {})))


def _describe(o: StageOutcome) -> str:
    return o.status.value if o.failure_class is None else f"{o.status.value}({o.failure_class})"


def _severity(*outcomes: StageOutcome) -> str:
    return "low" if any(o.failure_class in LOW_SEVERITY_CLASSES for o in outcomes) else "high"


def compare_runs(r1: PipelineRun, r2: PipelineRun, sat_known: bool | None = None) -> list[BugReport]:
    """Metamorphic oracle over two runs of equivalent circuits on the same inputs.

    Stages skipped in either run are not compared. Witness values are
    compared only on declared outputs and only unless the inputs are known
    to be UNSAT.
    """
    reports = []
    for stage in Stage:
        o1, o2 = r1.outcome(stage), r2.outcome(stage)
        if o1 is None or o2 is None or Status.SKIPPED in (o1.status, o2.status):
            continue
        if o1.status is not o2.status:
            reports.append(BugReport(MT, stage.value, f"{_describe(o1)} vs {_describe(o2)}", _severity(o1, o2)))
        elif o1.status is Status.FAILURE and o1.failure_class != o2.failure_class:
            reports.append(BugReport(MT, stage.value, f"{_describe(o1)} vs {_describe(o2)}", _severity(o1, o2)))
        elif stage is Stage.WITNESS and o1.status is Status.SUCCESS and sat_known is not False:
            w1, w2 = o1.witness or {}, o2.witness or {}
            differing = sorted(k for k in set(w1) | set(w2) if w1.get(k) != w2.get(k))
            if differing:
                reports.append(BugReport(MT, stage.value, "witness differs on " + ", ".join(differing)))
    return reports


def validity_checks(r: PipelineRun) -> list[BugReport]:
    """A valid witness must be provable, and a proof must verify."""
    reports = []
    w, p, v = r.outcome(Stage.WITNESS), r.outcome(Stage.PROVE), r.outcome(Stage.VERIFY)
    if w and p and w.status is Status.SUCCESS and p.status is Status.FAILURE:
        reports.append(BugReport(VC, Stage.PROVE.value, f"{r.circuit_id}: witness generated but proving failed "
                                 f"({p.failure_class})", _severity(p)))
    if p and v and p.status is Status.SUCCESS and v.status is Status.FAILURE:
        reports.append(BugReport(VC, Stage.VERIFY.value, f"{r.circuit_id}: proof generated but verification "
                                 f"failed ({v.failure_class})", _severity(v)))
    return reports


def agreeing_crash(r1: PipelineRun, r2: PipelineRun) -> bool:
    """Both runs fail at the same stage with the same low-severity class (counted, not reported)."""
    for stage in Stage:
        o1, o2 = r1.outcome(stage), r2.outcome(stage)
        if o1 and o2 and o1.status is Status.FAILURE and o2.status is Status.FAILURE:
            return o1.failure_class == o2.failure_class and o1.failure_class in LOW_SEVERITY_CLASSES
    return False
