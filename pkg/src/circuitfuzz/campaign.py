"""The fuzzing loop: generate, transform, translate, run, compare, report.

Every iteration draws from its own random stream, ``Random(f"{seed}:{i}")``,
so a single iteration can be reproduced from the campaign seed and its
index. With the built-in adapter on its virtual clock the whole campaign,
including its report and bug bundles, is a pure function of the config.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

from .backends import get_backend, translate
from .evaluator import SemanticsVariant, is_sat
from .generator import GeneratorConfig, generate_circuit, generate_inputs
from .il import ValidationError, operators, parse_circuit
from .oracle import BugReport, agreeing_crash, compare_runs, validity_checks
from .pipeline import (
    AdapterError,
    BuiltInAdapter,
    PipelineRun,
    Stage,
    Status,
    draw_settings,
    run_pipeline,
    transform_settings,
)
from .rewrite import Application, NoApplicableRule, RuleSet, log_to_json, transform_circuit


class BundleError(RuntimeError):
    """A bug bundle is missing or has unreadable artifacts."""


CONFIRMED_FIXED = "confirmed-fixed"


# --- scheduling ----------------------------------------------------------------


@dataclass
class SchedulerState:
    t1: float = 0.0
    t2: float = 0.0
    rho: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.rho <= 1.0:
            raise ValueError("rho must be in (0, 1]")
        if self.t1 < 0 or self.t2 < 0:
            raise ValueError("stage times must be non-negative")

    @property
    def ratio(self) -> float:
        total = self.t1 + self.t2
        return self.t2 / total if total else 0.0


def should_run_later_stages(s: SchedulerState) -> bool:
    """Run Prove/Verify only while later stages use less than ``rho`` of the time."""
    total = s.t1 + s.t2
    return total == 0 or s.t2 / total < s.rho


# --- configuration -------------------------------------------------------------


@dataclass(frozen=True)
class CampaignConfig:
    seed: int | str = 0
    time_limit: float | None = None
    max_iterations: int | None = None
    generator: GeneratorConfig = field(default_factory=GeneratorConfig)
    rules_path: str | None = None
    backend: str = "il"
    adapter: object = field(default_factory=BuiltInAdapter)
    rho: float = 0.5
    settings_metamorphosis: bool = True
    max_stack: int = 64
    output_dir: str | None = None
    stop_on_first_bug: bool = False
    stop_oracles: tuple[str, ...] = ("MT", "VC")

    def __post_init__(self):
        from .generator import ConfigError

        if self.time_limit is None and self.max_iterations is None:
            raise ConfigError("set time_limit, max_iterations or both")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ConfigError("time_limit must be positive")
        if self.max_iterations is not None and self.max_iterations < 0:
            raise ConfigError("max_iterations must be >= 0")
        if not 0.0 < self.rho <= 1.0:
            raise ConfigError("rho must be in (0, 1]")
        if self.max_stack < 1:
            raise ConfigError("max_stack must be >= 1")
        if self.rules_path is not None and not Path(self.rules_path).is_file():
            raise ConfigError(f"rules file {self.rules_path!r} does not exist")
        try:
            get_backend(self.backend)
        except KeyError as exc:
            raise ConfigError(str(exc)) from None

    def with_(self, **changes) -> "CampaignConfig":
        return replace(self, **changes)

    @property
    def virtual_clock(self) -> bool:
        return isinstance(self.adapter, BuiltInAdapter) and self.adapter.clock == "virtual"


@dataclass
class _Context:
    """Per-campaign data derived once from the config."""

    gen: GeneratorConfig
    rules: RuleSet

    @classmethod
    def build(cls, cfg: CampaignConfig) -> "_Context":
        from .generator import ConfigError

        ops = set(cfg.generator.allowed_ops) & set(get_backend(cfg.backend).supported_ops)
        adapter_ops = getattr(cfg.adapter, "allowed_ops", None)
        if adapter_ops is not None:
            ops &= set(adapter_ops)
        if not ops:
            raise ConfigError("no operator is supported by both the generator and the backend")
        gen = cfg.generator.with_(allowed_ops=frozenset(ops))
        rules = RuleSet.from_file(cfg.rules_path) if cfg.rules_path else RuleSet.default()
        # A rule may only introduce operators the target can express.
        usable = RuleSet(r for r in rules if operators(r.template) <= ops)
        if not len(usable):
            raise ConfigError("no rewrite rule fits the operator set")
        return cls(gen, usable)


# --- one iteration --------------------------------------------------------------


@dataclass
class IterationRecord:
    index: int
    seed: str
    c1: object = None
    c2: object = None
    inputs: dict = field(default_factory=dict)
    settings: tuple[dict, dict] = ({}, {})
    log: list[Application] = field(default_factory=list)
    sat: bool | None = None
    stage_cutoff: Stage = Stage.VERIFY
    runs: tuple[PipelineRun, PipelineRun] | None = None
    reports: list[BugReport] = field(default_factory=list)
    agreeing_crash: bool = False
    error: str | None = None

    @property
    def later_stages_ran(self) -> bool:
        if not self.runs:
            return False
        return any(o.stage.is_late and o.status is not Status.SKIPPED for r in self.runs for o in r.outcomes)

    @property
    def both_witnessed(self) -> bool:
        if not self.runs:
            return False
        return all((o := r.outcome(Stage.WITNESS)) is not None and o.status is Status.SUCCESS for r in self.runs)


def fuzz_iteration(
    cfg: CampaignConfig,
    state: SchedulerState,
    rng: random.Random,
    index: int = 0,
    ctx: _Context | None = None,
) -> tuple[IterationRecord, SchedulerState]:
    ctx = ctx or _Context.build(cfg)
    rec = IterationRecord(index, f"{cfg.seed}:{index}")
    fcfg = ctx.gen.field
    try:
        rec.c1 = generate_circuit(ctx.gen, rng)
        rec.c2, rec.log = transform_circuit(rec.c1, ctx.rules, cfg.max_stack, rng, fcfg.prime)
    except (NoApplicableRule, ValidationError, ValueError) as exc:
        rec.error = f"{type(exc).__name__}: {exc}"
        return rec, state
    s1 = draw_settings(cfg.adapter, rng)
    s2 = transform_settings(cfg.adapter, s1, rng) if cfg.settings_metamorphosis else dict(s1)
    rec.settings = (s1, s2)
    rec.inputs = generate_inputs(rec.c1, ctx.gen, rng)
    rec.sat = is_sat(rec.c1, rec.inputs, fcfg)
    rec.stage_cutoff = Stage.VERIFY if should_run_later_stages(state) else Stage.WITNESS

    r1 = run_pipeline(cfg.adapter, rec.c1, rec.inputs, s1, rec.stage_cutoff, "c1")
    r2 = run_pipeline(cfg.adapter, rec.c2, rec.inputs, s2, rec.stage_cutoff, "c2")
    rec.runs = (r1, r2)
    a1, b1 = r1.times()
    a2, b2 = r2.times()
    new_state = SchedulerState(state.t1 + a1 + a2, state.t2 + b1 + b2, state.rho)

    reports = compare_runs(r1, r2, rec.sat) + validity_checks(r1) + validity_checks(r2)
    rec.agreeing_crash = agreeing_crash(r1, r2)
    for rep in reports:
        rep.context = _context(cfg, rec)
    rec.reports = reports
    return rec, new_state


def _context(cfg: CampaignConfig, rec: IterationRecord) -> dict:
    return {
        "iteration": rec.index,
        "seed": rec.seed,
        "c1": str(rec.c1),
        "c2": str(rec.c2),
        "inputs": {k: str(v) for k, v in rec.inputs.items()},
        "settings": {"s1": rec.settings[0], "s2": rec.settings[1]},
        "transformation": log_to_json(rec.log),
        "stage_cutoff": rec.stage_cutoff.value,
        "sat": rec.sat,
        "runs": [r.to_json() for r in rec.runs],
    }


# --- bundles ------------------------------------------------------------------------


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_bundle(cfg: CampaignConfig, rec: IterationRecord, report: BugReport, directory: Path) -> Path:
    from .config import adapter_to_json

    directory.mkdir(parents=True, exist_ok=True)
    (directory / "report.json").write_text(_dump(report.to_json()))
    (directory / "c1.cir").write_text(str(rec.c1) + "\n")
    (directory / "c2.cir").write_text(str(rec.c2) + "\n")
    (directory / "inputs.json").write_text(_dump({k: str(v) for k, v in rec.inputs.items()}))
    (directory / "settings.json").write_text(_dump({"s1": rec.settings[0], "s2": rec.settings[1]}))
    (directory / "transformation.json").write_text(_dump(log_to_json(rec.log)))
    (directory / "runs.json").write_text(_dump([r.to_json() for r in rec.runs]))
    (directory / "adapter.json").write_text(_dump({
        "backend": cfg.backend,
        "field": str(cfg.generator.field.prime),
        "adapter": adapter_to_json(cfg.adapter),
    }))
    (directory / "seed.txt").write_text(rec.seed + "\n")
    for name, c in (("c1", rec.c1), ("c2", rec.c2)):
        try:
            tu = translate(c, cfg.backend, getattr(cfg.adapter, "translate_opts", {}), rec.inputs,
                           cfg.generator.field)
        except ValidationError:
            continue
        tu.write(directory / "translations" / name)
    return directory


_BUNDLE_FILES = ("report.json", "c1.cir", "c2.cir", "inputs.json", "settings.json", "adapter.json", "seed.txt")


def replay(bundle: str | Path, variant: SemanticsVariant | None = None, adapter=None):
    """Re-run both circuits of a bundle; the matching report, or ``CONFIRMED_FIXED``.

    ``variant`` swaps the semantics of a built-in adapter (e.g. the fixed
    default); ``adapter`` replaces the recorded adapter outright.
    """
    from .config import adapter_from_json
    from .field import field_by_name

    path = Path(bundle)
    if not path.is_dir():
        raise BundleError(f"{path} is not a bundle directory")
    missing = [f for f in _BUNDLE_FILES if not (path / f).is_file()]
    if missing:
        raise BundleError(f"bundle {path} lacks {', '.join(missing)}")
    try:
        recorded = BugReport.from_json(json.loads((path / "report.json").read_text()))
        c1 = parse_circuit((path / "c1.cir").read_text())
        c2 = parse_circuit((path / "c2.cir").read_text())
        inputs = {k: int(v) for k, v in json.loads((path / "inputs.json").read_text()).items()}
        settings = json.loads((path / "settings.json").read_text())
        meta = json.loads((path / "adapter.json").read_text())
        fcfg = field_by_name(meta["field"])
        if adapter is None:
            adapter = adapter_from_json(meta["adapter"], fcfg)
    except (ValueError, KeyError, TypeError) as exc:
        raise BundleError(f"bundle {path} is corrupt: {exc}") from None
    if variant is not None:
        if not isinstance(adapter, BuiltInAdapter):
            raise BundleError("a semantics variant only applies to the built-in adapter")
        adapter = replace(adapter, variant=variant)
    cutoff = Stage.parse(recorded.context.get("stage_cutoff", "Verify"))
    r1 = run_pipeline(adapter, c1, inputs, settings["s1"], cutoff, "c1")
    r2 = run_pipeline(adapter, c2, inputs, settings["s2"], cutoff, "c2")
    sat = is_sat(c1, inputs, fcfg)
    for rep in compare_runs(r1, r2, sat) + validity_checks(r1) + validity_checks(r2):
        if (rep.oracle, rep.stage) == (recorded.oracle, recorded.stage):
            rep.context = dict(recorded.context, runs=[r1.to_json(), r2.to_json()])
            return rep
    return CONFIRMED_FIXED


# --- the campaign -------------------------------------------------------------------


def _round(x: float) -> float:
    return round(x, 9)


@dataclass
class CampaignReport:
    seed: str
    circuits_generated: int = 0
    pairs_executed: int = 0
    sat_inputs: int = 0
    iteration_errors: int = 0
    agreeing_crashes: int = 0
    later_stage_iterations: int = 0
    sat_witness_iterations: int = 0
    sat_witness_later_stage_iterations: int = 0
    stage_times: dict = field(default_factory=lambda: {s.value: 0.0 for s in Stage})
    bugs: list = field(default_factory=list)
    elapsed: float = 0.0
    t1: float = 0.0
    t2: float = 0.0
    clock: str = "virtual"
    interrupted: bool = False

    @property
    def sat_fraction(self) -> float:
        return self.sat_inputs / self.pairs_executed if self.pairs_executed else 0.0

    @property
    def throughput(self) -> float:
        return self.pairs_executed / self.elapsed if self.elapsed else 0.0

    @property
    def final_ratio(self) -> float:
        total = self.t1 + self.t2
        return self.t2 / total if total else 0.0

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "clock": self.clock,
            "circuits_generated": self.circuits_generated,
            "pairs_executed": self.pairs_executed,
            "sat_inputs": self.sat_inputs,
            "sat_fraction": _round(self.sat_fraction),
            "throughput": _round(self.throughput),
            "elapsed": _round(self.elapsed),
            "iteration_errors": self.iteration_errors,
            "agreeing_crashes": self.agreeing_crashes,
            "later_stage_iterations": self.later_stage_iterations,
            "sat_witness_iterations": self.sat_witness_iterations,
            "sat_witness_later_stage_iterations": self.sat_witness_later_stage_iterations,
            "stage_times": {k: _round(v) for k, v in self.stage_times.items()},
            "t1": _round(self.t1),
            "t2": _round(self.t2),
            "final_ratio": _round(self.final_ratio),
            "bugs": self.bugs,
            "interrupted": self.interrupted,
        }

    def dumps(self) -> str:
        return _dump(self.to_json())


def run_campaign(cfg: CampaignConfig, progress=None) -> CampaignReport:
    """Loop :func:`fuzz_iteration` until a limit is hit, writing report and bundles.

    Ctrl-C stops the loop after the current iteration's bookkeeping and the
    report is still written. ``progress`` is called with each record.
    """
    ctx = _Context.build(cfg)
    out = Path(cfg.output_dir) if cfg.output_dir else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / "bugs.jsonl").write_text("")
    report = CampaignReport(str(cfg.seed), clock="virtual" if cfg.virtual_clock else "real")
    state = SchedulerState(rho=cfg.rho)
    start = time.perf_counter()
    index = 0
    try:
        while True:
            if cfg.max_iterations is not None and index >= cfg.max_iterations:
                break
            if cfg.time_limit is not None and report.elapsed >= cfg.time_limit:
                break
            rng = random.Random(f"{cfg.seed}:{index}")
            rec, state = fuzz_iteration(cfg, state, rng, index, ctx)
            report.elapsed = state.t1 + state.t2 if cfg.virtual_clock else time.perf_counter() - start
            _account(report, rec, state, out, cfg)
            if progress is not None:
                progress(rec)
            index += 1
            if cfg.stop_on_first_bug and any(r.oracle in cfg.stop_oracles for r in rec.reports):
                break
    except KeyboardInterrupt:
        report.interrupted = True
        if not cfg.virtual_clock:
            report.elapsed = time.perf_counter() - start
    if out is not None:
        (out / "report.json").write_text(report.dumps())
    return report


def _account(report: CampaignReport, rec: IterationRecord, state: SchedulerState, out: Path | None,
             cfg: CampaignConfig) -> None:
    report.circuits_generated += 1
    if rec.error is not None:
        report.iteration_errors += 1
        return
    report.pairs_executed += 1
    report.sat_inputs += bool(rec.sat)
    report.agreeing_crashes += rec.agreeing_crash
    later = rec.later_stages_ran
    report.later_stage_iterations += later
    if rec.both_witnessed:
        report.sat_witness_iterations += 1
        report.sat_witness_later_stage_iterations += later
    for r in rec.runs:
        for o in r.outcomes:
            report.stage_times[o.stage.value] += o.wall_time
    report.t1, report.t2 = state.t1, state.t2
    for k, rep in enumerate(rec.reports):
        entry = {
            "iteration": rec.index,
            "oracle": rep.oracle,
            "stage": rep.stage,
            "description": rep.description,
            "severity": rep.severity,
            "circuits_to_bug": rec.index + 1,
            "time_to_bug": _round(report.elapsed),
        }
        if out is not None:
            bundle = out / "bugs" / f"iter{rec.index:06d}-{k}"
            write_bundle(cfg, rec, rep, bundle)
            entry["bundle"] = str(bundle.relative_to(out))
            with open(out / "bugs.jsonl", "a", encoding="utf-8") as fh:
                fh.write(json.dumps(entry, sort_keys=True) + "\n")
        report.bugs.append(entry)


__all__ = [
    "AdapterError", "BundleError", "CONFIRMED_FIXED", "CampaignConfig", "CampaignReport", "IterationRecord",
    "SchedulerState", "fuzz_iteration", "replay", "run_campaign", "should_run_later_stages", "write_bundle",
]
