"""Stage-based execution of a circuit-processing pipeline.

Two adapters share one interface. :class:`BuiltInAdapter` runs the reference
evaluator (optionally with injected faults) and stands in a content digest for
proofs. :class:`ExternalAdapter` drives a real toolchain through per-stage
command templates, with timeouts, an address-space limit and declarative
witness extraction.

The built-in adapter reports modeled stage costs instead of measured ones by
default, so campaign reports are a pure function of configuration and seed.
"""

from __future__ import annotations

import enum
import hashlib
import json
import random
import re
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .backends import TranslationUnit, translate
from .evaluator import DEFAULT, AssertionViolated, EvalError, SemanticsVariant, Witness, evaluate
from .field import BN254, FieldConfig
from .il import Circuit, circuit_size, validate


class AdapterError(RuntimeError):
    """The adapter is misconfigured; distinct from a stage failing."""


class Stage(enum.Enum):
    CHECK = "Check"
    COMPILE = "Compile"
    WITNESS = "Witness"
    PROVE = "Prove"
    VERIFY = "Verify"

    @property
    def order(self) -> int:
        return _ORDER.index(self)

    @property
    def is_late(self) -> bool:
        return self in (Stage.PROVE, Stage.VERIFY)

    @classmethod
    def parse(cls, name: str | "Stage") -> "Stage":
        if isinstance(name, Stage):
            return name
        for s in cls:
            if s.value.lower() == str(name).lower():
                return s
        raise ValueError(f"unknown stage {name!r}")


_ORDER = [Stage.CHECK, Stage.COMPILE, Stage.WITNESS, Stage.PROVE, Stage.VERIFY]


class Status(str, enum.Enum):
    SUCCESS = "Success"
    FAILURE = "Failure"
    SKIPPED = "Skipped"


FAILURE_CLASSES = (
    "compile-error",
    "assertion-violation",
    "proof-error",
    "verify-reject",
    "crash",
    "timeout",
    "resource-limit",
)

# Failure classes that say more about the harness or the machine than about
# the circuit; reports involving them are flagged low severity.
LOW_SEVERITY_CLASSES = frozenset({"crash", "timeout", "resource-limit"})

PipelineSettings = dict  # flag name -> value


@dataclass(frozen=True)
class StageOutcome:
    stage: Stage
    status: Status
    failure_class: str | None = None
    witness: dict[str, int] | None = None
    wall_time: float = 0.0
    log: str = ""

    def __post_init__(self):
        if (self.failure_class is not None) != (self.status is Status.FAILURE):
            raise ValueError("failure_class is set exactly on failures")
        if self.witness is not None and not (self.stage is Stage.WITNESS and self.status is Status.SUCCESS):
            raise ValueError("witness only accompanies a successful Witness stage")
        if self.failure_class is not None and self.failure_class not in FAILURE_CLASSES:
            raise ValueError(f"unknown failure class {self.failure_class!r}")

    def to_json(self) -> dict:
        d = {"stage": self.stage.value, "status": self.status.value, "wall_time": self.wall_time}
        if self.failure_class:
            d["failure_class"] = self.failure_class
        if self.witness is not None:
            d["witness"] = {k: str(v) for k, v in self.witness.items()}
        if self.log:
            d["log"] = self.log
        return d

    @classmethod
    def from_json(cls, d: Mapping) -> "StageOutcome":
        w = d.get("witness")
        return cls(Stage.parse(d["stage"]), Status(d["status"]), d.get("failure_class"),
                   {k: int(v) for k, v in w.items()} if w is not None else None,
                   float(d.get("wall_time", 0.0)), d.get("log", ""))


@dataclass(frozen=True)
class PipelineRun:
    circuit_id: str
    settings: dict
    outcomes: tuple[StageOutcome, ...]

    def outcome(self, stage: Stage) -> StageOutcome | None:
        for o in self.outcomes:
            if o.stage is stage:
                return o
        return None

    @property
    def witness(self) -> dict[str, int] | None:
        o = self.outcome(Stage.WITNESS)
        return o.witness if o else None

    def times(self) -> tuple[float, float]:
        """(earlier-stage time, later-stage time)."""
        t1 = sum(o.wall_time for o in self.outcomes if not o.stage.is_late)
        t2 = sum(o.wall_time for o in self.outcomes if o.stage.is_late)
        return t1, t2

    def to_json(self) -> dict:
        return {"circuit": self.circuit_id, "settings": dict(self.settings),
                "outcomes": [o.to_json() for o in self.outcomes]}

    @classmethod
    def from_json(cls, d: Mapping) -> "PipelineRun":
        return cls(d["circuit"], dict(d.get("settings", {})),
                   tuple(StageOutcome.from_json(o) for o in d["outcomes"]))


# --- settings metamorphosis ---------------------------------------------------

# flag -> list of equivalence classes of values; values in one class must not
# change functional behaviour.
SETTINGS_EQUIVALENCES: dict[str, dict[str, list[list[str]]]] = {
    "builtin": {"mode": [["native", "expanded"]]},
    "circom": {"opt": [["--O2", "--O0"]]},
    "corset": {"flags": [["-N", "-Ne"]]},
    "gnark": {},
    "noir": {},
}


def draw_settings(adapter, rng: random.Random) -> dict:
    """A uniformly drawn point of the adapter's settings space."""
    return {flag: rng.choice(list(values)) for flag, values in sorted(adapter.settings_space.items())}


def transform_settings(adapter, s1: Mapping[str, str], rng: random.Random) -> dict:
    """Swap each flag value for another member of its equivalence class.

    Flags without a declared class, or whose class is a singleton, are kept,
    so the identity transformation is always the fallback.
    """
    s2 = dict(s1)
    for flag in sorted(s1):
        for cls in adapter.equivalences.get(flag, ()):
            if s1[flag] in cls:
                others = [v for v in cls if v != s1[flag]]
                if others:
                    s2[flag] = rng.choice(others)
                break
    return s2


# --- built-in adapter ---------------------------------------------------------

DEFAULT_COSTS = {Stage.COMPILE: 0.002, Stage.WITNESS: 0.001, Stage.PROVE: 0.05, Stage.VERIFY: 0.005}


@dataclass(frozen=True)
class BuiltInAdapter:
    """Reference pipeline: Compile = validate, Witness = evaluate, Prove/Verify = digest.

    ``costs`` are modeled seconds per stage, scaled by circuit size; with
    ``clock="real"`` measured wall time is reported instead.
    """

    variant: SemanticsVariant = DEFAULT
    field_config: FieldConfig = BN254
    costs: Mapping[Stage, float] = field(default_factory=lambda: dict(DEFAULT_COSTS))
    size_scaled: bool = True
    clock: str = "virtual"
    allowed_ops: frozenset[str] | None = None
    settings_space: Mapping[str, Sequence[str]] = field(
        default_factory=lambda: {"mode": ["native", "expanded"]})
    equivalences: Mapping[str, list[list[str]]] = field(
        default_factory=lambda: SETTINGS_EQUIVALENCES["builtin"])
    name: str = "builtin"

    def __post_init__(self):
        if self.clock not in ("virtual", "real"):
            raise AdapterError(f"clock must be 'virtual' or 'real', not {self.clock!r}")
        unknown = set(self.costs) - set(DEFAULT_COSTS)
        if unknown:
            raise AdapterError(f"no cost model for stages {sorted(s.value for s in unknown)}")

    @property
    def stages(self) -> tuple[Stage, ...]:
        return (Stage.COMPILE, Stage.WITNESS, Stage.PROVE, Stage.VERIFY)

    def cost(self, stage: Stage, c: Circuit) -> float:
        base = float(self.costs.get(stage, DEFAULT_COSTS[stage]))
        return base * (1 + circuit_size(c) / 64) if self.size_scaled else base

    def proof_digest(self, c: Circuit, witness: Mapping[str, int]) -> str:
        h = hashlib.sha256(str(c).encode())
        for k in sorted(witness):
            h.update(f"\n{k}={witness[k]}".encode())
        return h.hexdigest()

    def run(self, c: Circuit, inputs: Mapping[str, int], settings: Mapping[str, str],
            stage_cutoff: Stage, circuit_id: str = "c") -> PipelineRun:
        if not isinstance(c, Circuit):
            raise AdapterError("the built-in adapter runs IL circuits, not translation units")
        mode = settings.get("mode", "native")
        outcomes: list[StageOutcome] = []
        halted = False
        witness: dict[str, int] | None = None
        proof: str | None = None
        for stage in self.stages:
            if halted or stage.order > stage_cutoff.order:
                outcomes.append(StageOutcome(stage, Status.SKIPPED))
                continue
            start = time.perf_counter()
            status, fclass, wit, log = Status.SUCCESS, None, None, ""
            if stage is Stage.COMPILE:
                errors = validate(c, self.allowed_ops)
                if errors:
                    status, fclass, log = Status.FAILURE, "compile-error", str(errors[0])
            elif stage is Stage.WITNESS:
                try:
                    r = evaluate(c, inputs, self.field_config, self.variant, mode)
                except KeyError as exc:
                    raise AdapterError(str(exc)) from None
                if isinstance(r, Witness):
                    witness = wit = dict(r.values)
                elif isinstance(r, AssertionViolated):
                    status, fclass, log = Status.FAILURE, "assertion-violation", f"assertion {r.index} violated"
                elif isinstance(r, EvalError):
                    status, fclass, log = Status.FAILURE, "crash", f"{r.error_class} in statement {r.statement}"
            elif stage is Stage.PROVE:
                cap = self.variant.prover_capacity
                if cap is not None and circuit_size(c) > cap:
                    status, fclass, log = Status.FAILURE, "proof-error", f"circuit exceeds prover capacity {cap}"
                else:
                    proof = self.proof_digest(c, witness or {})
                    log = proof
            elif stage is Stage.VERIFY:
                if proof != self.proof_digest(c, witness or {}):
                    status, fclass = Status.FAILURE, "verify-reject"
            elapsed = time.perf_counter() - start if self.clock == "real" else self.cost(stage, c)
            outcomes.append(StageOutcome(stage, status, fclass, wit, elapsed, log))
            halted = status is Status.FAILURE
        return PipelineRun(circuit_id, dict(settings), tuple(outcomes))


# --- external adapter ---------------------------------------------------------


@dataclass(frozen=True)
class StageCommand:
    """One process covering one or more stages (noir merges Compile and Witness).

    ``failure_patterns`` maps a failure class to a regex over the combined
    output; the first match wins, otherwise the stage's default class is used.
    ``stage_patterns`` attributes a merged-command failure to a stage.
    """

    stages: tuple[Stage, ...]
    argv: tuple[str, ...]
    success_exit_codes: tuple[int, ...] = (0,)
    success_pattern: str | None = None
    failure_patterns: Mapping[str, str] = field(default_factory=dict)
    stage_patterns: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.stages:
            raise AdapterError("a stage command must cover at least one stage")
        if not self.argv:
            raise AdapterError(f"empty command for stages {[s.value for s in self.stages]}")
        for cls in self.failure_patterns:
            if cls not in FAILURE_CLASSES:
                raise AdapterError(f"unknown failure class {cls!r}")


@dataclass(frozen=True)
class WitnessExtractor:
    """``regex``: named groups ``name`` and ``value`` over stdout.
    ``json``: a file (relative to the workdir) holding ``{name: value}``.
    """

    kind: str = "regex"
    pattern: str = r"(?P<name>out\d+)\s*[=:]\s*(?P<value>\d+)"
    path: str = "witness.json"

    def __post_init__(self):
        if self.kind not in ("regex", "json"):
            raise AdapterError(f"unknown witness extractor {self.kind!r}")
        if self.kind == "regex":
            try:
                groups = re.compile(self.pattern).groupindex
            except re.error as exc:
                raise AdapterError(f"bad witness pattern: {exc}") from None
            if not {"name", "value"} <= set(groups):
                raise AdapterError("witness pattern needs named groups 'name' and 'value'")

    def extract(self, output: str, workdir: Path, outputs: Sequence[str]) -> dict[str, int]:
        found: dict[str, int] = {}
        if self.kind == "regex":
            for m in re.finditer(self.pattern, output):
                found[m.group("name")] = int(m.group("value"))
        else:
            target = workdir / self.path
            if target.exists():
                data = json.loads(target.read_text())
                found = {k: int(v) for k, v in data.items()}
        return {k: found[k] for k in outputs if k in found}


_DEFAULT_FAILURE = {
    Stage.CHECK: "assertion-violation",
    Stage.COMPILE: "compile-error",
    Stage.WITNESS: "assertion-violation",
    Stage.PROVE: "proof-error",
    Stage.VERIFY: "verify-reject",
}

_RESOURCE_HINTS = re.compile(r"MemoryError|out of memory|bad_alloc|Cannot allocate memory", re.I)


def _limit_memory(mb: int):
    def apply():
        import resource

        limit = mb * 1024 * 1024
        resource.setrlimit(resource.RLIMIT_AS, (limit, limit))

    return apply


@dataclass(frozen=True)
class ExternalAdapter:
    name: str
    backend: str
    commands: tuple[StageCommand, ...]
    witness: WitnessExtractor = field(default_factory=WitnessExtractor)
    timeout_secs: float = 60.0
    memory_limit_mb: int | None = None
    scratch_root: str | None = None
    settings_space: Mapping[str, Sequence[str]] = field(default_factory=dict)
    equivalences: Mapping[str, list[list[str]]] = field(default_factory=dict)
    translate_opts: Mapping[str, str] = field(default_factory=dict)
    field_config: FieldConfig = BN254
    keep_workdirs: bool = False

    def __post_init__(self):
        seen: list[Stage] = []
        for cmd in self.commands:
            for s in cmd.stages:
                if s in seen:
                    raise AdapterError(f"stage {s.value} has two commands")
                seen.append(s)
        if seen != sorted(seen, key=lambda s: s.order):
            raise AdapterError("stage commands must follow pipeline order")
        if self.timeout_secs <= 0:
            raise AdapterError("timeout_secs must be positive")

    @property
    def stages(self) -> tuple[Stage, ...]:
        return tuple(s for cmd in self.commands for s in cmd.stages)

    def _argv(self, cmd: StageCommand, subs: Mapping[str, str]) -> list[str]:
        argv = []
        for part in cmd.argv:
            if part == "{flags}":
                argv.extend(shlex.split(subs["flags"]))
                continue
            try:
                argv.append(part.format(**subs))
            except (KeyError, IndexError) as exc:
                raise AdapterError(f"unknown placeholder in {part!r}: {exc}") from None
        return argv

    def _classify(self, cmd: StageCommand, stage: Stage, output: str, code: int) -> str:
        for cls, pattern in cmd.failure_patterns.items():
            if re.search(pattern, output):
                return cls
        if self.memory_limit_mb is not None and (_RESOURCE_HINTS.search(output) or code in (-9, -11)):
            return "resource-limit"
        if code < 0:
            return "crash"
        return _DEFAULT_FAILURE[stage]

    def run(self, tu: TranslationUnit | Circuit, inputs: Mapping[str, int], settings: Mapping[str, str],
            stage_cutoff: Stage, circuit_id: str = "c", outputs: Sequence[str] | None = None) -> PipelineRun:
        if isinstance(tu, Circuit):
            outputs = list(tu.outputs) if outputs is None else outputs
            tu = translate(tu, self.backend, self.translate_opts, inputs, self.field_config)
        if outputs is None:
            raise AdapterError("output names are needed to extract a witness")
        root = self.scratch_root
        if root is not None:
            Path(root).mkdir(parents=True, exist_ok=True)
        workdir = Path(tempfile.mkdtemp(prefix=f"{circuit_id}-", dir=root))
        try:
            return self._run_in(workdir, tu, settings, stage_cutoff, circuit_id, outputs)
        finally:
            if not self.keep_workdirs:
                import shutil

                shutil.rmtree(workdir, ignore_errors=True)

    def _run_in(self, workdir: Path, tu: TranslationUnit, settings, stage_cutoff, circuit_id, outputs):
        tu.write(workdir)
        input_file = next((rel for rel, _ in tu.files), "")
        flags = " ".join(str(settings[k]) for k in sorted(settings))
        subs = {"circuit": str(workdir / tu.main_file), "inputs": str(workdir / input_file) if input_file else "",
                "workdir": str(workdir), "flags": flags}
        outcomes: list[StageOutcome] = []
        halted = False
        for cmd in self.commands:
            live = [s for s in cmd.stages if not halted and s.order <= stage_cutoff.order]
            if not live:
                outcomes.extend(StageOutcome(s, Status.SKIPPED) for s in cmd.stages)
                continue
            argv = self._argv(cmd, subs)
            start = time.perf_counter()
            try:
                proc = subprocess.run(
                    argv, cwd=workdir, capture_output=True, text=True, timeout=self.timeout_secs,
                    preexec_fn=_limit_memory(self.memory_limit_mb) if self.memory_limit_mb else None,
                )
                code, output = proc.returncode, proc.stdout + proc.stderr
                timed_out = False
            except subprocess.TimeoutExpired as exc:
                code, timed_out = None, True
                output = _text(exc.stdout) + _text(exc.stderr)
            except OSError as exc:
                raise AdapterError(f"cannot run {argv[0]!r}: {exc}") from None
            elapsed = time.perf_counter() - start
            share = elapsed / len(live)
            ok = (not timed_out and code in cmd.success_exit_codes
                  and (cmd.success_pattern is None or re.search(cmd.success_pattern, output) is not None))
            excerpt = output[-2000:]
            failed_stage = None
            if not ok:
                failed_stage = live[0]
                for s in live:
                    pat = cmd.stage_patterns.get(s.value)
                    if pat and re.search(pat, output):
                        failed_stage = s
                        break
            for s in cmd.stages:
                if s not in live or halted:
                    outcomes.append(StageOutcome(s, Status.SKIPPED))
                    continue
                if s is failed_stage:
                    fclass = "timeout" if timed_out else self._classify(cmd, s, output, code)
                    outcomes.append(StageOutcome(s, Status.FAILURE, fclass, None, share, excerpt))
                    halted = True
                    continue
                wit = None
                if s is Stage.WITNESS:
                    wit = self.witness.extract(output, workdir, outputs)
                outcomes.append(StageOutcome(s, Status.SUCCESS, None, wit, share, excerpt))
        return PipelineRun(circuit_id, dict(settings), tuple(outcomes))


def _text(data) -> str:
    if data is None:
        return ""
    return data.decode(errors="replace") if isinstance(data, bytes) else data


def run_pipeline(adapter, subject: Circuit | TranslationUnit, inputs: Mapping[str, int],
                 settings: Mapping[str, str] | None = None, stage_cutoff: Stage = Stage.VERIFY,
                 circuit_id: str = "c") -> PipelineRun:
    return adapter.run(subject, inputs, dict(settings or {}), Stage.parse(stage_cutoff), circuit_id)


__all__ = [
    "AdapterError", "BuiltInAdapter", "ExternalAdapter", "FAILURE_CLASSES", "PipelineRun",
    "PipelineSettings", "SETTINGS_EQUIVALENCES", "Stage", "StageCommand", "StageOutcome", "Status",
    "WitnessExtractor", "draw_settings", "run_pipeline", "transform_settings",
]
