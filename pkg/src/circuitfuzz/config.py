"""Campaign configuration files (JSON).

A minimal config::

    {"seed": 7, "max_iterations": 1000, "backend": "il",
     "adapter": {"kind": "builtin", "fault": "raw-constants"}}

Unknown keys are rejected so typos do not silently fall back to defaults.
Relative paths resolve against the config file's directory, including
external stage command arguments written as ``./x`` or ``../x``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Mapping

from .campaign import CampaignConfig
from .evaluator import FAULTS, SemanticsVariant
from .field import BN254, FieldConfig, field_by_name
from .generator import ConfigError, GeneratorConfig
from .il import ALL_OPS
from .pipeline import (
    SETTINGS_EQUIVALENCES,
    AdapterError,
    BuiltInAdapter,
    ExternalAdapter,
    Stage,
    StageCommand,
    WitnessExtractor,
)

_TOP_KEYS = {
    "seed", "time_limit", "max_iterations", "field", "generator", "rules", "backend", "adapter",
    "rho", "settings_metamorphosis", "max_stack", "output_dir", "stop_on_first_bug",
    "stop_oracles",
}
_GEN_KEYS = {
    "max_inputs", "max_outputs", "max_assertions", "max_expr_depth", "allowed_ops", "weights",
    "boundary_constants", "boundary_probability",
}


def _check_keys(data: Mapping, allowed: set[str], where: str) -> None:
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown {where} keys: {sorted(unknown)}")


def generator_from_json(data: Mapping | None, fcfg: FieldConfig = BN254) -> GeneratorConfig:
    data = dict(data or {})
    _check_keys(data, _GEN_KEYS, "generator")
    kwargs = {k: data[k] for k in ("max_inputs", "max_outputs", "max_assertions", "max_expr_depth",
                                   "boundary_probability") if k in data}
    if "allowed_ops" in data:
        ops = frozenset(data["allowed_ops"])
        if not ops <= ALL_OPS:
            raise ConfigError(f"unknown operators: {sorted(ops - ALL_OPS)}")
        kwargs["allowed_ops"] = ops
    if "weights" in data:
        kwargs["rule_weights"] = dict(data["weights"])
    if "boundary_constants" in data:
        kwargs["boundary_constants"] = tuple(data["boundary_constants"])
    return GeneratorConfig(field=fcfg, **kwargs)


def generator_to_json(g: GeneratorConfig) -> dict:
    return {
        "max_inputs": g.max_inputs, "max_outputs": g.max_outputs, "max_assertions": g.max_assertions,
        "max_expr_depth": g.max_expr_depth, "allowed_ops": sorted(g.allowed_ops),
        "weights": dict(sorted(g.rule_weights.items())), "boundary_constants": list(g.boundary_constants),
        "boundary_probability": g.boundary_probability,
    }


def _variant(data: Mapping) -> SemanticsVariant:
    if "fault" in data and "variant" in data:
        raise ConfigError("give either 'fault' or 'variant', not both")
    if "fault" in data:
        try:
            return FAULTS[data["fault"]]
        except KeyError:
            raise ConfigError(f"unknown fault {data['fault']!r}; choose from {sorted(FAULTS)}") from None
    try:
        return SemanticsVariant.from_json(data.get("variant"))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def _resolve_arg(arg: str, base_dir: Path | None) -> str:
    if base_dir is not None and (arg.startswith("./") or arg.startswith("../")):
        return str((base_dir / arg).resolve())
    return arg


def adapter_from_json(data: Mapping | None, fcfg: FieldConfig = BN254, base_dir: Path | None = None,
                      backend: str = "il"):
    data = dict(data or {"kind": "builtin"})
    kind = data.pop("kind", "builtin")
    try:
        if kind == "builtin":
            _check_keys(data, {"fault", "variant", "costs", "size_scaled", "clock", "settings_space",
                               "equivalences"}, "builtin adapter")
            kwargs = {}
            if "costs" in data:
                kwargs["costs"] = {Stage.parse(k): float(v) for k, v in data["costs"].items()}
            for k in ("size_scaled", "clock", "settings_space", "equivalences"):
                if k in data:
                    kwargs[k] = data[k]
            return BuiltInAdapter(variant=_variant(data), field_config=fcfg, **kwargs)
        if kind == "external":
            _check_keys(data, {"name", "backend", "stages", "witness", "timeout_secs", "memory_limit_mb",
                               "scratch_root", "settings_space", "equivalences", "translate_opts"},
                        "external adapter")
            commands = []
            for spec in data.get("stages", []):
                _check_keys(spec, {"stages", "command", "success_exit_codes", "success_pattern",
                                   "failure_patterns", "stage_patterns"}, "stage command")
                commands.append(StageCommand(
                    tuple(Stage.parse(s) for s in spec["stages"]),
                    tuple(_resolve_arg(a, base_dir) for a in spec["command"]),
                    tuple(spec.get("success_exit_codes", (0,))),
                    spec.get("success_pattern"),
                    dict(spec.get("failure_patterns", {})),
                    dict(spec.get("stage_patterns", {})),
                ))
            if not commands:
                raise ConfigError("an external adapter needs at least one stage command")
            name = data.get("name", data.get("backend", backend))
            scratch = data.get("scratch_root")
            if scratch is not None and base_dir is not None:
                scratch = str((base_dir / scratch).resolve())
            return ExternalAdapter(
                name=name,
                backend=data.get("backend", backend),
                commands=tuple(commands),
                witness=WitnessExtractor(**data.get("witness", {})),
                timeout_secs=float(data.get("timeout_secs", 60.0)),
                memory_limit_mb=data.get("memory_limit_mb"),
                scratch_root=scratch,
                settings_space=data.get("settings_space", {}),
                equivalences=data.get("equivalences", SETTINGS_EQUIVALENCES.get(name, {})),
                translate_opts=data.get("translate_opts", {}),
                field_config=fcfg,
            )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, (ConfigError, AdapterError)):
            raise
        raise ConfigError(f"bad adapter definition: {exc}") from None
    raise ConfigError(f"unknown adapter kind {kind!r}")


def adapter_to_json(a) -> dict:
    if isinstance(a, BuiltInAdapter):
        return {
            "kind": "builtin",
            "variant": a.variant.to_json(),
            "costs": {s.value: c for s, c in sorted(a.costs.items(), key=lambda kv: kv[0].order)},
            "size_scaled": a.size_scaled,
            "clock": a.clock,
            "settings_space": {k: list(v) for k, v in sorted(a.settings_space.items())},
            "equivalences": {k: [list(c) for c in v] for k, v in sorted(a.equivalences.items())},
        }
    if isinstance(a, ExternalAdapter):
        return {
            "kind": "external",
            "name": a.name,
            "backend": a.backend,
            "stages": [{
                "stages": [s.value for s in cmd.stages],
                "command": list(cmd.argv),
                "success_exit_codes": list(cmd.success_exit_codes),
                "success_pattern": cmd.success_pattern,
                "failure_patterns": dict(cmd.failure_patterns),
                "stage_patterns": dict(cmd.stage_patterns),
            } for cmd in a.commands],
            "witness": {"kind": a.witness.kind, "pattern": a.witness.pattern, "path": a.witness.path},
            "timeout_secs": a.timeout_secs,
            "memory_limit_mb": a.memory_limit_mb,
            "scratch_root": a.scratch_root,
            "settings_space": {k: list(v) for k, v in a.settings_space.items()},
            "equivalences": {k: [list(c) for c in v] for k, v in a.equivalences.items()},
            "translate_opts": dict(a.translate_opts),
        }
    raise TypeError(f"cannot serialize adapter {a!r}")


def config_from_json(data: Mapping, base_dir: str | Path | None = None) -> CampaignConfig:
    if not isinstance(data, Mapping):
        raise ConfigError("a config file holds one JSON object")
    _check_keys(data, _TOP_KEYS, "config")
    base = Path(base_dir) if base_dir is not None else Path.cwd()
    try:
        fcfg = field_by_name(data.get("field", "bn254"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    backend = data.get("backend", "il")
    rules = data.get("rules")
    if rules is not None:
        rules = str(base / rules)
    out = data.get("output_dir")
    if out is not None:
        out = str(base / out)
    return CampaignConfig(
        seed=data.get("seed", 0),
        time_limit=data.get("time_limit"),
        max_iterations=data.get("max_iterations"),
        generator=generator_from_json(data.get("generator"), fcfg),
        rules_path=rules,
        backend=backend,
        adapter=adapter_from_json(data.get("adapter"), fcfg, base, backend),
        rho=float(data.get("rho", 0.5)),
        settings_metamorphosis=bool(data.get("settings_metamorphosis", True)),
        max_stack=int(data.get("max_stack", 64)),
        output_dir=out,
        stop_on_first_bug=bool(data.get("stop_on_first_bug", False)),
        stop_oracles=tuple(data.get("stop_oracles", ("MT", "VC"))),
    )


def load_config(path: str | Path) -> CampaignConfig:
    p = Path(path)
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file {p} does not exist") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{p}: {exc}") from None
    return config_from_json(data, p.parent)
