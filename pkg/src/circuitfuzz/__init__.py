"""Metamorphic fuzzing of zero-knowledge circuit pipelines.

Random circuits are generated in a small intermediate language, rewritten
into equivalent circuits with a rule DSL, translated into target ZK
languages and run through a processing pipeline; any behavioural
difference between the two runs is a bug.
"""

from .backends import BACKENDS, Backend, TranslationUnit, encode_inputs, translate
from .campaign import (
    CONFIRMED_FIXED,
    BundleError,
    CampaignConfig,
    CampaignReport,
    SchedulerState,
    fuzz_iteration,
    replay,
    run_campaign,
    should_run_later_stages,
)
from .config import load_config
from .evaluator import (
    DEFAULT,
    FAULTS,
    AssertionViolated,
    EvalError,
    SemanticsVariant,
    Witness,
    evaluate,
    is_sat,
)
from .field import BN254, DivisionByZero, FieldConfig, field_by_name
from .generator import ConfigError, GeneratorConfig, generate_circuit, generate_inputs
from .il import Circuit, ParseError, ValidationError, parse_circuit, parse_expr, print_circuit, validate
from .oracle import BugReport, compare_runs, validity_checks
from .pipeline import (
    AdapterError,
    BuiltInAdapter,
    ExternalAdapter,
    PipelineRun,
    Stage,
    StageCommand,
    StageOutcome,
    Status,
    WitnessExtractor,
    run_pipeline,
    transform_settings,
)
from .rewrite import (
    NoApplicableRule,
    RewriteRule,
    RuleParseError,
    RuleSet,
    UnboundHoleError,
    apply_rule,
    match_pattern,
    parse_rule,
    transform_circuit,
    verify_rule_soundness,
)

__all__ = [
    "AdapterError",
    "AssertionViolated",
    "BACKENDS",
    "BN254",
    "Backend",
    "BugReport",
    "BuiltInAdapter",
    "BundleError",
    "CONFIRMED_FIXED",
    "CampaignConfig",
    "CampaignReport",
    "Circuit",
    "ConfigError",
    "DEFAULT",
    "DivisionByZero",
    "EvalError",
    "ExternalAdapter",
    "FAULTS",
    "FieldConfig",
    "GeneratorConfig",
    "NoApplicableRule",
    "ParseError",
    "PipelineRun",
    "RewriteRule",
    "RuleParseError",
    "RuleSet",
    "SchedulerState",
    "SemanticsVariant",
    "Stage",
    "StageCommand",
    "StageOutcome",
    "Status",
    "TranslationUnit",
    "UnboundHoleError",
    "ValidationError",
    "Witness",
    "WitnessExtractor",
    "apply_rule",
    "compare_runs",
    "encode_inputs",
    "evaluate",
    "field_by_name",
    "fuzz_iteration",
    "generate_circuit",
    "generate_inputs",
    "is_sat",
    "load_config",
    "match_pattern",
    "parse_circuit",
    "parse_expr",
    "parse_rule",
    "print_circuit",
    "replay",
    "run_campaign",
    "run_pipeline",
    "should_run_later_stages",
    "transform_circuit",
    "transform_settings",
    "translate",
    "validate",
    "validity_checks",
    "verify_rule_soundness",
]

__version__ = "0.1.0"
