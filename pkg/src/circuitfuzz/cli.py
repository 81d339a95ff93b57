"""Command-line interface.

Exit codes: 0 no bugs (or success), 1 bugs found / divergence reproduced /
unsound rules, 2 configuration, adapter or input errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from .backends import BACKENDS, translate
from .campaign import CONFIRMED_FIXED, BundleError, replay, run_campaign
from .config import generator_from_json, load_config
from .evaluator import DEFAULT, FAULTS, SemanticsVariant, evaluate
from .field import FieldConfig, field_by_name
from .generator import ConfigError, generate_circuit, generate_inputs
from .il import ParseError, ValidationError, parse_circuit
from .pipeline import AdapterError
from .rewrite import NoApplicableRule, RuleParseError, RuleSet, log_to_json, transform_circuit, verify_rule_soundness

EXIT_OK, EXIT_BUGS, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


def _field(text: str) -> FieldConfig:
    try:
        return field_by_name(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _read_circuit(path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    return parse_circuit(text)


def _rules(path: str | None) -> RuleSet:
    return RuleSet.from_file(path) if path else RuleSet.default()


def _parse_assignments(pairs: list[str]) -> dict[str, int]:
    values = {}
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep or not name:
            raise UsageError(f"expected name=decimal, got {pair!r}")
        try:
            values[name.strip()] = int(value.strip())
        except ValueError:
            raise UsageError(f"not a decimal integer: {value!r}") from None
    return values


def _variant(args) -> SemanticsVariant:
    if getattr(args, "fault", None):
        if args.fault not in FAULTS:
            raise UsageError(f"unknown fault {args.fault!r}; choose from {sorted(FAULTS)}")
        return FAULTS[args.fault]
    if getattr(args, "variant", None):
        try:
            return SemanticsVariant.from_json(json.loads(args.variant))
        except (ValueError, TypeError) as exc:
            raise UsageError(f"bad --variant: {exc}") from None
    return DEFAULT


# --- subcommands -------------------------------------------------------------------


def cmd_fuzz(args) -> int:
    cfg = load_config(args.config)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.time_limit is not None:
        changes["time_limit"] = args.time_limit
    if args.iterations is not None:
        changes["max_iterations"] = args.iterations
    if args.out is not None:
        changes["output_dir"] = args.out
    if changes:
        cfg = cfg.with_(**changes)

    def progress(rec):
        for rep in rec.reports:
            print(f"[{rec.index}] {rep.oracle} at {rep.stage}: {rep.description}", file=sys.stderr)

    report = run_campaign(cfg, progress=progress if args.verbose else None)
    print(report.dumps(), end="")
    return EXIT_BUGS if report.bugs else EXIT_OK


def cmd_generate(args) -> int:
    fcfg = _field(args.field)
    gen = generator_from_json(json.loads(Path(args.generator).read_text()) if args.generator else None, fcfg)
    rng = random.Random(args.seed)
    for i in range(args.count):
        c = generate_circuit(gen, rng)
        if args.count > 1:
            print(f"# circuit {i}")
        print(c)
        if args.inputs:
            print("# inputs: " + " ".join(f"{k}={v}" for k, v in generate_inputs(c, gen, rng).items()))
    return EXIT_OK


def cmd_transform(args) -> int:
    c = _read_circuit(args.circuit)
    fcfg = _field(args.field)
    rng = random.Random(args.seed)
    c2, log = transform_circuit(c, _rules(args.rules), args.max_stack, rng, fcfg.prime)
    print(c2)
    if args.log:
        Path(args.log).write_text(json.dumps(log_to_json(log), sort_keys=True, indent=2) + "\n")
    return EXIT_OK


def cmd_translate(args) -> int:
    c = _read_circuit(args.circuit)
    inputs = _parse_assignments(args.inputs) if args.inputs else None
    opts = dict(o.split("=", 1) for o in args.opt or [])
    tu = translate(c, args.backend, opts, inputs, _field(args.field))
    if args.out:
        for path in tu.write(args.out):
            print(path)
    else:
        print(tu.source, end="")
    return EXIT_OK


def cmd_eval(args) -> int:
    c = _read_circuit(args.circuit)
    inputs = _parse_assignments(args.inputs)
    try:
        result = evaluate(c, inputs, _field(args.field), _variant(args), args.mode)
    except KeyError as exc:
        raise UsageError(str(exc)) from None
    print(json.dumps(result.to_json(), sort_keys=True))
    return EXIT_OK


def cmd_check_rules(args) -> int:
    from .generator import GeneratorConfig

    rules = _rules(args.rules)
    big = GeneratorConfig(field=_field(args.field))
    small = GeneratorConfig(field=FieldConfig(args.small_prime)) if args.small_prime else None
    unsound = 0
    for rule in rules:
        if args.only and rule.id not in args.only:
            continue
        reports = [verify_rule_soundness(rule, big, args.trials, seed=args.seed)]
        if small is not None:
            reports.append(verify_rule_soundness(rule, small, args.small_trials, seed=args.seed, exhaustive=True))
        bad = [ce for r in reports for ce in r.counterexamples]
        status = "ok" if not bad else "UNSOUND"
        print(f"{status:8s} {rule.id}")
        if bad:
            unsound += 1
            print(json.dumps(bad[0], sort_keys=True, indent=2))
    print(f"{len(rules)} rules, {unsound} unsound")
    return EXIT_BUGS if unsound else EXIT_OK


def cmd_replay(args) -> int:
    variant = None
    if args.fault or args.variant or args.fixed:
        variant = DEFAULT if args.fixed else _variant(args)
    outcome = replay(args.bundle, variant)
    if outcome == CONFIRMED_FIXED:
        print(CONFIRMED_FIXED)
        return EXIT_OK
    print(json.dumps({"reproduced": True, "oracle": outcome.oracle, "stage": outcome.stage,
                      "description": outcome.description}, sort_keys=True))
    return EXIT_BUGS


# --- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="circuitfuzz", description="Metamorphic fuzzing of ZK circuit pipelines.")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fuzz", help="run a fuzzing campaign")
    f.add_argument("--config", required=True)
    f.add_argument("--seed")
    f.add_argument("--time-limit", type=float)
    f.add_argument("--iterations", type=int)
    f.add_argument("--out")
    f.add_argument("-v", "--verbose", action="store_true")
    f.set_defaults(func=cmd_fuzz)

    g = sub.add_parser("generate", help="print random circuits")
    g.add_argument("--seed", default="0")
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--field", default="bn254")
    g.add_argument("--generator", help="JSON file with generator settings")
    g.add_argument("--inputs", action="store_true", help="also print a random input assignment")
    g.set_defaults(func=cmd_generate)

    t = sub.add_parser("transform", help="apply stacked rewrites to a circuit")
    t.add_argument("circuit", help="IL file, or - for stdin")
    t.add_argument("--rules")
    t.add_argument("--seed", default="0")
    t.add_argument("--max-stack", type=int, default=64)
    t.add_argument("--field", default="bn254")
    t.add_argument("--log", help="write the transformation log here")
    t.set_defaults(func=cmd_transform)

    tr = sub.add_parser("translate", help="emit target-language source")
    tr.add_argument("circuit")
    tr.add_argument("--backend", required=True, choices=sorted(BACKENDS))
    tr.add_argument("--out", help="directory for the file tree; prints the source when omitted")
    tr.add_argument("--inputs", nargs="*", metavar="NAME=VALUE")
    tr.add_argument("--opt", action="append", metavar="KEY=VALUE", help="backend option, e.g. circom_version=2.1.0")
    tr.add_argument("--field", default="bn254")
    tr.set_defaults(func=cmd_translate)

    e = sub.add_parser("eval", help="evaluate a circuit with the reference interpreter")
    e.add_argument("circuit")
    e.add_argument("inputs", nargs="*", metavar="NAME=VALUE")
    e.add_argument("--field", default="bn254")
    e.add_argument("--fault", help=f"one of {', '.join(sorted(FAULTS))}")
    e.add_argument("--variant", help="semantics switches as a JSON object")
    e.add_argument("--mode", default="native", choices=["native", "expanded"])
    e.set_defaults(func=cmd_eval)

    c = sub.add_parser("check-rules", help="verify rewrite rules against the evaluator")
    c.add_argument("--rules")
    c.add_argument("--trials", type=int, default=1000)
    c.add_argument("--field", default="bn254")
    c.add_argument("--small-prime", type=int, default=7, help="exhaustive check field; 0 disables")
    c.add_argument("--small-trials", type=int, default=100)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--only", nargs="*", metavar="RULE_ID")
    c.set_defaults(func=cmd_check_rules)

    r = sub.add_parser("replay", help="re-run a bug bundle")
    r.add_argument("bundle")
    r.add_argument("--fault")
    r.add_argument("--variant")
    r.add_argument("--fixed", action="store_true", help="replay under the default (correct) semantics")
    r.set_defaults(func=cmd_replay)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, AdapterError, BundleError, UsageError, ParseError, ValidationError, RuleParseError,
            NoApplicableRule, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except KeyboardInterrupt:
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
