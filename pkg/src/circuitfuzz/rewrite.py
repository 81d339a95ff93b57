"""Rewrite-rule DSL: parsing, matching, application and stacked transformations.

A rule is a triple ``{"id", "pattern", "template"}``. Patterns use ``?name``
holes (``?name:bool`` only matches Boolean-typed expressions); repeated hole
names demand structurally equal subtrees. Templates may introduce fresh
random constants ``$name`` / ``$name:bool``; each is drawn once per
application and shared by all its occurrences.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .il import (
    Assert,
    Circuit,
    Const,
    Expr,
    Hole,
    RandomConst,
    Var,
    bool_contexts,
    children,
    get_at,
    infer_bool,
    parse_expr,
    print_expr,
    replace_at,
    subexpressions,
    validate,
    with_children,
)


class RuleParseError(ValueError):
    pass


class UnboundHoleError(RuleParseError):
    pass


class NoApplicableRule(RuntimeError):
    pass


@dataclass(frozen=True)
class RewriteRule:
    id: str
    pattern: Expr
    template: Expr

    def __str__(self):
        return json.dumps([self.id, print_expr(self.pattern), print_expr(self.template)])[1:-1].join("{}")


def _placeholders(e: Expr, cls) -> Iterator:
    for _, node in subexpressions(e):
        if isinstance(node, cls):
            yield node


def parse_rule(rule_id: str, pattern_text: str, template_text: str) -> RewriteRule:
    try:
        pattern = parse_expr(pattern_text, placeholders=True)
        template = parse_expr(template_text, placeholders=True)
    except ValueError as exc:
        raise RuleParseError(f"rule {rule_id!r}: {exc}") from None

    holes: dict[str, str] = {}
    for h in _placeholders(pattern, Hole):
        if holes.setdefault(h.name, h.type) != h.type:
            raise RuleParseError(f"rule {rule_id!r}: hole ?{h.name} used with two types")
    if any(True for _ in _placeholders(pattern, RandomConst)):
        raise RuleParseError(f"rule {rule_id!r}: random constants are only allowed in templates")
    if any(True for _ in _placeholders(pattern, Var)):
        raise RuleParseError(f"rule {rule_id!r}: patterns may not name variables")
    for h in _placeholders(template, Hole):
        if h.name not in holes:
            raise UnboundHoleError(f"rule {rule_id!r}: template uses unbound hole ?{h.name}")
    for v in _placeholders(template, Var):
        raise UnboundHoleError(f"rule {rule_id!r}: template uses unbound name {v.name!r}")
    randoms: dict[str, str] = {}
    for r in _placeholders(template, RandomConst):
        if randoms.setdefault(r.name, r.type) != r.type:
            raise RuleParseError(f"rule {rule_id!r}: ${r.name} used with two types")
    # Template hole references carry no type annotation of their own.
    template = _strip_hole_types(template)
    return RewriteRule(rule_id, pattern, template)


def _strip_hole_types(e: Expr) -> Expr:
    if isinstance(e, Hole):
        return Hole(e.name)
    kids = children(e)
    return with_children(e, tuple(_strip_hole_types(k) for k in kids)) if kids else e


def parse_rules(text: str) -> list[RewriteRule]:
    """Parse a rules file: one ``{"id", "pattern", "template"}`` per line, ``#`` comments."""
    rules = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        line = line.rstrip(",")
        if not (line.startswith("{") and line.endswith("}")):
            raise RuleParseError(f"line {lineno}: expected {{\"id\", \"pattern\", \"template\"}}")
        try:
            triple = json.loads("[" + line[1:-1] + "]")
        except json.JSONDecodeError as exc:
            raise RuleParseError(f"line {lineno}: {exc}") from None
        if len(triple) != 3 or not all(isinstance(s, str) for s in triple):
            raise RuleParseError(f"line {lineno}: a rule is a triple of strings")
        rules.append(parse_rule(*triple))
    return rules


class RuleSet(Sequence[RewriteRule]):
    def __init__(self, rules: Iterable[RewriteRule]):
        self.rules = list(rules)
        self.by_id = {}
        for r in self.rules:
            if r.id in self.by_id:
                raise RuleParseError(f"duplicate rule id {r.id!r}")
            self.by_id[r.id] = r

    def __getitem__(self, i):
        return self.rules[i]

    def __len__(self):
        return len(self.rules)

    @classmethod
    def from_text(cls, text: str) -> "RuleSet":
        return cls(parse_rules(text))

    @classmethod
    def from_file(cls, path: str | Path) -> "RuleSet":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))

    @classmethod
    def default(cls) -> "RuleSet":
        from .rules import DEFAULT_RULES

        return cls.from_text(DEFAULT_RULES)


# --- matching ----------------------------------------------------------------


def match_pattern(pattern: Expr, e: Expr, bindings: dict[str, Expr] | None = None) -> dict[str, Expr] | None:
    """Structural match; returns hole bindings or ``None``."""
    b = {} if bindings is None else bindings
    if _match(pattern, e, b):
        return b
    return None


def _match(p: Expr, e: Expr, b: dict[str, Expr]) -> bool:
    if isinstance(p, Hole):
        if p.type == "bool" and infer_bool(e) != "bool":
            return False
        bound = b.get(p.name)
        if bound is not None:
            return bound == e
        b[p.name] = e
        return True
    if type(p) is not type(e):
        return False
    if isinstance(p, Const):
        return p.value == e.value
    if isinstance(p, Var):
        return p.name == e.name
    if getattr(p, "op", None) != getattr(e, "op", None):
        return False
    return all(_match(pk, ek, b) for pk, ek in zip(children(p), children(e)))


def instantiate(template: Expr, bindings: dict[str, Expr], randoms: dict[str, int] | None = None) -> Expr:
    """Fill holes from ``bindings``; random constants from ``randoms`` (left symbolic if absent)."""
    if isinstance(template, Hole):
        return bindings[template.name]
    if isinstance(template, RandomConst):
        if randoms is not None and template.name in randoms:
            return Const(randoms[template.name])
        return template
    kids = children(template)
    if not kids:
        return template
    return with_children(template, tuple(instantiate(k, bindings, randoms) for k in kids))


@dataclass(frozen=True)
class Site:
    statement: int
    path: tuple[int, ...]
    bindings: dict[str, Expr] = field(compare=False, hash=False)


def match_sites(rule: RewriteRule, c: Circuit) -> list[Site]:
    """All places ``rule`` can rewrite without breaking Boolean typing, in pre-order."""
    sites = []
    has_holes = _has_holes(rule.template)
    template_bool = None
    for idx, expr in c.expressions():
        is_assert = isinstance(c.body[idx], Assert)
        for path, node, needs_bool in bool_contexts(expr, is_assert):
            b = match_pattern(rule.pattern, node)
            if b is None:
                continue
            if needs_bool:
                if template_bool is None or has_holes:
                    template_bool = infer_bool(instantiate(rule.template, b)) == "bool"
                if not template_bool:
                    continue
            sites.append(Site(idx, path, b))
    return sites


def _has_holes(e: Expr) -> bool:
    return isinstance(e, Hole) or any(_has_holes(k) for k in children(e))


def draw_randoms(rule: RewriteRule, prime: int, rng: random.Random) -> dict[str, int]:
    randoms = {}
    for r in _placeholders(rule.template, RandomConst):
        if r.name not in randoms:
            randoms[r.name] = rng.randrange(2) if r.type == "bool" else rng.randrange(prime)
    return randoms


@dataclass(frozen=True)
class Application:
    """One rule application, enough to replay it exactly."""

    rule_id: str
    statement: int
    path: tuple[int, ...]
    bindings: dict[str, str]
    randoms: dict[str, int]

    def to_json(self) -> dict:
        return {
            "rule": self.rule_id,
            "statement": self.statement,
            "path": list(self.path),
            "bindings": dict(self.bindings),
            "randoms": {k: str(v) for k, v in self.randoms.items()},
        }

    @classmethod
    def from_json(cls, d: dict) -> "Application":
        return cls(d["rule"], d["statement"], tuple(d["path"]), dict(d.get("bindings", {})),
                   {k: int(v) for k, v in d.get("randoms", {}).items()})


TransformationLog = list  # list[Application]


def _rewrite(c: Circuit, rule: RewriteRule, site: Site, randoms: dict[str, int]) -> Circuit:
    expr = next(e for i, e in c.expressions() if i == site.statement)
    new = instantiate(rule.template, site.bindings, randoms)
    return c.replace_statement_expr(site.statement, replace_at(expr, site.path, new))


def apply_rule(rule: RewriteRule, c: Circuit, rng: random.Random, prime: int) -> tuple[Circuit, Application] | None:
    """Rewrite one uniformly chosen match site; ``None`` when the rule matches nowhere."""
    sites = match_sites(rule, c)
    if not sites:
        return None
    site = sites[rng.randrange(len(sites))]
    randoms = draw_randoms(rule, prime, rng)
    app = Application(rule.id, site.statement, site.path,
                      {k: print_expr(v) for k, v in sorted(site.bindings.items())}, randoms)
    return _rewrite(c, rule, site, randoms), app


def transform_circuit(
    c: Circuit,
    rules: Sequence[RewriteRule],
    max_stack: int,
    rng: random.Random,
    prime: int,
    retries: int = 32,
) -> tuple[Circuit, list[Application]]:
    """Stack ``k ~ U[1, max_stack]`` rule applications onto ``c``."""
    if max_stack < 1:
        raise ValueError("max_stack must be >= 1")
    if not rules:
        raise NoApplicableRule("empty rule set")
    k = rng.randint(1, max_stack)
    log: list[Application] = []
    for _ in range(k):
        result = None
        for _ in range(retries):
            result = apply_rule(rules[rng.randrange(len(rules))], c, rng, prime)
            if result is not None:
                break
        else:
            order = list(rules)
            rng.shuffle(order)
            for rule in order:
                result = apply_rule(rule, c, rng, prime)
                if result is not None:
                    break
        if result is None:
            raise NoApplicableRule("no rule matches anywhere in the circuit")
        c, app = result
        log.append(app)
    return c, log


def replay_log(c: Circuit, log: Iterable[Application], rules: RuleSet) -> Circuit:
    """Re-apply a recorded transformation; raises ``ValueError`` if a step no longer matches."""
    for app in log:
        rule = rules.by_id.get(app.rule_id)
        if rule is None:
            raise ValueError(f"unknown rule {app.rule_id!r}")
        expr = next(e for i, e in c.expressions() if i == app.statement)
        b = match_pattern(rule.pattern, get_at(expr, app.path))
        if b is None:
            raise ValueError(f"rule {app.rule_id!r} no longer matches at {app.statement}:{list(app.path)}")
        c = _rewrite(c, rule, Site(app.statement, app.path, b), app.randoms)
    return c


def log_to_json(log: Iterable[Application]) -> list[dict]:
    return [a.to_json() for a in log]


def log_from_json(data: Iterable[dict]) -> list[Application]:
    return [Application.from_json(d) for d in data]


def rewritten_is_valid(c: Circuit, allowed_ops=None) -> bool:
    return not validate(c, allowed_ops)


# --- soundness checking -------------------------------------------------------


@dataclass
class SoundnessReport:
    rule_id: str
    trials: int = 0
    evaluations: int = 0
    counterexamples: list[dict] = field(default_factory=list)

    @property
    def sound(self) -> bool:
        return not self.counterexamples


def _embed_pattern(rule: RewriteRule, c: Circuit, cfg, rng: random.Random) -> Circuit:
    """Add a statement containing an instance of ``rule.pattern`` so the rule has a site."""
    from .generator import random_expr
    from .il import Assign

    names = c.input_names
    want_bool = {h.name for h in _placeholders(rule.pattern, Hole) if h.type == "bool"}
    for _, node, needs_bool in bool_contexts(rule.pattern, False):
        if isinstance(node, Hole) and needs_bool:
            want_bool.add(node.name)
    bindings = {}
    for h in _placeholders(rule.pattern, Hole):
        if h.name not in bindings:
            bindings[h.name] = random_expr(cfg, rng, names, rng.randint(0, 2), want_bool=h.name in want_bool)
    inst = instantiate(rule.pattern, bindings)
    out = f"out{len(c.outputs)}"
    while out in names or out in c.outputs:
        out += "_"
    if infer_bool(inst) == "bool" and rng.random() < 0.5:
        return Circuit(c.inputs, c.outputs, c.body + (Assert(inst),))
    return Circuit(c.inputs, c.outputs + (out,), c.body + (Assign(out, inst),))


def verify_rule_soundness(
    rule: RewriteRule,
    cfg,
    trials: int,
    seed: int = 0,
    exhaustive: bool = False,
    max_counterexamples: int = 5,
) -> SoundnessReport:
    """Check that ``rule`` preserves evaluation results on random circuits.

    Each trial generates a circuit from ``cfg`` (a ``GeneratorConfig``), plants
    an instance of the pattern, applies the rule at a random site and compares
    the reference evaluation of both circuits. With ``exhaustive`` every input
    assignment over the (small) field is enumerated; otherwise one random
    assignment per trial is used.
    """
    import itertools

    from .evaluator import evaluate, same_behavior
    from .generator import generate_circuit, generate_inputs

    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = random.Random(f"soundness:{rule.id}:{seed}")
    fcfg = cfg.field
    report = SoundnessReport(rule.id)
    while report.trials < trials:
        c1 = _embed_pattern(rule, generate_circuit(cfg, rng), cfg, rng)
        if validate(c1):
            continue
        result = apply_rule(rule, c1, rng, fcfg.prime)
        if result is None:
            continue
        c2, app = result
        report.trials += 1
        problems = validate(c2)
        if problems:
            report.counterexamples.append({"c1": str(c1), "c2": str(c2), "problem": str(problems[0])})
        else:
            if exhaustive:
                names = c1.input_names
                assignments = (dict(zip(names, vals)) for vals in itertools.product(range(fcfg.prime), repeat=len(names)))
            else:
                assignments = [generate_inputs(c1, cfg, rng)]
            for inputs in assignments:
                report.evaluations += 1
                r1 = evaluate(c1, inputs, fcfg)
                r2 = evaluate(c2, inputs, fcfg)
                if not same_behavior(r1, r2):
                    report.counterexamples.append({
                        "c1": str(c1), "c2": str(c2), "application": app.to_json(),
                        "inputs": {k: str(v) for k, v in inputs.items()},
                        "r1": r1.to_json(), "r2": r2.to_json(),
                    })
                    break
        if len(report.counterexamples) >= max_counterexamples:
            break
    return report
