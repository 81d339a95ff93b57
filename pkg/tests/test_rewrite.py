from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circuitfuzz import (
    BN254,
    FieldConfig,
    GeneratorConfig,
    NoApplicableRule,
    RuleParseError,
    RuleSet,
    UnboundHoleError,
    apply_rule,
    evaluate,
    generate_circuit,
    generate_inputs,
    match_pattern,
    parse_circuit,
    parse_expr,
    parse_rule,
    print_circuit,
    transform_circuit,
    validate,
    verify_rule_soundness,
)
from circuitfuzz.evaluator import same_behavior
from circuitfuzz.il import Const, parse_expr as pe, subexpressions
from circuitfuzz.rewrite import (
    Application,
    log_from_json,
    log_to_json,
    match_sites,
    parse_rules,
    replay_log,
)

P = BN254.prime
RULES = RuleSet.default()


def _pattern(text):
    return parse_expr(text, placeholders=True)


def test_repeated_hole_matches_equal_subterms():
    b = match_pattern(_pattern("?a | ?a"), pe("(1 + 2) | (1 + 2)"))
    assert b == {"a": pe("1 + 2")}


def test_repeated_hole_rejects_different_subterms():
    assert match_pattern(_pattern("?a | ?a"), pe("(1 + 2) | (2 + 1)")) is None


def test_bool_hole():
    assert match_pattern(_pattern("?a:bool"), Const(42)) is None
    assert match_pattern(_pattern("?a:bool"), Const(1)) == {"a": Const(1)}


def test_unbound_hole_rejected():
    with pytest.raises(UnboundHoleError):
        parse_rule("bad", "?a", "(?a + ?b)")


def test_rule_parse_errors():
    with pytest.raises(RuleParseError):
        parse_rule("r", "$r", "1")
    with pytest.raises(RuleParseError):
        parse_rule("r", "(?a + x)", "?a")
    with pytest.raises(RuleParseError):
        parse_rule("r", "(?a + ?a:bool)", "?a")
    with pytest.raises(RuleParseError):
        parse_rules('{"only-two", "?a"}')
    with pytest.raises(RuleParseError):
        RuleSet.from_text('{"x", "?a", "?a"}\n{"x", "?a", "?a"}')


def test_rules_file_format():
    rules = parse_rules('# comment\n\n{"id1", "?a", "(?a + 0)"}\n')
    assert [r.id for r in rules] == ["id1"]
    assert str(rules[0]) == '{"id1", "?a", "(?a + 0)"}'


def test_default_rules_include_quoted_ones():
    quoted = {
        "one-plus-zero": ("1", "(1 + 0)"),
        "assoc-add": ("((?a + ?b) + ?c)", "(?a + (?b + ?c))"),
        "sub-add-random-value": ("?a", "((?a - $r) + $r)"),
        "double-lxor-bool": ("0", "($r:bool ^^ $r:bool)"),
        "double-lor-bool": ("?a:bool", "(?a || ?a)"),
        "zero-or": ("?a", "(?a | 0)"),
    }
    for rid, (pat, tmpl) in quoted.items():
        rule = RULES.by_id[rid]
        assert rule == parse_rule(rid, pat, tmpl)
    assert "pow2-to-mul" in RULES.by_id
    assert len(RULES) >= 87


def _one(rule_id, text, seed=0):
    c = parse_circuit(text)
    return apply_rule(RULES.by_id[rule_id], c, random.Random(seed), P)


def test_assoc_add():
    c2, app = _one("assoc-add", "inputs : in0, in2\noutputs: out0\nout0 = ((in0 + 1) + in2)")
    assert c2.body[0].rhs == pe("(in0 + (1 + in2))")
    assert app.rule_id == "assoc-add"


def test_sub_add_random_value_shares_r():
    rule = parse_rule("sub-add-random-value", "?a", "((?a - $r) + $r)")
    c = parse_circuit("inputs : a\noutputs: out0\nout0 = a")
    c2, app = apply_rule(rule, c, random.Random(3), P)
    r = app.randoms["r"]
    assert c2.body[0].rhs == pe(f"((a - {r}) + {r})")


def test_double_lxor_bool_on_zero():
    c = parse_circuit("inputs :\noutputs: out0\nout0 = 0")
    seen = set()
    for seed in range(20):
        c2, app = apply_rule(RULES.by_id["double-lxor-bool"], c, random.Random(seed), P)
        r = app.randoms["r"]
        assert c2.body[0].rhs == pe(f"({r} ^^ {r})")
        seen.add(r)
    assert seen == {0, 1}


def test_no_match_returns_none():
    c = parse_circuit("inputs : a\noutputs: out0\nout0 = a")
    assert apply_rule(RULES.by_id["assoc-add"], c, random.Random(0), P) is None


def test_match_sites_cover_whole_circuit():
    c = parse_circuit("inputs : a\noutputs: out0\nout0 = (a + 1)\nassert((a + 2) == a)")
    rule = RULES.by_id["comm-add"]
    assert [(s.statement, s.path) for s in match_sites(rule, c)] == [(0, ()), (1, (0,))]


def test_site_choice_is_uniform():
    c = parse_circuit("inputs : a\noutputs: out0, out1\nout0 = (a + 1)\nout1 = (a + 2)")
    rule = RULES.by_id["comm-add"]
    rng = random.Random(0)
    counts = [0, 0]
    for _ in range(2000):
        _, app = apply_rule(rule, c, rng, P)
        counts[app.statement] += 1
    assert 900 < counts[0] < 1100


def test_value_rules_skip_boolean_positions():
    # (a + 0) is not Boolean, so any-plus-zero must not rewrite the assertion root.
    c = parse_circuit("inputs : a\noutputs:\nassert(a == a)")
    for site in match_sites(RULES.by_id["any-plus-zero"], c):
        assert site.path != ()


def test_not_p_to_rewritten_with_three_identity_rewrites(not_p, not_p_rewritten):
    log = [
        Application("one-mul-any", 0, (0,), {"a": str(P)}, {}),
        Application("one-div-one", 0, (0, 0), {}, {}),
        Application("one-minus-zero", 0, (0, 0, 0), {}, {}),
    ]
    assert replay_log(not_p, log, RULES) == not_p_rewritten
    assert print_circuit(replay_log(not_p, log, RULES)) == print_circuit(not_p_rewritten)


def test_replay_rejects_stale_log(not_p):
    with pytest.raises(ValueError):
        replay_log(not_p, [Application("assoc-add", 0, (), {}, {})], RULES)
    with pytest.raises(ValueError):
        replay_log(not_p, [Application("no-such-rule", 0, (), {}, {})], RULES)


def test_max_stack_one_gives_one_application(not_p):
    for seed in range(20):
        _, log = transform_circuit(not_p, RULES, 1, random.Random(seed), P)
        assert len(log) == 1


def test_stack_count_is_within_bounds(not_p):
    lengths = {len(transform_circuit(not_p, RULES, 4, random.Random(s), P)[1]) for s in range(200)}
    assert lengths == {1, 2, 3, 4}


def test_transform_errors(not_p):
    with pytest.raises(ValueError):
        transform_circuit(not_p, RULES, 0, random.Random(0), P)
    only = RuleSet([RULES.by_id["assoc-add"]])
    with pytest.raises(NoApplicableRule):
        transform_circuit(not_p, only, 3, random.Random(0), P)


@settings(max_examples=150, deadline=None)
@given(st.integers(min_value=0))
def test_replaying_log_reproduces_c2(seed):
    rng = random.Random(seed)
    c1 = generate_circuit(GeneratorConfig(), rng)
    c2, log = transform_circuit(c1, RULES, 64, rng, P)
    again = replay_log(c1, log_from_json(log_to_json(log)), RULES)
    assert print_circuit(again) == print_circuit(c2)


@settings(max_examples=150, deadline=None)
@given(st.integers(min_value=0))
def test_stacked_transformations_preserve_semantics(seed):
    rng = random.Random(seed)
    cfg = GeneratorConfig()
    c1 = generate_circuit(cfg, rng)
    c2, _ = transform_circuit(c1, RULES, 64, rng, P)
    assert validate(c2) == []
    inputs = generate_inputs(c1, cfg, rng)
    assert same_behavior(evaluate(c1, inputs, BN254), evaluate(c2, inputs, BN254))


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0))
def test_one_application_changes_one_subtree(seed):
    rng = random.Random(seed)
    c1 = generate_circuit(GeneratorConfig(), rng)
    rule = RULES[rng.randrange(len(RULES))]
    result = apply_rule(rule, c1, rng, P)
    if result is None:
        return
    c2, app = result
    for i, (s1, s2) in enumerate(zip(c1.body, c2.body)):
        if i != app.statement:
            assert s1 == s2
    e1 = next(e for i, e in c1.expressions() if i == app.statement)
    e2 = next(e for i, e in c2.expressions() if i == app.statement)
    # Outside the rewritten path the two trees are identical.
    outside1 = {p: n for p, n in subexpressions(e1) if p[: len(app.path)] != app.path}
    outside2 = {p: n for p, n in subexpressions(e2) if p[: len(app.path)] != app.path}
    assert {p: type(n) for p, n in outside1.items()} == {p: type(n) for p, n in outside2.items()}


def test_one_plus_zero_sound_on_p7():
    cfg = GeneratorConfig(field=FieldConfig(7))
    assert verify_rule_soundness(RULES.by_id["one-plus-zero"], cfg, 1000, exhaustive=True).sound


def test_pow2_to_mul_sound_on_bn254():
    assert verify_rule_soundness(RULES.by_id["pow2-to-mul"], GeneratorConfig(), 1000).sound


def test_wrong_rule_is_caught():
    report = verify_rule_soundness(parse_rule("bad", "?a", "(?a + 1)"), GeneratorConfig(), 50)
    assert not report.sound
    ce = report.counterexamples[0]
    assert set(ce) >= {"c1", "c2", "inputs", "r1", "r2"}


def test_error_introducing_rule_is_caught():
    # Removing a faulting subterm changes the error verdict.
    rule = parse_rule("drop-mul-zero", "(?a * 0)", "0")
    report = verify_rule_soundness(rule, GeneratorConfig(field=FieldConfig(7)), 300, exhaustive=True)
    assert not report.sound


def test_soundness_trials_must_be_positive():
    with pytest.raises(ValueError):
        verify_rule_soundness(RULES[0], GeneratorConfig(), 0)
