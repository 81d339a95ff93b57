"""Check rewrite rules against the reference evaluator.

Every shipped rule is run on random circuits over a small prime, where
the exhaustive mode also sweeps every input assignment. Two hand-written
rules show what a rejected rule looks like: one that changes values and
one that drops a subterm which might fault.
"""

from __future__ import annotations

from circuitfuzz import FieldConfig, GeneratorConfig, RuleSet, parse_rule, verify_rule_soundness

small = GeneratorConfig(field=FieldConfig(13))
rules = RuleSet.default()
print(f"{len(rules)} shipped rules")

unsound = [r.id for r in rules if not verify_rule_soundness(r, small, 20, exhaustive=True).sound]
print("unsound shipped rules on p=13:", unsound or "none")

for rule in [parse_rule("off-by-one", "?a", "(?a + 1)"), parse_rule("drop-mul-zero", "(?a * 0)", "0")]:
    report = verify_rule_soundness(rule, small, 300, exhaustive=True)
    print(f"\n{rule.id}: sound={report.sound} after {report.evaluations} evaluations")
    if report.counterexamples:
        ce = report.counterexamples[0]
        print("  before:", ce["c1"].replace("\n", " | "))
        print("  after: ", ce["c2"].replace("\n", " | "))
        print("  inputs:", ce["inputs"], "results:", ce["r1"], "vs", ce["r2"])
