"""Walk through a two-circuit metamorphic pair built around ``~ p``.

The second circuit is derived from the first by three stacked rewrites
(``x -> x * 1``, ``1 -> 1 / 1``, ``1 -> 1 - 0``). Under correct semantics
both produce the same witness; a pipeline that mishandles the complement
of a computed zero makes them disagree and the metamorphic oracle flags it.
"""

from __future__ import annotations

from circuitfuzz import (
    BN254,
    BuiltInAdapter,
    RuleSet,
    SemanticsVariant,
    compare_runs,
    evaluate,
    parse_circuit,
    print_circuit,
    run_pipeline,
    translate,
)
from circuitfuzz.rewrite import Application, replay_log

P = BN254.prime

c1 = parse_circuit(f"inputs : in0, in1\noutputs: out0\nout0 = (~ {P})\nassert(in0 != in1)\n")
rules = RuleSet.default()
log = [
    Application("one-mul-any", 0, (0,), {"a": str(P)}, {}),
    Application("one-div-one", 0, (0, 0), {}, {}),
    Application("one-minus-zero", 0, (0, 0, 0), {}, {}),
]
c2 = replay_log(c1, log, rules)

print("C1:\n" + print_circuit(c1))
print("C2:\n" + print_circuit(c2))
print("C1 as circom:\n" + translate(c1, "circom").source)

inputs = {"in0": 0, "in1": 1}
print("reference witness C1:", evaluate(c1, inputs, BN254))
print("reference witness C2:", evaluate(c2, inputs, BN254))
print("in0 = in1 = 5:", evaluate(c1, {"in0": 5, "in1": 5}, BN254))

for name, variant in [
    ("correct pipeline", SemanticsVariant()),
    ("faulty pipeline", SemanticsVariant(canonicalize_constants=False, zero_complement=True)),
]:
    adapter = BuiltInAdapter(variant=variant)
    r1 = run_pipeline(adapter, c1, inputs)
    r2 = run_pipeline(adapter, c2, inputs)
    reports = compare_runs(r1, r2, sat_known=True)
    print(f"\n{name}: out0 {r1.witness} vs {r2.witness}")
    for rep in reports:
        print(f"  {rep.oracle} at {rep.stage}: {rep.description}")
    if not reports:
        print("  no discrepancy")
