"""Run a short campaign against a pipeline with an injected fault, then replay the bug.

The built-in adapter is configured so that bitwise ``|`` with one literal
operand is computed as addition. The campaign stops at the first
metamorphic-test discrepancy and writes a self-contained bundle; replaying
the bundle against the faulty pipeline reproduces it, and replaying it
against a correct pipeline reports it as fixed.
"""

from __future__ import annotations

import tempfile
from pathlib import Path

from circuitfuzz import CONFIRMED_FIXED, DEFAULT, FAULTS, BuiltInAdapter, CampaignConfig, replay, run_campaign

out = Path(tempfile.mkdtemp(prefix="circuitfuzz-demo-"))
cfg = CampaignConfig(
    seed=3,
    max_iterations=2000,
    adapter=BuiltInAdapter(variant=FAULTS["or-constant-operand"]),
    output_dir=str(out),
    stop_on_first_bug=True,
    stop_oracles=("MT",),
)
report = run_campaign(cfg)
print(f"{report.pairs_executed} pairs, {report.sat_fraction:.0%} SAT inputs, {len(report.bugs)} report(s)")

bug = report.bugs[-1]
bundle = out / bug["bundle"]
print(f"first MT after {bug['circuits_to_bug']} circuits: {bug['oracle']} at {bug['stage']}")
print("bundle:", sorted(p.name for p in bundle.iterdir()))
print("C1:\n" + (bundle / "c1.cir").read_text())
print("C2:\n" + (bundle / "c2.cir").read_text())

again = replay(bundle)
print("replay on faulty pipeline:", again.oracle, again.stage, again.description)
print("replay on correct pipeline fixed:", replay(bundle, variant=DEFAULT) == CONFIRMED_FIXED)
