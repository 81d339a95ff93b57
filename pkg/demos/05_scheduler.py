"""Show how the power schedule balances early and late pipeline stages.

Proving and verifying are made ten times as expensive as compiling and
witness generation. With ``rho = 0.5`` the campaign only runs the later
stages while they account for less than half of the accumulated time, so
the share settles near 0.5; with ``rho = 1.0`` they always run. Time is
measured on the built-in adapter's virtual clock, so the run is fast and
reproducible.
"""

from __future__ import annotations

from circuitfuzz import BuiltInAdapter, CampaignConfig, Stage, run_campaign

costs = {Stage.COMPILE: 0.05, Stage.WITNESS: 0.05, Stage.PROVE: 0.5, Stage.VERIFY: 0.5}

for rho in (0.25, 0.5, 1.0):
    cfg = CampaignConfig(seed=0, time_limit=120, rho=rho, adapter=BuiltInAdapter(costs=costs, size_scaled=False))
    r = run_campaign(cfg)
    print(
        f"rho={rho}: {r.pairs_executed} pairs in {r.elapsed:.0f}s virtual, later-stage share {r.final_ratio:.3f}, "
        f"later stages on {r.sat_witness_later_stage_iterations}/{r.sat_witness_iterations} SAT-witness iterations"
    )
