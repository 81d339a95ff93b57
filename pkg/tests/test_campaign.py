from __future__ import annotations

import json
import random
import shutil

import pytest

from circuitfuzz import (
    CONFIRMED_FIXED,
    DEFAULT,
    FAULTS,
    BuiltInAdapter,
    BundleError,
    CampaignConfig,
    ConfigError,
    SchedulerState,
    fuzz_iteration,
    replay,
    run_campaign,
    should_run_later_stages,
)
from circuitfuzz.campaign import _Context


def test_scheduler_examples():
    assert should_run_later_stages(SchedulerState(10, 0, 0.5))
    assert not should_run_later_stages(SchedulerState(10, 10, 0.5))
    assert should_run_later_stages(SchedulerState(0, 0, 0.5))
    assert should_run_later_stages(SchedulerState(10, 1e9, 1.0))
    with pytest.raises(ValueError):
        SchedulerState(rho=0.0)
    with pytest.raises(ValueError):
        SchedulerState(t1=-1)


def test_config_validation(tmp_path):
    with pytest.raises(ConfigError):
        CampaignConfig()
    with pytest.raises(ConfigError):
        CampaignConfig(max_iterations=1, rho=1.5)
    with pytest.raises(ConfigError):
        CampaignConfig(max_iterations=1, rules_path=str(tmp_path / "missing.rules"))
    with pytest.raises(ConfigError):
        CampaignConfig(max_iterations=1, backend="halo2")
    with pytest.raises(ConfigError):
        CampaignConfig(max_iterations=1, max_stack=0)


def test_iteration_record_contents():
    cfg = CampaignConfig(seed=7, max_iterations=1)
    rec, state = fuzz_iteration(cfg, SchedulerState(), random.Random("7:0"))
    assert rec.error is None
    assert 1 <= len(rec.log) <= 64
    assert rec.runs is not None and state.t1 > 0
    assert rec.stage_cutoff.value == "Verify"
    assert rec.settings[0]["mode"] != rec.settings[1]["mode"]


def test_cutoff_follows_scheduler():
    cfg = CampaignConfig(max_iterations=1)
    rec, _ = fuzz_iteration(cfg, SchedulerState(1.0, 1.0, 0.5), random.Random(0))
    assert rec.stage_cutoff.value == "Witness"
    assert not rec.later_stages_ran


def test_self_soundness_seed_7():
    report = run_campaign(CampaignConfig(seed=7, max_iterations=1000))
    assert report.bugs == []
    assert report.pairs_executed == 1000
    assert report.throughput > 0


def test_backend_restricts_operators_and_rules():
    ctx = _Context.build(CampaignConfig(max_iterations=1, backend="corset"))
    assert "complement" not in ctx.gen.allowed_ops
    assert "zero-or" not in ctx.rules.by_id
    assert "comm-add" in ctx.rules.by_id


def test_time_limit_stops_campaign():
    report = run_campaign(CampaignConfig(time_limit=0.5))
    assert report.elapsed >= 0.5
    assert report.clock == "virtual"
    assert report.pairs_executed > 0


def _fault_cfg(tmp_path, name="out", **kw):
    base = dict(seed=3, max_iterations=400, adapter=BuiltInAdapter(variant=FAULTS["or-constant-operand"]),
                output_dir=str(tmp_path / name), stop_on_first_bug=True, stop_oracles=("MT",))
    base.update(kw)
    return CampaignConfig(**base)


def test_bundle_written_and_replayed(tmp_path):
    report = run_campaign(_fault_cfg(tmp_path))
    assert report.bugs
    bug = report.bugs[-1]
    bundle = tmp_path / "out" / bug["bundle"]
    names = {p.name for p in bundle.iterdir()}
    assert {"report.json", "c1.cir", "c2.cir", "inputs.json", "settings.json", "transformation.json",
            "runs.json", "adapter.json", "seed.txt", "translations"} <= names
    lines = (tmp_path / "out" / "bugs.jsonl").read_text().splitlines()
    assert [json.loads(x)["iteration"] for x in lines] == [b["iteration"] for b in report.bugs]
    assert json.loads((tmp_path / "out" / "report.json").read_text()) == report.to_json()

    rep = replay(bundle)
    assert rep != CONFIRMED_FIXED
    assert (rep.oracle, rep.stage) == (bug["oracle"], bug["stage"])
    assert replay(bundle, variant=DEFAULT) == CONFIRMED_FIXED


def test_bundle_seed_reproduces_iteration(tmp_path):
    cfg = _fault_cfg(tmp_path)
    report = run_campaign(cfg)
    bundle = tmp_path / "out" / report.bugs[-1]["bundle"]
    seed = (bundle / "seed.txt").read_text().strip()
    rec, _ = fuzz_iteration(cfg, SchedulerState(), random.Random(seed), report.bugs[-1]["iteration"])
    assert str(rec.c1) + "\n" == (bundle / "c1.cir").read_text()
    assert str(rec.c2) + "\n" == (bundle / "c2.cir").read_text()


def test_truncated_bundle(tmp_path):
    report = run_campaign(_fault_cfg(tmp_path))
    bundle = tmp_path / "out" / report.bugs[-1]["bundle"]
    broken = tmp_path / "broken"
    shutil.copytree(bundle, broken)
    (broken / "c2.cir").unlink()
    with pytest.raises(BundleError):
        replay(broken)
    shutil.copytree(bundle, tmp_path / "corrupt")
    (tmp_path / "corrupt" / "inputs.json").write_text("{not json")
    with pytest.raises(BundleError):
        replay(tmp_path / "corrupt")
    with pytest.raises(BundleError):
        replay(tmp_path / "nowhere")


def test_campaign_is_deterministic(tmp_path):
    a = run_campaign(_fault_cfg(tmp_path, "a", stop_on_first_bug=False, max_iterations=300))
    b = run_campaign(_fault_cfg(tmp_path, "b", stop_on_first_bug=False, max_iterations=300))
    assert a.dumps() == b.dumps()
    assert a.bugs


def test_interrupt_writes_report(tmp_path):
    calls = []

    def progress(rec):
        calls.append(rec.index)
        if rec.index == 4:
            raise KeyboardInterrupt

    cfg = CampaignConfig(max_iterations=100, output_dir=str(tmp_path / "o"))
    report = run_campaign(cfg, progress=progress)
    assert report.interrupted
    assert report.pairs_executed == 5
    saved = json.loads((tmp_path / "o" / "report.json").read_text())
    assert saved["interrupted"] is True


def test_report_counters():
    report = run_campaign(CampaignConfig(seed=1, max_iterations=200))
    d = report.to_json()
    assert d["circuits_generated"] == 200
    assert 0 < d["sat_fraction"] < 1
    assert d["sat_witness_later_stage_iterations"] <= d["sat_witness_iterations"]
    assert sum(d["stage_times"].values()) == pytest.approx(d["t1"] + d["t2"])


def test_agreeing_crashes_are_counted_not_reported():
    report = run_campaign(CampaignConfig(seed=2, max_iterations=2000))
    assert report.agreeing_crashes > 0
    assert report.bugs == []


def test_external_adapter_campaign(tmp_path):
    import sys

    from circuitfuzz import ExternalAdapter, Stage, StageCommand

    tool = tmp_path / "tool.py"
    tool.write_text(
        "import json, sys\n"
        "from circuitfuzz import BN254, Witness, evaluate, parse_circuit\n"
        "c = parse_circuit(open(sys.argv[1]).read())\n"
        "r = evaluate(c, {k: int(v) for k, v in json.load(open(sys.argv[2])).items()}, BN254)\n"
        "if isinstance(r, Witness):\n"
        "    [print(f'{k} = {v}') for k, v in r.values.items()]\n"
        "else:\n"
        "    sys.exit(1)\n"
    )
    adapter = ExternalAdapter("ref", "il", (StageCommand((Stage.WITNESS,), (sys.executable, str(tool), "{circuit}",
                                                                            "{inputs}")),))
    report = run_campaign(CampaignConfig(seed=5, max_iterations=10, adapter=adapter))
    assert report.clock == "real"
    assert report.pairs_executed == 10
    assert report.bugs == []
    assert report.sat_witness_iterations > 0
