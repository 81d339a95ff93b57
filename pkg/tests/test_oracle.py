from __future__ import annotations

from circuitfuzz import (
    BuiltInAdapter,
    BugReport,
    PipelineRun,
    SemanticsVariant,
    Stage,
    StageOutcome,
    Status,
    compare_runs,
    run_pipeline,
    validity_checks,
)
from circuitfuzz.oracle import MT, VC, agreeing_crash

S, F, K = Status.SUCCESS, Status.FAILURE, Status.SKIPPED


def _run(*outcomes, cid="c"):
    return PipelineRun(cid, {}, tuple(outcomes))


def _o(stage, status, fclass=None, witness=None):
    return StageOutcome(stage, status, fclass, witness)


def test_not_p_pair_under_buggy_variant(not_p, not_p_rewritten):
    # Raw constants plus complement-of-computed-zero reproduce the pair exactly.
    adapter = BuiltInAdapter(variant=SemanticsVariant(canonicalize_constants=False, zero_complement=True))
    r1 = run_pipeline(adapter, not_p, {"in0": 0, "in1": 1})
    r2 = run_pipeline(adapter, not_p_rewritten, {"in0": 0, "in1": 1})
    reports = compare_runs(r1, r2, sat_known=True)
    assert [(r.oracle, r.stage) for r in reports] == [(MT, "Witness")]
    assert reports[0].description == "witness differs on out0"
    assert r2.witness == {"out0": 0}


def test_not_p_pair_default_agrees(not_p, not_p_rewritten):
    adapter = BuiltInAdapter()
    r1 = run_pipeline(adapter, not_p, {"in0": 0, "in1": 1})
    r2 = run_pipeline(adapter, not_p_rewritten, {"in0": 0, "in1": 1})
    assert compare_runs(r1, r2, True) == []


def test_identical_runs_agree():
    r = _run(_o(Stage.COMPILE, S), _o(Stage.WITNESS, S, witness={"out0": 3}))
    assert compare_runs(r, r) == []


def test_status_mismatch():
    r1 = _run(_o(Stage.WITNESS, F, "assertion-violation"))
    r2 = _run(_o(Stage.WITNESS, S, witness={}))
    [rep] = compare_runs(r1, r2)
    assert (rep.oracle, rep.stage, rep.severity) == (MT, "Witness", "high")
    assert rep.description == "Failure(assertion-violation) vs Success"


def test_different_failure_classes():
    r1 = _run(_o(Stage.COMPILE, F, "compile-error"))
    r2 = _run(_o(Stage.COMPILE, F, "crash"))
    [rep] = compare_runs(r1, r2)
    assert rep.severity == "low"


def test_same_failure_is_agreement():
    r = _run(_o(Stage.WITNESS, F, "assertion-violation"))
    assert compare_runs(r, r) == []


def test_witness_check_skipped_when_unsat():
    r1 = _run(_o(Stage.WITNESS, S, witness={"out0": 1}))
    r2 = _run(_o(Stage.WITNESS, S, witness={"out0": 2}))
    assert compare_runs(r1, r2, sat_known=False) == []
    assert len(compare_runs(r1, r2, sat_known=None)) == 1


def test_skipped_stages_not_compared():
    r1 = _run(_o(Stage.PROVE, K))
    r2 = _run(_o(Stage.PROVE, F, "proof-error"))
    assert compare_runs(r1, r2) == []


def test_validity_witness_then_proof_failure():
    r = _run(_o(Stage.WITNESS, S, witness={}), _o(Stage.PROVE, F, "proof-error"), _o(Stage.VERIFY, K))
    [rep] = validity_checks(r)
    assert (rep.oracle, rep.stage) == (VC, "Prove")


def test_validity_proof_then_verify_failure():
    r = _run(_o(Stage.WITNESS, S, witness={}), _o(Stage.PROVE, S), _o(Stage.VERIFY, F, "verify-reject"))
    assert [(x.oracle, x.stage) for x in validity_checks(r)] == [(VC, "Verify")]


def test_validity_skip_exemption_and_all_success():
    assert validity_checks(_run(_o(Stage.PROVE, S), _o(Stage.VERIFY, K))) == []
    assert validity_checks(_run(_o(Stage.WITNESS, S, witness={}), _o(Stage.PROVE, S), _o(Stage.VERIFY, S))) == []


def test_agreeing_crash():
    crash = _run(_o(Stage.WITNESS, F, "crash"))
    assert agreeing_crash(crash, crash)
    assert not agreeing_crash(crash, _run(_o(Stage.WITNESS, F, "assertion-violation")))
    assert not agreeing_crash(_run(_o(Stage.WITNESS, S, witness={})), _run(_o(Stage.WITNESS, S, witness={})))


def test_report_json_roundtrip():
    rep = BugReport(MT, "Witness", "x", "low", {"seed": "1:2"})
    assert BugReport.from_json(rep.to_json()) == rep
