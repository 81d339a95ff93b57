from __future__ import annotations

import random
import sys
import textwrap

import pytest

from circuitfuzz import (
    BN254,
    FAULTS,
    AdapterError,
    BuiltInAdapter,
    ExternalAdapter,
    PipelineRun,
    Stage,
    StageCommand,
    StageOutcome,
    Status,
    WitnessExtractor,
    parse_circuit,
    run_pipeline,
    transform_settings,
)
from circuitfuzz.pipeline import DEFAULT_COSTS, SETTINGS_EQUIVALENCES, draw_settings

P = BN254.prime
MAX254 = 2**254 - 1
PY = sys.executable


def _statuses(run):
    return [(o.stage.value, o.status.value, o.failure_class) for o in run.outcomes]


def test_builtin_not_p_all_stages_succeed(not_p):
    run = run_pipeline(BuiltInAdapter(), not_p, {"in0": 0, "in1": 1})
    assert [o.status for o in run.outcomes] == [Status.SUCCESS] * 4
    assert run.witness == {"out0": MAX254 % P}


def test_builtin_assertion_failure_halts(not_p):
    run = run_pipeline(BuiltInAdapter(), not_p, {"in0": 5, "in1": 5})
    assert _statuses(run) == [
        ("Compile", "Success", None),
        ("Witness", "Failure", "assertion-violation"),
        ("Prove", "Skipped", None),
        ("Verify", "Skipped", None),
    ]


def test_cutoff_skips_later_stages_with_zero_time(not_p):
    run = run_pipeline(BuiltInAdapter(), not_p, {"in0": 0, "in1": 1}, stage_cutoff=Stage.WITNESS)
    for stage in (Stage.PROVE, Stage.VERIFY):
        o = run.outcome(stage)
        assert o.status is Status.SKIPPED and o.wall_time == 0.0
    assert run.times()[1] == 0.0


def test_builtin_virtual_costs_are_size_scaled(not_p):
    adapter = BuiltInAdapter()
    run = run_pipeline(adapter, not_p, {"in0": 0, "in1": 1})
    t1, t2 = run.times()
    scale = 1 + 5 / 64  # (~ p) has 2 AST nodes, (in0 != in1) has 3
    assert t1 == pytest.approx((DEFAULT_COSTS[Stage.COMPILE] + DEFAULT_COSTS[Stage.WITNESS]) * scale)
    assert t2 == pytest.approx((DEFAULT_COSTS[Stage.PROVE] + DEFAULT_COSTS[Stage.VERIFY]) * scale)


def test_crash_on_division_by_zero():
    c = parse_circuit("inputs : a\noutputs: out0\nout0 = (1 / a)")
    run = run_pipeline(BuiltInAdapter(), c, {"a": 0})
    assert run.outcome(Stage.WITNESS).failure_class == "crash"


def test_compile_error_for_disallowed_operator(not_p):
    adapter = BuiltInAdapter(allowed_ops=frozenset({"neq"}))
    run = run_pipeline(adapter, not_p, {"in0": 0, "in1": 1})
    assert run.outcome(Stage.COMPILE).failure_class == "compile-error"
    assert run.outcome(Stage.WITNESS).status is Status.SKIPPED


def test_prover_capacity_fault():
    big = " + ".join(["in0"] * 30)
    c = parse_circuit(f"inputs : in0\noutputs: out0\nout0 = ({big})")
    run = run_pipeline(BuiltInAdapter(variant=FAULTS["prover-capacity"]), c, {"in0": 1})
    assert run.outcome(Stage.WITNESS).status is Status.SUCCESS
    assert run.outcome(Stage.PROVE).failure_class == "proof-error"


def test_builtin_rejects_translation_units(not_p):
    from circuitfuzz import translate

    with pytest.raises(AdapterError):
        run_pipeline(BuiltInAdapter(), translate(not_p, "circom"), {"in0": 0, "in1": 1})


def test_builtin_missing_input_is_adapter_error(not_p):
    with pytest.raises(AdapterError):
        run_pipeline(BuiltInAdapter(), not_p, {"in0": 0})


def test_bad_builtin_config():
    with pytest.raises(AdapterError):
        BuiltInAdapter(clock="sundial")


def test_outcome_invariants():
    with pytest.raises(ValueError):
        StageOutcome(Stage.WITNESS, Status.FAILURE)
    with pytest.raises(ValueError):
        StageOutcome(Stage.PROVE, Status.SUCCESS, witness={"out0": 1})
    with pytest.raises(ValueError):
        StageOutcome(Stage.WITNESS, Status.FAILURE, "segfault")


def test_run_json_roundtrip(not_p):
    run = run_pipeline(BuiltInAdapter(), not_p, {"in0": 0, "in1": 1}, {"mode": "native"})
    assert PipelineRun.from_json(run.to_json()) == run


def test_stage_parse():
    assert Stage.parse("witness") is Stage.WITNESS
    with pytest.raises(ValueError):
        Stage.parse("deploy")


# --- settings metamorphosis -----------------------------------------------------


class _Settings:
    def __init__(self, name):
        self.equivalences = SETTINGS_EQUIVALENCES[name]


def test_circom_settings_transform():
    assert transform_settings(_Settings("circom"), {"opt": "--O2"}, random.Random(0)) == {"opt": "--O0"}


def test_corset_settings_transform():
    assert transform_settings(_Settings("corset"), {"flags": "-N"}, random.Random(0)) == {"flags": "-Ne"}


def test_empty_table_is_identity():
    assert transform_settings(_Settings("gnark"), {"x": "1"}, random.Random(0)) == {"x": "1"}


def test_builtin_settings_draws():
    a = BuiltInAdapter()
    seen = {draw_settings(a, random.Random(i))["mode"] for i in range(50)}
    assert seen == {"native", "expanded"}


# --- external adapter ---------------------------------------------------------------

TOOL = textwrap.dedent(
    """
    import json, sys, time
    from circuitfuzz import BN254, Witness, AssertionViolated, evaluate, parse_circuit

    mode, circuit, inputs = sys.argv[1], sys.argv[2], sys.argv[3]
    c = parse_circuit(open(circuit).read())
    values = {k: int(v) for k, v in json.load(open(inputs)).items()}
    if mode == "compile":
        print("compiled")
        sys.exit(0)
    if mode == "sleep":
        time.sleep(30)
    if mode == "segv":
        import os, signal
        os.kill(os.getpid(), signal.SIGSEGV)
    if mode == "hog":
        blob = bytearray(512 * 1024 * 1024)
    r = evaluate(c, values, BN254)
    if isinstance(r, Witness):
        for k, v in r.values.items():
            print(f"{k} = {v}")
        sys.exit(0)
    if isinstance(r, AssertionViolated):
        print("error: assert failed", file=sys.stderr)
        sys.exit(1)
    print("error: crash", file=sys.stderr)
    sys.exit(3)
    """
)


@pytest.fixture
def tool(tmp_path):
    path = tmp_path / "tool.py"
    path.write_text(TOOL)
    return str(path)


def _adapter(tool, tmp_path, witness_mode="witness", **kw):
    commands = (
        StageCommand((Stage.COMPILE,), (PY, tool, "compile", "{circuit}", "{inputs}")),
        StageCommand((Stage.WITNESS,), (PY, tool, witness_mode, "{circuit}", "{inputs}")),
    )
    return ExternalAdapter("fake", "il", kw.pop("commands", commands), scratch_root=str(tmp_path / "scratch"), **kw)


def test_external_witness_via_regex(tool, tmp_path, not_p):
    run = run_pipeline(_adapter(tool, tmp_path), not_p, {"in0": 0, "in1": 1})
    assert run.outcome(Stage.COMPILE).status is Status.SUCCESS
    assert run.witness == {"out0": MAX254 % P}


def test_external_assertion_failure(tool, tmp_path, not_p):
    run = run_pipeline(_adapter(tool, tmp_path), not_p, {"in0": 4, "in1": 4})
    assert run.outcome(Stage.WITNESS).failure_class == "assertion-violation"
    assert "assert failed" in run.outcome(Stage.WITNESS).log


def test_external_timeout(tool, tmp_path, not_p):
    run = run_pipeline(_adapter(tool, tmp_path, "sleep", timeout_secs=1.0), not_p, {"in0": 0, "in1": 1})
    o = run.outcome(Stage.WITNESS)
    assert o.failure_class == "timeout"
    assert o.wall_time < 10


def test_external_crash_signal(tool, tmp_path, not_p):
    run = run_pipeline(_adapter(tool, tmp_path, "segv"), not_p, {"in0": 0, "in1": 1})
    assert run.outcome(Stage.WITNESS).failure_class == "crash"


def test_external_memory_limit(tool, tmp_path, not_p):
    run = run_pipeline(_adapter(tool, tmp_path, "hog", memory_limit_mb=256), not_p, {"in0": 0, "in1": 1})
    assert run.outcome(Stage.WITNESS).failure_class == "resource-limit"


def test_external_failure_patterns(tool, tmp_path, not_p):
    commands = (
        StageCommand((Stage.COMPILE,), (PY, tool, "compile", "{circuit}", "{inputs}")),
        StageCommand((Stage.WITNESS,), (PY, tool, "witness", "{circuit}", "{inputs}"),
                     failure_patterns={"crash": "assert failed"}),
    )
    run = run_pipeline(_adapter(tool, tmp_path, commands=commands), not_p, {"in0": 4, "in1": 4})
    assert run.outcome(Stage.WITNESS).failure_class == "crash"


def test_external_merged_stages(tool, tmp_path, not_p):
    commands = (StageCommand((Stage.COMPILE, Stage.WITNESS), (PY, tool, "witness", "{circuit}", "{inputs}"),
                             stage_patterns={"Witness": "assert failed"}),)
    adapter = _adapter(tool, tmp_path, commands=commands)
    ok = run_pipeline(adapter, not_p, {"in0": 0, "in1": 1})
    assert [o.status for o in ok.outcomes] == [Status.SUCCESS, Status.SUCCESS]
    assert ok.outcomes[0].wall_time == ok.outcomes[1].wall_time
    bad = run_pipeline(adapter, not_p, {"in0": 2, "in1": 2})
    assert _statuses(bad) == [("Compile", "Success", None), ("Witness", "Failure", "assertion-violation")]


def test_external_success_pattern(tool, tmp_path, not_p):
    commands = (StageCommand((Stage.COMPILE,), (PY, tool, "compile", "{circuit}", "{inputs}"),
                             success_pattern="never printed"),)
    run = run_pipeline(_adapter(tool, tmp_path, commands=commands), not_p, {"in0": 0, "in1": 1})
    assert run.outcome(Stage.COMPILE).failure_class == "compile-error"


def test_external_json_witness(tmp_path, not_p):
    script = tmp_path / "w.py"
    script.write_text("import json; json.dump({'out0': '7', 'tmp': '1'}, open('witness.json', 'w'))\n")
    adapter = ExternalAdapter("j", "il", (StageCommand((Stage.WITNESS,), (PY, str(script))),),
                              witness=WitnessExtractor(kind="json", path="witness.json"))
    run = run_pipeline(adapter, not_p, {"in0": 0, "in1": 1})
    assert run.witness == {"out0": 7}


def test_external_flags_placeholder(tmp_path, not_p):
    script = tmp_path / "echo.py"
    script.write_text("import sys; print('out0 = ' + str(len(sys.argv) - 1))\n")
    adapter = ExternalAdapter("e", "il", (StageCommand((Stage.WITNESS,), (PY, str(script), "{flags}")),))
    run = run_pipeline(adapter, not_p, {"in0": 0, "in1": 1}, {"opt": "--O2", "z": "-x -y"})
    assert run.witness == {"out0": 3}


def test_external_workdirs_removed(tool, tmp_path, not_p):
    run_pipeline(_adapter(tool, tmp_path), not_p, {"in0": 0, "in1": 1})
    assert list((tmp_path / "scratch").iterdir()) == []


def test_external_configuration_errors(tool, not_p):
    with pytest.raises(AdapterError):
        StageCommand((), ("x",))
    with pytest.raises(AdapterError):
        StageCommand((Stage.COMPILE,), ())
    with pytest.raises(AdapterError):
        StageCommand((Stage.COMPILE,), ("x",), failure_patterns={"oops": "."})
    with pytest.raises(AdapterError):
        WitnessExtractor(pattern="(?P<name>x)")
    cmd_c = StageCommand((Stage.COMPILE,), ("x",))
    cmd_w = StageCommand((Stage.WITNESS,), ("x",))
    with pytest.raises(AdapterError):
        ExternalAdapter("x", "il", (cmd_w, cmd_c))
    with pytest.raises(AdapterError):
        ExternalAdapter("x", "il", (cmd_c, cmd_c))
    missing = ExternalAdapter("x", "il", (StageCommand((Stage.COMPILE,), ("/no/such/binary",)),))
    with pytest.raises(AdapterError):
        run_pipeline(missing, not_p, {"in0": 0, "in1": 1})
    bad_placeholder = ExternalAdapter("x", "il", (StageCommand((Stage.COMPILE,), (PY, "{nope}")),))
    with pytest.raises(AdapterError):
        run_pipeline(bad_placeholder, not_p, {"in0": 0, "in1": 1})
