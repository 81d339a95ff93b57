"""A stand-in command-line toolchain for IL circuits, used by ``external.json``.

``compile`` only parses the file; ``witness`` evaluates it and prints
``outN = value`` lines. Its evaluator has a planted fault (``c <= e`` with
a literal ``c`` is always true) so a campaign against it finds something.
"""

from __future__ import annotations

import json
import sys

from circuitfuzz import BN254, FAULTS, AssertionViolated, Witness, evaluate, parse_circuit

mode, circuit_path, inputs_path = sys.argv[1:4]
circuit = parse_circuit(open(circuit_path).read())
if mode == "compile":
    print("ok")
    sys.exit(0)
values = {k: int(v) for k, v in json.load(open(inputs_path)).items()}
result = evaluate(circuit, values, BN254, FAULTS["le-constant-lhs"])
if isinstance(result, Witness):
    for name, value in result.values.items():
        print(f"{name} = {value}")
    sys.exit(0)
if isinstance(result, AssertionViolated):
    print("error: assertion failed", file=sys.stderr)
    sys.exit(1)
print(f"error: {result.error_class}", file=sys.stderr)
sys.exit(2)
