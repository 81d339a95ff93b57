"""Translate one IL circuit into every supported target language.

Backends that lack an operator used by the circuit refuse it with a
validation error; the campaign avoids this by restricting the generator
and the rule set to the target's operator set.
"""

from __future__ import annotations

from circuitfuzz import BACKENDS, ValidationError, encode_inputs, parse_circuit, translate

c = parse_circuit(
    "inputs : a, pub b\n"
    "outputs: out0, out1\n"
    "out0 = ((a == b) ? (a * b) : (- a))\n"
    "assert((a != 0) || (! (b == 1)))\n"
    "out1 = ((out0 - 1) + (a <= b))\n"
)
inputs = {"a": 3, "b": 4}

for name in sorted(BACKENDS):
    print(f"===== {name} =====")
    try:
        unit = translate(c, name)
    except ValidationError as exc:
        print(f"rejected: {exc}\n")
        continue
    print(unit.source)
    print("inputs:", encode_inputs(c, inputs, name).decode(), "\n")
