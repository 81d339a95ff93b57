from __future__ import annotations

import pytest

from circuitfuzz import BN254, parse_circuit

P = BN254.prime

NOT_P_TEXT = f"""inputs : in0, in1
outputs: out0
out0 = (~ {P})
assert(in0 != in1)
"""

NOT_P_REWRITTEN_TEXT = f"""inputs : in0, in1
outputs: out0
out0 = (~ (((1 - 0) / 1) * {P}))
assert(in0 != in1)
"""


@pytest.fixture
def not_p():
    return parse_circuit(NOT_P_TEXT)


@pytest.fixture
def not_p_rewritten():
    return parse_circuit(NOT_P_REWRITTEN_TEXT)
