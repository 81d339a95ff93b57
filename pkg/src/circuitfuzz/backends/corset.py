"""corset: columns and ``defconstraint`` forms over a one-row trace.

corset has no outputs, so every output becomes an extra column pinned to its
defining expression. Booleans are encoded as 0/1 field values throughout,
which keeps the lowering independent of corset's zero-is-true conventions.
"""

from __future__ import annotations

import json
from typing import Mapping

from ..field import FieldConfig
from ..il import Assert, Assign, Binary, Circuit, Conditional, Const, Expr, Unary, Var

SUPPORTED_OPS = frozenset({
    "add", "sub", "mul", "neg", "not",
    "land", "lor", "lxor", "eq", "neq", "cond",
})


def expr(e: Expr) -> str:
    if isinstance(e, Const):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Unary):
        a = expr(e.operand)
        if e.op == "neg":
            return f"(- 0 {a})"
        if e.op == "not":
            return f"(- 1 {a})"
    if isinstance(e, Binary):
        a, b = expr(e.left), expr(e.right)
        if e.op == "add":
            return f"(+ {a} {b})"
        if e.op in ("sub",):
            return f"(- {a} {b})"
        if e.op in ("mul", "land"):
            return f"(* {a} {b})"
        if e.op == "lor":
            return f"(- (+ {a} {b}) (* {a} {b}))"
        if e.op == "lxor":
            return f"(- (+ {a} {b}) (* 2 (* {a} {b})))"
        if e.op == "eq":
            return f"(is-zero (- {a} {b}))"
        if e.op == "neq":
            return f"(- 1 (is-zero (- {a} {b})))"
    if isinstance(e, Conditional):
        # if-zero takes its first branch when the guard is 0.
        return f"(if-zero {expr(e.cond)} {expr(e.other)} {expr(e.then)})"
    raise ValueError(f"corset has no mapping for {e!r}")


def emit(c: Circuit, opts: Mapping) -> str:
    columns = c.input_names + list(c.outputs)
    lines = [f"(defcolumns {' '.join(columns)})" if columns else "(defcolumns)"]
    n_assert = 0
    for stmt in c.body:
        if isinstance(stmt, Assign):
            lines.append(f"(defconstraint def-{stmt.target} () (vanishes! (- {stmt.target} {expr(stmt.rhs)})))")
        elif isinstance(stmt, Assert):
            lines.append(f"(defconstraint assert{n_assert} () (vanishes! (- 1 {expr(stmt.cond)})))")
            n_assert += 1
    return "\n".join(lines) + "\n"


def encode(c: Circuit, inputs: Mapping[str, int], cfg: FieldConfig) -> bytes:
    """A one-row JSON trace: inputs plus reference-evaluated output columns.

    Output columns are omitted when the reference evaluation does not yield
    a witness; the check stage then reports the missing columns.
    """
    from ..evaluator import Witness, evaluate

    columns = {n: [str(int(inputs[n]))] for n in c.input_names}
    result = evaluate(c, inputs, cfg)
    if isinstance(result, Witness):
        for name in c.outputs:
            columns[name] = [str(result.values[name])]
    return json.dumps({"columns": columns}).encode()
