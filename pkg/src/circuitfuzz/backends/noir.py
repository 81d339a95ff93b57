"""noir: ``fn main`` over ``Field`` parameters returning the outputs.

noir is strongly typed, so each expression is emitted at the type its
context wants: Boolean-valued subterms become ``bool`` and are cast with
``as Field`` where a field element is expected.
"""

from __future__ import annotations

from typing import Mapping

from ..field import FieldConfig
from ..il import Assert, Assign, Binary, Circuit, Conditional, Const, Expr, Unary, Var

SUPPORTED_OPS = frozenset({
    "add", "sub", "mul", "div", "neg", "not",
    "land", "lor", "lxor",
    "eq", "neq", "lt", "le", "gt", "ge", "cond",
})

_ARITH = {"add": "+", "sub": "-", "mul": "*", "div": "/"}
_LOGIC = {"land": "&", "lor": "|", "lxor": "^"}


def expr(e: Expr, want_bool: bool = False) -> str:
    if isinstance(e, Const):
        if want_bool:
            return "true" if e.value == 1 else "false"
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Conditional):
        return (f"(if {expr(e.cond, True)} {{ {expr(e.then, want_bool)} }} "
                f"else {{ {expr(e.other, want_bool)} }})")
    text, is_bool = _natural(e)
    if is_bool and not want_bool:
        return f"({text} as Field)"
    return text


def _natural(e: Expr) -> tuple[str, bool]:
    if isinstance(e, Unary):
        if e.op == "neg":
            return f"(- {expr(e.operand)})", False
        if e.op == "not":
            return f"(! {expr(e.operand, True)})", True
    elif isinstance(e, Binary):
        if e.op in _ARITH:
            return f"({expr(e.left)} {_ARITH[e.op]} {expr(e.right)})", False
        if e.op in _LOGIC:
            return f"({expr(e.left, True)} {_LOGIC[e.op]} {expr(e.right, True)})", True
        a, b = expr(e.left), expr(e.right)
        if e.op == "eq":
            return f"({a} == {b})", True
        if e.op == "neq":
            return f"({a} != {b})", True
        if e.op == "lt":
            return f"{a}.lt({b})", True
        if e.op == "gt":
            return f"{b}.lt({a})", True
        if e.op == "le":
            return f"(! {b}.lt({a}))", True
        if e.op == "ge":
            return f"(! {a}.lt({b}))", True
    raise ValueError(f"noir has no mapping for {e!r}")


def emit(c: Circuit, opts: Mapping) -> str:
    params = ", ".join(f"{i.name}: {'pub ' if i.visibility == 'public' else ''}Field" for i in c.inputs)
    if len(c.outputs) == 1:
        ret = " -> pub Field"
    elif c.outputs:
        ret = f" -> pub ({', '.join('Field' for _ in c.outputs)})"
    else:
        ret = ""
    lines = [f"fn main({params}){ret} {{"]
    for stmt in c.body:
        if isinstance(stmt, Assign):
            lines.append(f"    let {stmt.target}: Field = {expr(stmt.rhs)};")
        elif isinstance(stmt, Assert):
            lines.append(f"    assert({expr(stmt.cond, True)});")
    if len(c.outputs) == 1:
        lines.append(f"    {c.outputs[0]}")
    elif c.outputs:
        lines.append(f"    ({', '.join(c.outputs)})")
    lines.append("}")
    return "\n".join(lines) + "\n"


def encode(c: Circuit, inputs: Mapping[str, int], cfg: FieldConfig) -> bytes:
    return "".join(f'{n} = "{int(inputs[n])}"\n' for n in c.input_names).encode()
