"""circom: one ``main_template`` with witness-only (``<--``) assignments."""

from __future__ import annotations

from typing import Mapping

from ..il import ALL_OPS, Assign, Binary, Circuit, Conditional, Unary, print_expr

# circom has no logical xor; everything else maps onto its own operators.
SUPPORTED_OPS = ALL_OPS - {"lxor"}

DEFAULT_VERSION = "2.0.6"


def _strip(e) -> str:
    text = print_expr(e)
    return text[1:-1] if isinstance(e, (Unary, Binary, Conditional)) else text


def emit(c: Circuit, opts: Mapping) -> str:
    version = opts.get("circom_version", DEFAULT_VERSION)
    lines = [f"pragma circom {version};", "", "template main_template() {"]
    if c.inputs:
        lines.append(f"  signal input {', '.join(c.input_names)};")
    if c.outputs:
        lines.append(f"  signal output {', '.join(c.outputs)};")
    for stmt in c.body:
        if isinstance(stmt, Assign):
            lines.append(f"  {stmt.target} <-- {print_expr(stmt.rhs)};")
        else:
            lines.append(f"  assert({_strip(stmt.cond)});")
    lines.append("}")
    public = [i.name for i in c.inputs if i.visibility == "public"]
    if public:
        lines.append(f"component main {{public [{', '.join(public)}]}} = main_template();")
    else:
        lines.append("component main = main_template();")
    return "\n".join(lines) + "\n"
