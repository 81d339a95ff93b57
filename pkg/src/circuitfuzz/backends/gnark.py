"""gnark: a ``Define`` method over ``frontend.API`` plus a Go harness.

gnark has no output signals, so outputs become local variables printed with
``api.Println`` for witness extraction. Booleans are 0/1 variables; the
relational operators are built from ``api.Cmp`` and ``api.IsZero``.
"""

from __future__ import annotations

from typing import Mapping

from ..field import FieldConfig
from ..il import Assert, Assign, Binary, Circuit, Conditional, Const, Expr, Unary, Var

SUPPORTED_OPS = frozenset({
    "add", "sub", "mul", "div", "neg", "not",
    "and", "or", "xor", "land", "lor", "lxor",
    "eq", "neq", "lt", "le", "gt", "ge", "cond",
})

_CALLS = {
    "add": "api.Add", "sub": "api.Sub", "mul": "api.Mul", "div": "api.Div",
    "and": "api.And", "or": "api.Or", "xor": "api.Xor",
    "land": "api.And", "lor": "api.Or", "lxor": "api.Xor",
}

_INT64_MAX = 2**63 - 1


def field_name(name: str) -> str:
    return name[:1].upper() + name[1:]


def _const(v: int) -> str:
    return str(v) if v <= _INT64_MAX else f'"{v}"'


def expr(e: Expr, outputs: frozenset[str] = frozenset()) -> str:
    def go(e: Expr) -> str:
        if isinstance(e, Const):
            return _const(e.value)
        if isinstance(e, Var):
            return e.name if e.name in outputs else f"circuit.{field_name(e.name)}"
        if isinstance(e, Unary):
            a = go(e.operand)
            if e.op == "neg":
                return f"api.Neg({a})"
            if e.op == "not":
                return f"api.Sub(1, {a})"
            raise ValueError(f"gnark has no mapping for {e.op!r}")
        if isinstance(e, Binary):
            a, b = go(e.left), go(e.right)
            if e.op in _CALLS:
                return f"{_CALLS[e.op]}({a}, {b})"
            if e.op == "eq":
                return f"api.IsZero(api.Sub({a}, {b}))"
            if e.op == "neq":
                return f"api.Sub(1, api.IsZero(api.Sub({a}, {b})))"
            # api.Cmp returns -1, 0 or 1.
            if e.op == "lt":
                return f"api.IsZero(api.Add(api.Cmp({a}, {b}), 1))"
            if e.op == "gt":
                return f"api.IsZero(api.Sub(api.Cmp({a}, {b}), 1))"
            if e.op == "le":
                return f"api.Sub(1, api.IsZero(api.Sub(api.Cmp({a}, {b}), 1)))"
            if e.op == "ge":
                return f"api.Sub(1, api.IsZero(api.Add(api.Cmp({a}, {b}), 1)))"
            raise ValueError(f"gnark has no mapping for {e.op!r}")
        if isinstance(e, Conditional):
            return f"api.Select({go(e.cond)}, {go(e.then)}, {go(e.other)})"
        raise TypeError(f"cannot translate {e!r}")

    return go(e)


def _assertion(cond: Expr, outputs: frozenset[str]) -> str:
    if isinstance(cond, Binary):
        a, b = expr(cond.left, outputs), expr(cond.right, outputs)
        if cond.op == "le":
            return f"api.AssertIsLessOrEqual({a}, {b})"
        if cond.op == "ge":
            return f"api.AssertIsLessOrEqual({b}, {a})"
        if cond.op == "eq":
            return f"api.AssertIsEqual({a}, {b})"
        if cond.op == "neq":
            return f"api.AssertIsDifferent({a}, {b})"
    return f"api.AssertIsEqual({expr(cond, outputs)}, 1)"


def emit(c: Circuit, opts: Mapping) -> str:
    lines = [
        "package main",
        "",
        'import "github.com/consensys/gnark/frontend"',
        "",
        "type Circuit struct {",
    ]
    for i in c.inputs:
        tag = "public" if i.visibility == "public" else "secret"
        lines.append(f'\t{field_name(i.name)} frontend.Variable `gnark:",{tag}"`')
    lines += ["}", "", "func (circuit *Circuit) Define(api frontend.API) error {"]
    assigned: set[str] = set()
    for stmt in c.body:
        if isinstance(stmt, Assign):
            lines.append(f"\t{stmt.target} := {expr(stmt.rhs, frozenset(assigned))}")
            lines.append(f'\tapi.Println("{stmt.target}", {stmt.target})')
            assigned.add(stmt.target)
        elif isinstance(stmt, Assert):
            lines.append(f"\t{_assertion(stmt.cond, frozenset(assigned))}")
    lines += ["\treturn nil", "}"]
    return "\n".join(lines) + "\n"


def encode(c: Circuit, inputs: Mapping[str, int], cfg: FieldConfig) -> bytes:
    """A Go test harness whose assignment literal carries the inputs."""
    fields = "".join(f'\t\t{field_name(n)}: "{int(inputs[n])}",\n' for n in c.input_names)
    text = (
        "package main\n"
        "\n"
        "import (\n"
        '\t"github.com/consensys/gnark-crypto/ecc"\n'
        '\t"github.com/consensys/gnark/backend/groth16"\n'
        '\t"github.com/consensys/gnark/frontend"\n'
        '\t"github.com/consensys/gnark/frontend/cs/r1cs"\n'
        ")\n"
        "\n"
        "func main() {\n"
        "\tvar circuit Circuit\n"
        "\tccs, err := frontend.Compile(ecc.BN254.ScalarField(), r1cs.NewBuilder, &circuit)\n"
        "\tif err != nil {\n\t\tpanic(err)\n\t}\n"
        "\tassignment := &Circuit{\n"
        f"{fields}"
        "\t}\n"
        "\twitness, err := frontend.NewWitness(assignment, ecc.BN254.ScalarField())\n"
        "\tif err != nil {\n\t\tpanic(err)\n\t}\n"
        "\tpk, vk, err := groth16.Setup(ccs)\n"
        "\tif err != nil {\n\t\tpanic(err)\n\t}\n"
        "\tproof, err := groth16.Prove(ccs, pk, witness)\n"
        "\tif err != nil {\n\t\tpanic(err)\n\t}\n"
        "\tpublicWitness, _ := witness.Public()\n"
        "\tif err := groth16.Verify(proof, vk, publicWitness); err != nil {\n\t\tpanic(err)\n\t}\n"
        "}\n"
    )
    return text.encode()
