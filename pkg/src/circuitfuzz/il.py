"""The circuit intermediate language: AST, parser, printer and validation.

Concrete syntax, one statement per line::

    inputs : in0, pub in1
    outputs: out0
    out0 = (~ in1)
    assert(in0 != in1)

Inputs are private unless prefixed with ``pub``. The printer emits fully
parenthesized expressions so output is byte-stable and reparses to the
identical AST. The same expression grammar, extended with ``?hole`` and
``$random`` placeholders, is used by the rewrite-rule DSL.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

# --- operators --------------------------------------------------------------

UNARY_SYMBOLS = {"neg": "-", "complement": "~", "not": "!"}
BINARY_SYMBOLS = {
    "add": "+", "sub": "-", "mul": "*", "div": "/", "mod": "%", "pow": "**",
    "and": "&", "or": "|", "xor": "^",
    "land": "&&", "lor": "||", "lxor": "^^",
    "eq": "==", "neq": "!=", "lt": "<", "le": "<=", "gt": ">", "ge": ">=",
}
COND = "cond"

COMPARISONS = frozenset({"eq", "neq", "lt", "le", "gt", "ge"})
BOOLEAN_BINARY = frozenset({"land", "lor", "lxor"})
BOOL_RESULT_BINARY = COMPARISONS | BOOLEAN_BINARY

ALL_OPS = frozenset(UNARY_SYMBOLS) | frozenset(BINARY_SYMBOLS) | {COND}
OperatorSet = frozenset

_UNARY_BY_SYMBOL = {v: k for k, v in UNARY_SYMBOLS.items()}
_BINARY_BY_SYMBOL = {v: k for k, v in BINARY_SYMBOLS.items()}

# Binary precedence levels, loosest first; ternary sits below all of them.
_LEVELS = [
    ("lor",),
    ("lxor",),
    ("land",),
    ("eq", "neq", "lt", "le", "gt", "ge"),
    ("or",),
    ("xor",),
    ("and",),
    ("add", "sub"),
    ("mul", "div", "mod"),
]

# --- AST --------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Const:
    value: int


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class Unary:
    op: str
    operand: "Expr"


@dataclass(frozen=True, slots=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True, slots=True)
class Conditional:
    cond: "Expr"
    then: "Expr"
    other: "Expr"


@dataclass(frozen=True, slots=True)
class Hole:
    """Rule-pattern placeholder ``?name`` or ``?name:bool``."""

    name: str
    type: str = "field"


@dataclass(frozen=True, slots=True)
class RandomConst:
    """Rule-template placeholder ``$name`` drawn fresh per application."""

    name: str
    type: str = "field"


Expr = Union[Const, Var, Unary, Binary, Conditional, Hole, RandomConst]


@dataclass(frozen=True, slots=True)
class Assign:
    target: str
    rhs: Expr


@dataclass(frozen=True, slots=True)
class Assert:
    cond: Expr


Statement = Union[Assign, Assert]


@dataclass(frozen=True, slots=True)
class Input:
    name: str
    visibility: str = "private"


@dataclass(frozen=True)
class Circuit:
    inputs: tuple[Input, ...]
    outputs: tuple[str, ...]
    body: tuple[Statement, ...]

    @property
    def input_names(self) -> list[str]:
        return [i.name for i in self.inputs]

    def expressions(self) -> Iterator[tuple[int, Expr]]:
        for idx, stmt in enumerate(self.body):
            yield idx, stmt.rhs if isinstance(stmt, Assign) else stmt.cond

    def replace_statement_expr(self, idx: int, expr: Expr) -> "Circuit":
        stmt = self.body[idx]
        new = Assign(stmt.target, expr) if isinstance(stmt, Assign) else Assert(expr)
        return Circuit(self.inputs, self.outputs, self.body[:idx] + (new,) + self.body[idx + 1:])

    def __str__(self):
        return print_circuit(self)


# --- errors -----------------------------------------------------------------


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class ValidationError(ValueError):
    """A well-formedness violation; ``kind`` names the violated rule."""

    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind

    def __eq__(self, other):
        return isinstance(other, ValidationError) and (self.kind, str(self)) == (other.kind, str(other))

    def __hash__(self):
        return hash((self.kind, str(self)))


# --- tree utilities ---------------------------------------------------------


def children(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, Unary):
        return (e.operand,)
    if isinstance(e, Binary):
        return (e.left, e.right)
    if isinstance(e, Conditional):
        return (e.cond, e.then, e.other)
    return ()


def with_children(e: Expr, kids: tuple[Expr, ...]) -> Expr:
    if isinstance(e, Unary):
        return Unary(e.op, kids[0])
    if isinstance(e, Binary):
        return Binary(e.op, kids[0], kids[1])
    if isinstance(e, Conditional):
        return Conditional(*kids)
    return e


def subexpressions(e: Expr, path: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], Expr]]:
    """Pre-order walk yielding ``(path, node)``."""
    yield path, e
    for i, kid in enumerate(children(e)):
        yield from subexpressions(kid, path + (i,))


def get_at(e: Expr, path: tuple[int, ...]) -> Expr:
    for i in path:
        e = children(e)[i]
    return e


def replace_at(e: Expr, path: tuple[int, ...], new: Expr) -> Expr:
    if not path:
        return new
    kids = list(children(e))
    kids[path[0]] = replace_at(kids[path[0]], path[1:], new)
    return with_children(e, tuple(kids))


def size(e: Expr) -> int:
    return 1 + sum(size(k) for k in children(e))


def depth(e: Expr) -> int:
    kids = children(e)
    return 1 + max(depth(k) for k in kids) if kids else 0


def operators(e: Expr) -> set[str]:
    ops = set()
    for _, node in subexpressions(e):
        if isinstance(node, (Unary, Binary)):
            ops.add(node.op)
        elif isinstance(node, Conditional):
            ops.add(COND)
    return ops


def circuit_size(c: Circuit) -> int:
    return sum(size(e) for _, e in c.expressions())


# --- Boolean inference -------------------------------------------------------


def infer_bool(e: Expr) -> str:
    """Return ``"bool"`` if ``e`` is syntactically known to be 0/1, else ``"field"``."""
    if isinstance(e, Const):
        return "bool" if e.value in (0, 1) else "field"
    if isinstance(e, (Hole, RandomConst)):
        return e.type
    if isinstance(e, Binary):
        return "bool" if e.op in BOOL_RESULT_BINARY else "field"
    if isinstance(e, Unary):
        return "bool" if e.op == "not" else "field"
    if isinstance(e, Conditional):
        if infer_bool(e.then) == "bool" and infer_bool(e.other) == "bool":
            return "bool"
    return "field"


def is_bool(e: Expr) -> bool:
    return infer_bool(e) == "bool"


def bool_contexts(e: Expr, needs_bool: bool, path: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], Expr, bool]]:
    """Pre-order walk yielding ``(path, node, must_be_bool)``.

    A node must be Boolean-typed when it is an assertion, a conditional guard,
    an operand of ``!``/``&&``/``||``/``^^``, or a branch of a conditional that
    itself sits in a Boolean context.
    """
    yield path, e, needs_bool
    if isinstance(e, Unary):
        yield from bool_contexts(e.operand, e.op == "not", path + (0,))
    elif isinstance(e, Binary):
        b = e.op in BOOLEAN_BINARY
        yield from bool_contexts(e.left, b, path + (0,))
        yield from bool_contexts(e.right, b, path + (1,))
    elif isinstance(e, Conditional):
        yield from bool_contexts(e.cond, True, path + (0,))
        yield from bool_contexts(e.then, needs_bool, path + (1,))
        yield from bool_contexts(e.other, needs_bool, path + (2,))


# --- validation -------------------------------------------------------------


def validate(c: Circuit, allowed_ops: frozenset[str] | None = None) -> list[ValidationError]:
    errors: list[ValidationError] = []
    seen: set[str] = set()
    for name in c.input_names + list(c.outputs):
        if name in seen:
            errors.append(ValidationError("DuplicateName", f"{name!r} declared twice"))
        seen.add(name)

    outputs = set(c.outputs)
    defined = set(c.input_names)
    assigned: set[str] = set()
    for idx, stmt in enumerate(c.body):
        expr = stmt.rhs if isinstance(stmt, Assign) else stmt.cond
        for _, node in subexpressions(expr):
            if isinstance(node, Var) and node.name not in defined:
                kind = "UseBeforeAssign" if node.name in outputs else "UnknownVariable"
                errors.append(ValidationError(kind, f"statement {idx} reads {node.name!r}"))
            elif isinstance(node, (Hole, RandomConst)):
                errors.append(ValidationError("UnexpectedPlaceholder", f"statement {idx} contains a rule placeholder"))
        for path, node, must_bool in bool_contexts(expr, isinstance(stmt, Assert)):
            if must_bool and not is_bool(node):
                kind = "NonBooleanAssertion" if not path and isinstance(stmt, Assert) else "NonBooleanOperand"
                errors.append(ValidationError(kind, f"statement {idx} at {list(path)}: {print_expr(node)}"))
        if allowed_ops is not None:
            for op in sorted(operators(expr) - set(allowed_ops)):
                errors.append(ValidationError("UnsupportedOperator", f"statement {idx} uses {op!r}"))
        if isinstance(stmt, Assign):
            if stmt.target not in outputs:
                errors.append(ValidationError("AssignToNonOutput", f"{stmt.target!r} is not a declared output"))
            elif stmt.target in assigned:
                errors.append(ValidationError("MultipleAssignment", f"{stmt.target!r} assigned twice"))
            assigned.add(stmt.target)
            defined.add(stmt.target)
    for name in c.outputs:
        if name not in assigned:
            errors.append(ValidationError("UnassignedOutput", f"{name!r} is never assigned"))
    return errors


def check(c: Circuit, allowed_ops: frozenset[str] | None = None) -> Circuit:
    errs = validate(c, allowed_ops)
    if errs:
        raise errs[0]
    return c


# --- printer ----------------------------------------------------------------


def print_expr(e: Expr) -> str:
    if isinstance(e, Const):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Hole):
        return f"?{e.name}" + (":bool" if e.type == "bool" else "")
    if isinstance(e, RandomConst):
        return f"${e.name}" + (":bool" if e.type == "bool" else "")
    if isinstance(e, Unary):
        return f"({UNARY_SYMBOLS[e.op]} {print_expr(e.operand)})"
    if isinstance(e, Binary):
        return f"({print_expr(e.left)} {BINARY_SYMBOLS[e.op]} {print_expr(e.right)})"
    if isinstance(e, Conditional):
        return f"({print_expr(e.cond)} ? {print_expr(e.then)} : {print_expr(e.other)})"
    raise TypeError(f"not an expression: {e!r}")


def print_circuit(c: Circuit) -> str:
    ins = ", ".join(i.name if i.visibility == "private" else f"pub {i.name}" for i in c.inputs)
    lines = ["inputs :" + (f" {ins}" if ins else ""), "outputs:" + (f" {', '.join(c.outputs)}" if c.outputs else "")]
    for stmt in c.body:
        if isinstance(stmt, Assign):
            lines.append(f"{stmt.target} = {print_expr(stmt.rhs)}")
        else:
            text = print_expr(stmt.cond)
            if isinstance(stmt.cond, (Unary, Binary, Conditional)):
                text = text[1:-1]
            lines.append(f"assert({text})")
    return "\n".join(lines)


# --- lexer / parser ----------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<hole>\?[A-Za-z_]\w*(?::(?:bool|field)\b)?)
  | (?P<rand>\$[A-Za-z_]\w*(?::(?:bool|field)\b)?)
  | (?P<num>\d+)
  | (?P<name>[A-Za-z_]\w*)
  | (?P<op>\*\*|\^\^|&&|\|\||==|!=|<=|>=|[-+*/%&|^~!<>?:(),=])
    """,
    re.VERBOSE,
)


@dataclass(slots=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str, line: int = 1, placeholders: bool = False) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos + 1)
        kind = m.lastgroup
        if kind in ("hole", "rand") and not placeholders:
            # Outside rules, '?' is always the ternary operator.
            toks.append(_Tok("op", text[pos], line, pos + 1))
            pos += 1
            continue
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), line, pos + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, len(text) + 1))
    return toks


class _ExprParser:
    def __init__(self, toks: list[_Tok]):
        self.toks = toks
        self.i = 0

    @property
    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> _Tok:
        tok = self.take()
        if tok.text != text:
            found = tok.text or "end of line"
            raise ParseError(f"expected {text!r}, found {found!r}", tok.line, tok.col)
        return tok

    def at_op(self, *texts: str) -> bool:
        return self.peek.kind == "op" and self.peek.text in texts

    def expr(self) -> Expr:
        cond = self.binary(0)
        if self.at_op("?"):
            self.take()
            then = self.expr()
            self.expect(":")
            other = self.expr()
            return Conditional(cond, then, other)
        return cond

    def binary(self, level: int) -> Expr:
        if level == len(_LEVELS):
            return self.unary()
        names = _LEVELS[level]
        left = self.binary(level + 1)
        while self.peek.kind == "op" and _BINARY_BY_SYMBOL.get(self.peek.text) in names:
            op = _BINARY_BY_SYMBOL[self.take().text]
            left = Binary(op, left, self.binary(level + 1))
        return left

    def unary(self) -> Expr:
        if self.peek.kind == "op" and self.peek.text in _UNARY_BY_SYMBOL:
            op = _UNARY_BY_SYMBOL[self.take().text]
            return Unary(op, self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        if self.at_op("**"):
            self.take()
            return Binary("pow", base, self.unary())
        return base

    def primary(self) -> Expr:
        tok = self.take()
        if tok.kind == "num":
            return Const(int(tok.text))
        if tok.kind == "name":
            return Var(tok.text)
        if tok.kind in ("hole", "rand"):
            name, _, typ = tok.text[1:].partition(":")
            cls = Hole if tok.kind == "hole" else RandomConst
            return cls(name, typ or "field")
        if tok.text == "(":
            e = self.expr()
            self.expect(")")
            return e
        found = tok.text or "end of line"
        raise ParseError(f"unexpected {found!r}", tok.line, tok.col)

    def finish(self):
        if self.peek.kind != "eof":
            raise ParseError(f"trailing input {self.peek.text!r}", self.peek.line, self.peek.col)


def parse_expr(text: str, placeholders: bool = False, line: int = 1) -> Expr:
    p = _ExprParser(_tokenize(text, line, placeholders))
    e = p.expr()
    p.finish()
    return e


_HEADER_RE = re.compile(r"^\s*(inputs|outputs)\s*:(.*)$")


def _parse_header(line: str, lineno: int, key: str) -> list[str]:
    m = _HEADER_RE.match(line)
    if not m or m.group(1) != key:
        raise ParseError(f"expected '{key}:' header", lineno, 1)
    body = m.group(2).strip()
    return [n.strip() for n in body.split(",")] if body else []


def parse_circuit(text: str, validate_result: bool = True) -> Circuit:
    lines = [(n, ln.split("#", 1)[0].rstrip()) for n, ln in enumerate(text.splitlines(), 1)]
    lines = [(n, ln) for n, ln in lines if ln.strip()]
    if len(lines) < 2:
        raise ParseError("a circuit needs 'inputs:' and 'outputs:' headers", len(lines) + 1, 1)

    inputs = []
    for item in _parse_header(lines[0][1], lines[0][0], "inputs"):
        parts = item.split()
        if len(parts) == 2 and parts[0] in ("pub", "public"):
            inputs.append(Input(parts[1], "public"))
        elif len(parts) == 1 and re.fullmatch(r"[A-Za-z_]\w*", parts[0]):
            inputs.append(Input(parts[0]))
        else:
            raise ParseError(f"bad input declaration {item!r}", lines[0][0], 1)
    outputs = _parse_header(lines[1][1], lines[1][0], "outputs")
    for name in outputs:
        if not re.fullmatch(r"[A-Za-z_]\w*", name):
            raise ParseError(f"bad output name {name!r}", lines[1][0], 1)

    body: list[Statement] = []
    for lineno, line in lines[2:]:
        toks = _tokenize(line, lineno)
        p = _ExprParser(toks)
        if toks[0].kind == "name" and toks[0].text == "assert" and toks[1].text == "(":
            p.take()
            p.expect("(")
            cond = p.expr()
            p.expect(")")
            p.finish()
            body.append(Assert(cond))
        elif toks[0].kind == "name" and toks[1].text == "=":
            p.i = 2
            rhs = p.expr()
            p.finish()
            body.append(Assign(toks[0].text, rhs))
        else:
            raise ParseError("expected 'name = expr' or 'assert(expr)'", lineno, toks[0].col)

    c = Circuit(tuple(inputs), tuple(outputs), tuple(body))
    if validate_result:
        check(c)
    return c
