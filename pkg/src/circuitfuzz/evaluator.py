"""Reference interpreter for IL circuits.

The default :class:`SemanticsVariant` is the ground truth used to verify
rewrite rules and to decide whether generated inputs are SAT. The fault
switches turn the same interpreter into a reproducible buggy pipeline, each
one mimicking a class of logic bug seen in real ZK toolchains.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from typing import Mapping, Union

from . import field as F
from .field import FieldConfig
from .il import Assign, Binary, Circuit, Conditional, Const, Expr, Unary, Var

InputAssignment = Mapping[str, int]


@dataclass(frozen=True)
class Witness:
    values: dict[str, int]

    def to_json(self) -> dict:
        return {"result": "witness", "outputs": {k: str(v) for k, v in self.values.items()}}


@dataclass(frozen=True)
class AssertionViolated:
    index: int  # position among the circuit's assertions

    def to_json(self) -> dict:
        return {"result": "assertion-violated", "index": self.index}


@dataclass(frozen=True)
class EvalError:
    error_class: str  # "DivisionByZero" or "TypeError"
    statement: int
    path: tuple[int, ...]

    def to_json(self) -> dict:
        return {"result": "error", "class": self.error_class, "statement": self.statement, "path": list(self.path)}


EvalResult = Union[Witness, AssertionViolated, EvalError]


@dataclass(frozen=True)
class SemanticsVariant:
    """Evaluation semantics; every switch off (the default) is the correct one.

    canonicalize_constants
        When false, literal constants reach every operator that looks at the
        integer representative (bitwise ops, comparisons, ``%``) unreduced,
        so ``~ p`` differs from ``~ 0`` (constants not taken mod p).
    constant_complement
        Complement of a literal constant ``c`` is computed as ``p - 1 - c``
        instead of flipping its n bits (complement of constants mishandled).
    zero_complement
        Complement of a *computed* zero yields 0 while a literal ``0`` is
        complemented correctly (sign handling of zero operands).
    le_constant_lhs
        ``c <= e`` with a literal ``c`` and a non-literal ``e`` is taken as
        true (constant special-casing in a less-or-equal check).
    or_constant_operand
        Bitwise ``|`` with exactly one literal operand is evaluated as
        addition (inconsistent constant/signal handling).
    expansion_conditionals
        Under the ``expanded`` pipeline mode, conditionals nested inside
        another operator take the wrong branch. Only reachable through
        settings metamorphosis.
    prover_capacity
        The stand-in prover fails on circuits with more AST nodes than this
        (undersized proving parameters); ``None`` disables the fault.
    """

    canonicalize_constants: bool = True
    constant_complement: bool = False
    zero_complement: bool = False
    le_constant_lhs: bool = False
    or_constant_operand: bool = False
    expansion_conditionals: bool = False
    prover_capacity: int | None = None

    @property
    def is_default(self) -> bool:
        return self == SemanticsVariant()

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: Mapping | None) -> "SemanticsVariant":
        data = dict(data or {})
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown semantics switches: {sorted(unknown)}")
        return cls(**data)


DEFAULT = SemanticsVariant()

# The campaign fault catalogue. ``zero_complement`` is left out: it needs a
# literal and a computed zero under ``~`` in the two circuits of a pair, which
# default campaigns hit too rarely to serve as a detection benchmark.
FAULTS = {
    "raw-constants": SemanticsVariant(canonicalize_constants=False),
    "constant-complement": SemanticsVariant(constant_complement=True),
    "le-constant-lhs": SemanticsVariant(le_constant_lhs=True),
    "or-constant-operand": SemanticsVariant(or_constant_operand=True),
    "expansion-conditionals": SemanticsVariant(expansion_conditionals=True),
    "prover-capacity": SemanticsVariant(prover_capacity=40),
}


# Operators whose result depends on the integer representative of an operand.
_RAW_SENSITIVE = frozenset(F.CMP_OPS) | {"mod"}


class _Fault(Exception):
    def __init__(self, error_class: str, path: tuple[int, ...]):
        self.error_class = error_class
        self.path = path


class _Interp:
    def __init__(self, cfg: FieldConfig, variant: SemanticsVariant, mode: str):
        self.cfg = cfg
        self.p = cfg.prime
        self.v = variant
        self.expanded = mode == "expanded" and variant.expansion_conditionals
        self.env: dict[str, int] = {}

    def eval(self, e: Expr, path: tuple[int, ...], nested: bool = False) -> int:
        # Results are canonical except literal constants when
        # canonicalize_constants is off; consumers reduce as needed.
        if isinstance(e, Const):
            return e.value % self.p if self.v.canonicalize_constants else e.value
        if isinstance(e, Var):
            return self.env[e.name]
        try:
            if isinstance(e, Unary):
                a = self.eval(e.operand, path + (0,), True)
                if e.op == "complement":
                    if self.v.constant_complement and isinstance(e.operand, Const):
                        return (self.p - 1 - a % self.p) % self.p
                    if self.v.zero_complement and a % self.p == 0 and not isinstance(e.operand, Const):
                        return 0
                    return F.unop("complement", a, self.cfg)
                return F.unop(e.op, a % self.p, self.cfg)
            if isinstance(e, Binary):
                a = self.eval(e.left, path + (0,), True)
                b = self.eval(e.right, path + (1,), True)
                return self.binary(e, a, b)
            if isinstance(e, Conditional):
                c = self.eval(e.cond, path + (0,), True) % self.p
                t = self.eval(e.then, path + (1,), True) % self.p
                o = self.eval(e.other, path + (2,), True) % self.p
                if c not in (0, 1):
                    raise F.NonBooleanOperand(f"conditional guard {c}")
                if self.expanded and nested:
                    c = 1 - c
                return t if c else o
        except F.DivisionByZero:
            raise _Fault("DivisionByZero", path) from None
        except F.NonBooleanOperand:
            raise _Fault("TypeError", path) from None
        raise TypeError(f"cannot evaluate {e!r}")

    def binary(self, e: Binary, a: int, b: int) -> int:
        op, p, v = e.op, self.p, self.v
        if op in F.BIT_OPS:
            if op == "or" and v.or_constant_operand and isinstance(e.left, Const) != isinstance(e.right, Const):
                return (a + b) % p
            return F.bit_binop(op, a, b, self.cfg)
        if v.canonicalize_constants or op not in _RAW_SENSITIVE:
            a %= p
            b %= p
        if op in F.ARITH_OPS:
            return F.arith_binop(op, a, b, self.cfg)
        if op in F.CMP_OPS:
            if op == "le" and v.le_constant_lhs and isinstance(e.left, Const) and not isinstance(e.right, Const):
                return 1
            return F.cmp_binop(op, a, b)
        return F.bool_binop(op, a, b)


def evaluate(
    c: Circuit,
    inputs: InputAssignment,
    cfg: FieldConfig,
    variant: SemanticsVariant = DEFAULT,
    mode: str = "native",
) -> EvalResult:
    """Run ``c`` on ``inputs``; statements execute in order, first failure wins.

    Both branches of a conditional are evaluated, so an error in the untaken
    branch still surfaces. ``mode`` is the pipeline setting consulted by the
    ``expansion_conditionals`` fault.
    """
    it = _Interp(cfg, variant, mode)
    missing = set(c.input_names) - set(inputs)
    if missing:
        raise KeyError(f"missing inputs: {sorted(missing)}")
    it.env = {name: inputs[name] % cfg.prime for name in c.input_names}
    n_assert = 0
    for idx, stmt in enumerate(c.body):
        try:
            if isinstance(stmt, Assign):
                it.env[stmt.target] = it.eval(stmt.rhs, ()) % cfg.prime
            elif it.eval(stmt.cond, ()) % cfg.prime == 0:
                return AssertionViolated(n_assert)
            else:
                n_assert += 1
        except _Fault as f:
            return EvalError(f.error_class, idx, f.path)
        except RecursionError:
            return EvalError("TypeError", idx, ())
    return Witness({name: it.env[name] for name in c.outputs})


def is_sat(c: Circuit, inputs: InputAssignment, cfg: FieldConfig) -> bool:
    return isinstance(evaluate(c, inputs, cfg), Witness)


def same_behavior(r1: EvalResult, r2: EvalResult) -> bool:
    """Equal witnesses, same violated assertion, or same error class."""
    if isinstance(r1, EvalError) and isinstance(r2, EvalError):
        return r1.error_class == r2.error_class
    return r1 == r2
