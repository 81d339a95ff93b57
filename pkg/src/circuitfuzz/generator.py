"""Grammar-based random generation of circuits and of inputs for them."""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from .field import BN254, FieldConfig
from .il import (
    ALL_OPS,
    BOOLEAN_BINARY,
    COMPARISONS,
    COND,
    Assert,
    Assign,
    Binary,
    Circuit,
    Conditional,
    Const,
    Expr,
    Input,
    Unary,
    Var,
)


class ConfigError(ValueError):
    pass


# Weights per production class; per-operator weights default to 1.
DEFAULT_WEIGHTS = {"const": 1.0, "var": 2.0, "unary": 1.0, "binary": 4.0, "ternary": 0.5}


def resolve_constant(value: int | str, cfg: FieldConfig) -> int:
    """Turn ``5``, ``"p"``, ``"p-1"`` or ``"p+2"`` into an integer (not reduced)."""
    if isinstance(value, int):
        return value
    text = value.replace(" ", "")
    m = re.fullmatch(r"p(?:([+-])(\d+))?", text)
    if m:
        off = int(m.group(2) or 0)
        return cfg.prime + (off if m.group(1) != "-" else -off)
    return int(text)


@dataclass(frozen=True)
class GeneratorConfig:
    max_inputs: int = 2
    max_outputs: int = 2
    max_assertions: int = 2
    max_expr_depth: int = 4
    allowed_ops: frozenset[str] = ALL_OPS
    rule_weights: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))
    boundary_constants: tuple[int | str, ...] = (0, 1, "p-1", "p")
    boundary_probability: float = 0.05
    field: FieldConfig = BN254

    def __post_init__(self):
        for name in ("max_inputs", "max_outputs", "max_assertions", "max_expr_depth"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        if self.max_outputs == 0 and self.max_assertions == 0:
            raise ConfigError("at least one output or assertion must be possible")
        if not 0.0 <= self.boundary_probability <= 1.0:
            raise ConfigError("boundary_probability must be in [0, 1]")
        for k, w in self.rule_weights.items():
            if w < 0:
                raise ConfigError(f"weight for {k!r} must be non-negative")

    @property
    def boundary_values(self) -> list[int]:
        return [resolve_constant(v, self.field) for v in self.boundary_constants]

    def with_(self, **changes) -> "GeneratorConfig":
        return replace(self, **changes)


def _weight(cfg: GeneratorConfig, key: str) -> float:
    return float(cfg.rule_weights.get(key, DEFAULT_WEIGHTS.get(key, 1.0)))


class _ExprGen:
    def __init__(self, cfg: GeneratorConfig, rng: random.Random):
        self.cfg = cfg
        self.rng = rng
        ops = cfg.allowed_ops
        self.field_unary = [o for o in ("neg", "complement") if o in ops]
        self.all_unary = self.field_unary + (["not"] if "not" in ops else [])
        self.binary = [o for o in ("add", "sub", "mul", "div", "mod", "pow", "and", "or", "xor",
                                   "land", "lor", "lxor", "eq", "neq", "lt", "le", "gt", "ge") if o in ops]
        self.bool_binary = [o for o in self.binary if o in COMPARISONS or o in BOOLEAN_BINARY]
        self.ternary = COND in ops
        self.vars: list[str] = []

    def pick(self, options: Sequence[str]) -> str:
        ws = [_weight(self.cfg, o) for o in options]
        return self.rng.choices(options, weights=ws)[0]

    def const(self) -> Const:
        cfg = self.cfg
        if cfg.boundary_constants and self.rng.random() < cfg.boundary_probability:
            return Const(self.rng.choice(cfg.boundary_values))
        return Const(self.rng.randrange(cfg.field.prime))

    def leaf(self) -> Expr:
        if self.vars and self.rng.random() < _weight(self.cfg, "var") / (
            _weight(self.cfg, "var") + _weight(self.cfg, "const")
        ):
            return Var(self.rng.choice(self.vars))
        return self.const()

    def field_expr(self, budget: int) -> Expr:
        if budget <= 0:
            return self.leaf()
        classes = ["const", "var"] if self.vars else ["const"]
        if self.all_unary:
            classes.append("unary")
        if self.binary:
            classes.append("binary")
        if self.ternary:
            classes.append("ternary")
        kind = self.pick(classes)
        if kind == "const":
            return self.const()
        if kind == "var":
            return Var(self.rng.choice(self.vars))
        if kind == "unary":
            op = self.pick(self.all_unary)
            if op == "not":
                return Unary(op, self.bool_expr(budget - 1))
            return Unary(op, self.field_expr(budget - 1))
        if kind == "binary":
            op = self.pick(self.binary)
            if op in BOOLEAN_BINARY:
                return Binary(op, self.bool_expr(budget - 1), self.bool_expr(budget - 1))
            return Binary(op, self.field_expr(budget - 1), self.field_expr(budget - 1))
        return Conditional(self.bool_expr(budget - 1), self.field_expr(budget - 1), self.field_expr(budget - 1))

    def bool_expr(self, budget: int) -> Expr:
        if budget <= 0:
            return Const(self.rng.randrange(2))
        classes = ["const"]
        if self.bool_binary:
            classes.append("binary")
        if "not" in self.cfg.allowed_ops:
            classes.append("unary")
        if self.ternary:
            classes.append("ternary")
        kind = self.pick(classes)
        if kind == "const":
            return Const(self.rng.randrange(2))
        if kind == "unary":
            return Unary("not", self.bool_expr(budget - 1))
        if kind == "ternary":
            return Conditional(self.bool_expr(budget - 1), self.bool_expr(budget - 1), self.bool_expr(budget - 1))
        op = self.pick(self.bool_binary)
        if op in BOOLEAN_BINARY:
            return Binary(op, self.bool_expr(budget - 1), self.bool_expr(budget - 1))
        return Binary(op, self.field_expr(budget - 1), self.field_expr(budget - 1))


def generate_circuit(cfg: GeneratorConfig, rng: random.Random) -> Circuit:
    """Draw a random well-formed circuit; deterministic for a given ``rng`` state."""
    if not cfg.allowed_ops:
        raise ConfigError("allowed_ops is empty")
    n_in = rng.randint(0, cfg.max_inputs)
    n_out = rng.randint(0, cfg.max_outputs)
    n_assert = rng.randint(0, cfg.max_assertions)
    if n_out + n_assert == 0:
        if cfg.max_outputs > 0:
            n_out = 1
        else:
            n_assert = 1

    gen = _ExprGen(cfg, rng)
    inputs = tuple(Input(f"in{i}") for i in range(n_in))
    outputs = tuple(f"out{i}" for i in range(n_out))
    gen.vars = [i.name for i in inputs]

    # Outputs are assigned in order; assertions are interleaved at random.
    kinds = ["assign"] * n_out + ["assert"] * n_assert
    rng.shuffle(kinds)
    body = []
    next_out = 0
    for kind in kinds:
        if kind == "assign":
            name = outputs[next_out]
            next_out += 1
            body.append(Assign(name, gen.field_expr(cfg.max_expr_depth)))
            gen.vars.append(name)
        else:
            body.append(Assert(gen.bool_expr(cfg.max_expr_depth)))
    return Circuit(inputs, outputs, tuple(body))


def generate_inputs(c: Circuit, cfg: GeneratorConfig, rng: random.Random) -> dict[str, int]:
    """One value per declared input; boundary constants keep their raw value (``p`` stays ``p``)."""
    values = {}
    boundary = cfg.boundary_values
    for name in c.input_names:
        if boundary and rng.random() < cfg.boundary_probability:
            values[name] = rng.choice(boundary)
        else:
            values[name] = rng.randrange(cfg.field.prime)
    return values


def random_expr(cfg: GeneratorConfig, rng: random.Random, variables: Sequence[str], budget: int,
                want_bool: bool = False) -> Expr:
    """A single random expression over ``variables`` with depth at most ``budget``."""
    gen = _ExprGen(cfg, rng)
    gen.vars = list(variables)
    return gen.bool_expr(budget) if want_bool else gen.field_expr(budget)
