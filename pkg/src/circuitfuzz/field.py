"""Prime-field arithmetic with the bitwise and comparison semantics of the IL.

Field elements are plain Python ints holding the canonical residue in
``[0, p)``; the :class:`FieldConfig` they belong to is passed alongside.
Keeping them as ints keeps the evaluator cheap enough for campaigns of
tens of thousands of circuit pairs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

# Canonical residue in [0, p).
FieldElement = int

BN254_PRIME = 21888242871839275222246405745257275088548364400416034343698204186575808495617
BLS12_381_PRIME = 52435875175126190479447740508185965837690552500527637822603658699938581184513
GOLDILOCKS_PRIME = 2**64 - 2**32 + 1


class DivisionByZero(ArithmeticError):
    """Field division or integer remainder by zero."""


class NonBooleanOperand(TypeError):
    """A Boolean operator received a value outside {0, 1}."""


def is_probable_prime(n: int, rounds: int = 32) -> bool:
    """Miller-Rabin test; deterministic for n < 3.3e24 thanks to the fixed bases."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # Seeded so repeated checks of the same modulus agree.
    rng = random.Random(n)
    bases = list(small) + [rng.randrange(2, n - 1) for _ in range(rounds)]
    for a in bases:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FieldConfig:
    prime: int
    name: str = ""
    bit_width: int = field(init=False)

    def __post_init__(self):
        if self.prime < 2 or not is_probable_prime(self.prime):
            raise ValueError(f"field modulus {self.prime} is not prime")
        # Smallest n with 2**n >= p.
        object.__setattr__(self, "bit_width", (self.prime - 1).bit_length())
        if not self.name:
            object.__setattr__(self, "name", f"p{self.prime}")

    @property
    def mask(self) -> int:
        return (1 << self.bit_width) - 1

    def __repr__(self):
        return f"FieldConfig({self.name!r}, bits={self.bit_width})"


NAMED_FIELDS = {
    "bn254": BN254_PRIME,
    "bls12-381": BLS12_381_PRIME,
    "goldilocks": GOLDILOCKS_PRIME,
    "small7": 7,
    "small13": 13,
}

BN254 = FieldConfig(BN254_PRIME, "bn254")


def field_by_name(spec: str | int) -> FieldConfig:
    """Resolve ``"bn254"``-style names or an explicit decimal prime."""
    if isinstance(spec, int):
        return FieldConfig(spec)
    spec = spec.strip()
    if spec in NAMED_FIELDS:
        return FieldConfig(NAMED_FIELDS[spec], spec)
    if spec.isdigit():
        return FieldConfig(int(spec))
    raise ValueError(f"unknown field {spec!r}; expected one of {sorted(NAMED_FIELDS)} or a decimal prime")


def canonicalize(x: int, cfg: FieldConfig) -> FieldElement:
    return x % cfg.prime


ARITH_OPS = ("add", "sub", "mul", "div", "mod", "pow")
BIT_OPS = ("and", "or", "xor")
CMP_OPS = ("eq", "neq", "lt", "le", "gt", "ge")
BOOL_OPS = ("land", "lor", "lxor")
UNARY_OPS = ("neg", "complement", "not")


def arith_binop(kind: str, a: FieldElement, b: FieldElement, cfg: FieldConfig) -> FieldElement:
    p = cfg.prime
    if kind == "add":
        return (a + b) % p
    if kind == "sub":
        return (a - b) % p
    if kind == "mul":
        return a * b % p
    if kind == "div":
        if b % p == 0:
            raise DivisionByZero("division by zero")
        return a * pow(b, -1, p) % p
    if kind == "mod":
        if b == 0:
            raise DivisionByZero("modulo by zero")
        return (a % b) % p
    if kind == "pow":
        # pow(0, 0, p) == 1, matching the 0**0 = 1 convention.
        return pow(a, b, p)
    raise ValueError(f"not an arithmetic operator: {kind}")


def bit_binop(kind: str, a: int, b: int, cfg: FieldConfig) -> FieldElement:
    """Bitwise op on n-bit representations, reduced mod p.

    Operands are masked to n bits rather than reduced, so a raw constant such
    as ``p`` itself keeps its bit pattern (used by the fault-injection variant).
    """
    m = cfg.mask
    a &= m
    b &= m
    if kind == "and":
        r = a & b
    elif kind == "or":
        r = a | b
    elif kind == "xor":
        r = a ^ b
    else:
        raise ValueError(f"not a bitwise operator: {kind}")
    return r % cfg.prime


def unop(kind: str, a: int, cfg: FieldConfig) -> FieldElement:
    if kind == "neg":
        return -a % cfg.prime
    if kind == "complement":
        return (cfg.mask ^ (a & cfg.mask)) % cfg.prime
    if kind == "not":
        if a not in (0, 1):
            raise NonBooleanOperand(f"'!' applied to non-Boolean value {a}")
        return 1 - a
    raise ValueError(f"not a unary operator: {kind}")


def cmp_binop(kind: str, a: FieldElement, b: FieldElement, cfg: FieldConfig | None = None) -> FieldElement:
    if kind == "eq":
        r = a == b
    elif kind == "neq":
        r = a != b
    elif kind == "lt":
        r = a < b
    elif kind == "le":
        r = a <= b
    elif kind == "gt":
        r = a > b
    elif kind == "ge":
        r = a >= b
    else:
        raise ValueError(f"not a comparison operator: {kind}")
    return int(r)


def bool_binop(kind: str, a: FieldElement, b: FieldElement) -> FieldElement:
    if a not in (0, 1) or b not in (0, 1):
        raise NonBooleanOperand(f"Boolean operator {kind} applied to ({a}, {b})")
    if kind == "land":
        return a & b
    if kind == "lor":
        return a | b
    if kind == "lxor":
        return a ^ b
    raise ValueError(f"not a Boolean operator: {kind}")
