"""Source-to-source translation of IL circuits into target ZK languages.

Each backend turns a validated circuit into a :class:`TranslationUnit`: the
primary source text plus auxiliary files (input files, manifests, harnesses).
Translation is a pure function, so identical circuits give byte-identical
units. Operator sets are plain data and may be narrowed or widened per
campaign with :meth:`Backend.with_ops`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Mapping

from ..field import BN254, FieldConfig
from ..il import ALL_OPS, COND, Circuit, ValidationError, validate


@dataclass(frozen=True)
class TranslationUnit:
    source: str
    main_file: str
    files: tuple[tuple[str, bytes], ...] = ()

    def all_files(self) -> list[tuple[str, bytes]]:
        return [(self.main_file, self.source.encode())] + list(self.files)

    def write(self, out_dir: str | Path) -> list[Path]:
        out = Path(out_dir)
        written = []
        for rel, data in self.all_files():
            target = out / rel
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_bytes(data)
            written.append(target)
        return written


@dataclass(frozen=True)
class Backend:
    name: str
    supported_ops: frozenset[str]
    file_extension: str
    input_file: str
    emit: Callable = field(repr=False, compare=False)
    encode: Callable = field(repr=False, compare=False)

    def with_ops(self, ops) -> "Backend":
        return replace(self, supported_ops=frozenset(ops))


def _encode_json(c: Circuit, inputs: Mapping[str, int], cfg: FieldConfig) -> bytes:
    # Decimal strings so large field elements never become floats.
    return json.dumps({name: str(int(inputs[name])) for name in c.input_names}).encode()


def _emit_il(c: Circuit, opts: Mapping) -> str:
    return str(c) + "\n"


def _registry() -> dict[str, Backend]:
    from . import circom, corset, gnark, noir

    return {
        "il": Backend("il", ALL_OPS, ".cir", "inputs.json", _emit_il, _encode_json),
        "circom": Backend("circom", circom.SUPPORTED_OPS, ".circom", "input.json", circom.emit, _encode_json),
        "corset": Backend("corset", corset.SUPPORTED_OPS, ".lisp", "trace.json", corset.emit, corset.encode),
        "gnark": Backend("gnark", gnark.SUPPORTED_OPS, ".go", "main.go", gnark.emit, gnark.encode),
        "noir": Backend("noir", noir.SUPPORTED_OPS, ".nr", "Prover.toml", noir.emit, noir.encode),
    }


BACKENDS: dict[str, Backend] = _registry()


def get_backend(name: str) -> Backend:
    try:
        return BACKENDS[name]
    except KeyError:
        raise KeyError(f"unknown backend {name!r}; choose from {sorted(BACKENDS)}") from None


def _resolve(backend: Backend | str) -> Backend:
    return get_backend(backend) if isinstance(backend, str) else backend


def translate(
    c: Circuit,
    backend: Backend | str,
    opts: Mapping | None = None,
    inputs: Mapping[str, int] | None = None,
    cfg: FieldConfig = BN254,
) -> TranslationUnit:
    """Translate ``c``; with ``inputs`` the backend's input file is included."""
    b = _resolve(backend)
    errors = validate(c, b.supported_ops)
    if errors:
        unsupported = [e for e in errors if e.kind == "UnsupportedOperator"]
        raise unsupported[0] if unsupported else errors[0]
    source = b.emit(c, dict(opts or {}))
    files = ()
    if inputs is not None:
        files = ((b.input_file, b.encode(c, inputs, cfg)),)
    return TranslationUnit(source, "circuit" + b.file_extension, files)


def encode_inputs(c: Circuit, inputs: Mapping[str, int], backend: Backend | str, cfg: FieldConfig = BN254) -> bytes:
    missing = set(c.input_names) - set(inputs)
    if missing:
        raise KeyError(f"missing inputs: {sorted(missing)}")
    return _resolve(backend).encode(c, inputs, cfg)


__all__ = [
    "BACKENDS",
    "COND",
    "Backend",
    "TranslationUnit",
    "ValidationError",
    "encode_inputs",
    "get_backend",
    "translate",
]
