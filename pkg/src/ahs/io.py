"""Versioned JSON documents for triples, Lie pairs, matrices, algebras and SU structures.

Every document carries ``"format": "ahs/1"``. Rationals are bare integers or
``"p/q"`` strings. Loading errors are raised as :class:`SchemaError` with a
JSON pointer to the offending value.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import jsonschema
import numpy as np

from .filtration import Filtration
from .linalg import Subspace, as_matrix, rat_array, rat_to_json
from .skew import LiePair, LiePairError
from .tensor import Tensor
from .triples import Triple

FORMAT = "ahs/1"

RAT = {"oneOf": [{"type": "integer"}, {"type": "string", "pattern": r"^\s*-?\d+(\s*/\s*[1-9]\d*)?\s*$"}]}


class SchemaError(ValueError):
    def __init__(self, message: str, pointer: str = "", index: tuple | None = None):
        super().__init__(f"{pointer or '/'}: {message}")
        self.message = message
        self.pointer = pointer or "/"
        self.index = index

    def to_json(self) -> dict:
        out = {"error": "schema", "pointer": self.pointer, "message": self.message}
        if self.index is not None:
            out["index"] = list(self.index)
        return out


def _array(shape) -> dict:
    schema = RAT
    for size in reversed(shape):
        schema = {"type": "array", "items": schema, "minItems": size, "maxItems": size}
    return schema


def _validate(doc, schema) -> None:
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        err = errors[0]
        message = err.message
        if err.schema is RAT:
            message = f"{err.instance!r} is not a rational (integer or 'p/q' string)"
        else:
            # descend into the most specific failing branch of a oneOf
            while err.context:
                err = sorted(err.context, key=lambda e: -len(e.absolute_path))[0]
            message = err.message
        pointer = "/" + "/".join(str(p) for p in err.absolute_path)
        raise SchemaError(message, pointer)


def _header(kind: str) -> dict:
    return {"format": {"const": FORMAT}, "kind": {"const": kind}}


def _pointer(*parts) -> str:
    return "/" + "/".join(str(p) for p in parts)


def _dim_of(doc, key: str) -> int:
    _validate(doc, {"type": "object", "required": ["format", key], "properties": {"format": {"const": FORMAT}, key: {"type": "integer", "minimum": 1}}})
    return doc[key]


# --- rationals and arrays -------------------------------------------------------------


def rats_to_json(arr) -> list:
    arr = np.asarray(arr, dtype=object)
    if arr.ndim == 0:
        return rat_to_json(arr.item())
    return [rats_to_json(x) for x in arr]


def tensor_to_json(t: Tensor) -> list:
    return rats_to_json(t.to_rats())


# --- triples ------------------------------------------------------------------------


def triple_schema(n: int) -> dict:
    return {
        "type": "object",
        "required": ["format", "dim", "A", "R", "T"],
        "properties": {
            **_header("triple"),
            "dim": {"const": n},
            "A": _array((n, n, n)),
            "R": _array((n, n, n, n)),
            "T": _array((n, n, n)),
        },
    }


def triple_to_json(t: Triple) -> dict:
    return {
        "format": FORMAT,
        "kind": "triple",
        "dim": t.n,
        "A": tensor_to_json(t.A),
        "R": tensor_to_json(t.R),
        "T": tensor_to_json(t.T),
    }


def _antisymmetry(name: str, arr: np.ndarray) -> None:
    bad = np.argwhere(arr != -np.swapaxes(arr, 0, 1))
    if len(bad):
        idx = tuple(int(i) for i in bad[0])
        raise SchemaError(f"{name} is not alternating: {name}{list(idx[:2])} != -{name}{list(idx[1::-1])}", _pointer(name, *idx), idx)


def triple_from_json(doc) -> Triple:
    n = _dim_of(doc, "dim")
    _validate(doc, triple_schema(n))
    A = rat_array(doc["A"])
    R = rat_array(doc["R"])
    T = rat_array(doc["T"])
    _antisymmetry("R", R)
    _antisymmetry("T", T)
    return Triple.from_rats(A, R, T)


# --- Lie pairs -----------------------------------------------------------------------


def lie_pair_schema(N: int) -> dict:
    row = {"type": "array", "items": RAT, "minItems": N, "maxItems": N}
    return {
        "type": "object",
        "required": ["format", "dim_g", "c", "h", "split", "A"],
        "properties": {
            **_header("lie_pair"),
            "dim_g": {"const": N},
            "c": _array((N, N, N)),
            "h": {"type": "array", "items": row},
            "split": {"type": "array", "items": row},
            "A": {"type": "array", "minItems": N, "maxItems": N},
        },
    }


def lie_pair_to_json(p: LiePair) -> dict:
    return {
        "format": FORMAT,
        "kind": "lie_pair",
        "dim_g": p.dim_g,
        "c": rats_to_json(p.c),
        "h": rats_to_json(p.h.basis),
        "split": rats_to_json(p.split),
        "A": rats_to_json(p.A),
    }


def lie_pair_from_json(doc, validate: bool = True) -> LiePair:
    N = _dim_of(doc, "dim_g")
    _validate(doc, lie_pair_schema(N))
    n = len(doc["split"])
    _validate(doc["A"], _array((N, n, n)))
    h = Subspace.span(rat_array(doc["h"]).reshape(len(doc["h"]), N), N) if doc["h"] else Subspace.zero(N)
    if h.dim != len(doc["h"]):
        raise SchemaError("h rows are linearly dependent", "/h")
    split = rat_array(doc["split"]).reshape(n, N) if n else np.zeros((0, N), dtype=object)
    pair = LiePair(rat_array(doc["c"]), h, split, rat_array(doc["A"]).reshape(N, n, n))
    if validate:
        pair.validate()
    return pair


# --- matrices, algebras, SU structures ----------------------------------------------


def matrix_to_json(m) -> dict:
    return {"format": FORMAT, "kind": "matrix", "matrix": rats_to_json(as_matrix(m))}


def matrix_from_json(doc) -> np.ndarray:
    """A matrix document, or a bare nested list for convenience."""
    data = doc["matrix"] if isinstance(doc, dict) else doc
    if isinstance(doc, dict):
        _validate(doc, {"type": "object", "required": ["format", "matrix"], "properties": _header("matrix")})
    if not isinstance(data, list) or not data or not isinstance(data[0], list):
        raise SchemaError("expected a non-empty list of rows", "/matrix" if isinstance(doc, dict) else "/")
    _validate(data, _array((len(data), len(data[0]))))
    return as_matrix(data)


def algebra_from_json(doc) -> tuple[list[np.ndarray], int]:
    n = _dim_of(doc, "dim")
    _validate(doc, {
        "type": "object",
        "required": ["format", "dim", "basis"],
        "properties": {**_header("algebra"), "basis": {"type": "array", "items": _array((n, n))}},
    })
    return [as_matrix(M) for M in doc["basis"]], n


def algebra_to_json(mats, n: int) -> dict:
    return {"format": FORMAT, "kind": "algebra", "dim": n, "basis": [rats_to_json(as_matrix(M)) for M in mats]}


def su_to_json(s) -> dict:
    return {
        "format": FORMAT,
        "kind": "su_structure",
        "n_complex": s.n_complex,
        "g": rats_to_json(s.g),
        "I": rats_to_json(s.I),
        "psi": tensor_to_json(s.psi),
    }


def su_from_json(doc):
    from .kstructures import SUStructure

    n = _dim_of(doc, "n_complex")
    d = 2 * n
    _validate(doc, {
        "type": "object",
        "required": ["format", "n_complex", "g", "I", "psi"],
        "properties": {**_header("su_structure"), "g": _array((d, d)), "I": _array((d, d)), "psi": _array((d,) * n)},
    })
    psi = Tensor.from_rats(d, n, "scalar", doc["psi"], (tuple(range(n)),))
    return SUStructure(as_matrix(doc["g"]), as_matrix(doc["I"]), psi), n


# --- reports ---------------------------------------------------------------------------


def subspace_to_json(h: Subspace) -> dict:
    return {"dim": h.dim, "basis": rats_to_json(h.basis)}


def filtration_to_json(f: Filtration, with_bases: bool = False) -> dict:
    out = {"dims": f.dims, "singer": f.singer, "ambient_dim": f.ambient.dim}
    if with_bases:
        out["steps"] = [subspace_to_json(h) for h in f.steps]
    return out


# --- files -----------------------------------------------------------------------------


def read_json(path) -> tuple[object, str]:
    """Parse a JSON file; returns the document and the sha256 of its bytes."""
    raw = Path(path).read_bytes()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg} at line {exc.lineno}") from None
    return doc, hashlib.sha256(raw).hexdigest()


def dump_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_json(path, doc) -> None:
    Path(path).write_text(dump_json(doc), encoding="utf-8")


def detect_kind(doc) -> str:
    if isinstance(doc, dict):
        if "kind" in doc:
            return str(doc["kind"])
        if {"A", "R", "T"} <= doc.keys():
            return "triple"
        if "c" in doc:
            return "lie_pair"
        if "psi" in doc:
            return "su_structure"
    raise SchemaError("cannot tell what kind of document this is", "/")


__all__ = [
    "FORMAT",
    "LiePairError",
    "SchemaError",
    "algebra_from_json",
    "algebra_to_json",
    "detect_kind",
    "dump_json",
    "filtration_to_json",
    "lie_pair_from_json",
    "lie_pair_to_json",
    "matrix_from_json",
    "matrix_to_json",
    "read_json",
    "su_from_json",
    "su_to_json",
    "triple_from_json",
    "triple_to_json",
    "write_json",
]
