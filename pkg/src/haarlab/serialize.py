"""JSON schemas for the objects that cross the CLI boundary.

Every parser reports failures as SchemaError with the dotted path of the
offending field, so callers can surface machine-readable locations.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .combination import HaarCombination
from .dyadic import DyadicRational, HaarIndex, check_haar_index
from .errors import DomainError, SchemaError
from .spaces import Norm, NormedSpaceSpec, OperatorKind, OperatorSpec
from .transforms import CompressionTrace, ForkTransform

SCHEMA_VERSION = 1


def _checked(build, field: str):
    """Run a constructor, converting domain violations to schema errors so
    the caller still learns which field was at fault."""
    try:
        return build()
    except DomainError as exc:
        raise SchemaError(str(exc), field) from exc


def load_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read file: {exc}", path) from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}", path) from exc


def dump_json(obj: Any, path: str):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _as_int(value, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"expected an integer, got {value!r}", field)
    return value


def _as_number(value, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"expected a number, got {value!r}", field)
    return float(value)


def _as_list(value, field: str) -> list:
    if not isinstance(value, list):
        raise SchemaError(f"expected an array, got {type(value).__name__}", field)
    return value


def _as_object(value, field: str) -> dict:
    if not isinstance(value, dict):
        raise SchemaError(f"expected an object, got {type(value).__name__}", field)
    return value


def _get(obj: dict, key: str, field: str):
    if key not in obj:
        raise SchemaError("missing required field", f"{field}.{key}" if field else key)
    return obj[key]


# ---------------------------------------------------------------------------
# index sets and points


def parse_index_pair(value, field: str) -> HaarIndex:
    pair = _as_list(value, field)
    if len(pair) != 2:
        raise SchemaError(f"expected a [k, j] pair, got {len(pair)} entries", field)
    k = _as_int(pair[0], f"{field}[0]")
    j = _as_int(pair[1], f"{field}[1]")
    return _checked(lambda: check_haar_index(k, j), field)


def parse_index_set(value, field: str = "indexSet") -> frozenset[HaarIndex]:
    items = _as_list(value, field)
    return frozenset(parse_index_pair(v, f"{field}[{i}]") for i, v in enumerate(items))


def dump_index_set(indices) -> list[list[int]]:
    return [[int(k), int(j)] for k, j in sorted(indices)]


def parse_point(value, field: str = "point") -> DyadicRational:
    obj = _as_object(value, field)
    num = _as_int(_get(obj, "num", field), f"{field}.num")
    level = _as_int(_get(obj, "level", field), f"{field}.level")
    return _checked(lambda: DyadicRational(num, level), field)


def dump_point(t: DyadicRational) -> dict:
    return {"num": t.num, "level": t.level}


# ---------------------------------------------------------------------------
# compression traces


def parse_trace(value, field: str = "trace") -> CompressionTrace:
    obj = _as_object(value, field)
    m = _as_int(_get(obj, "m", field), f"{field}.m")
    initial = parse_index_set(_get(obj, "initial", field), f"{field}.initial")
    final = parse_index_set(_get(obj, "final", field), f"{field}.final")
    steps = tuple(
        ForkTransform(*parse_index_pair(v, f"{field}.steps[{i}]"))
        for i, v in enumerate(_as_list(_get(obj, "steps", field), f"{field}.steps"))
    )
    return CompressionTrace(steps=steps, initial_set=initial, final_set=final, m=m)


def dump_trace(trace: CompressionTrace) -> dict:
    return {
        "m": trace.m,
        "initial": dump_index_set(trace.initial_set),
        "steps": [[h, i] for h, i in trace.steps],
        "final": dump_index_set(trace.final_set),
    }


# ---------------------------------------------------------------------------
# coefficient families


def parse_combination(value, field: str = "coefficients") -> HaarCombination:
    obj = _as_object(value, field)
    dim = _as_int(_get(obj, "dim", field), f"{field}.dim")
    entries = _as_list(_get(obj, "entries", field), f"{field}.entries")
    coeffs = {}
    for i, raw in enumerate(entries):
        here = f"{field}.entries[{i}]"
        entry = _as_object(raw, here)
        k = _as_int(_get(entry, "k", here), f"{here}.k")
        j = _as_int(_get(entry, "j", here), f"{here}.j")
        vec = _as_list(_get(entry, "x", here), f"{here}.x")
        if len(vec) != dim:
            raise SchemaError(f"expected {dim} components, got {len(vec)}", f"{here}.x")
        if (k, j) in coeffs:
            raise SchemaError(f"duplicate index ({k}, {j})", here)
        coeffs[(k, j)] = [_as_number(c, f"{here}.x[{q}]") for q, c in enumerate(vec)]
    return _checked(lambda: HaarCombination(dim, coeffs), field)


def dump_combination(f: HaarCombination) -> dict:
    return {
        "dim": f.dim,
        "entries": [
            {"k": k, "j": j, "x": [float(c) for c in x]} for (k, j), x in f.items()
        ],
    }


# ---------------------------------------------------------------------------
# operators


def _parse_norm(value, field: str) -> Norm:
    try:
        return Norm(value)
    except ValueError:
        raise SchemaError(
            f"expected one of {[n.value for n in Norm]}, got {value!r}", field
        ) from None


def parse_operator(value, field: str = "operator") -> OperatorSpec:
    obj = _as_object(value, field)
    kind = _get(obj, "kind", field)
    if kind == "identity":
        dim = _as_int(_get(obj, "dim", field), f"{field}.dim")
        norm = _parse_norm(_get(obj, "norm", field), f"{field}.norm")
        return _checked(lambda: OperatorSpec.identity(NormedSpaceSpec(dim, norm)), field)
    if kind == "diagonal":
        norm = _parse_norm(_get(obj, "norm", field), f"{field}.norm")
        entries = _as_list(_get(obj, "entries", field), f"{field}.entries")
        values = [_as_number(v, f"{field}.entries[{i}]") for i, v in enumerate(entries)]
        if "dim" in obj and _as_int(obj["dim"], f"{field}.dim") != len(values):
            raise SchemaError(
                f"dim {obj['dim']} does not match {len(values)} entries", f"{field}.dim"
            )
        return _checked(lambda: OperatorSpec.diagonal(values, norm), field)
    if kind == "dense":
        rows = _as_list(_get(obj, "rows", field), f"{field}.rows")
        matrix = []
        for i, raw in enumerate(rows):
            row = _as_list(raw, f"{field}.rows[{i}]")
            matrix.append(
                [_as_number(v, f"{field}.rows[{i}][{q}]") for q, v in enumerate(row)]
            )
        if not matrix or any(len(r) != len(matrix[0]) for r in matrix):
            raise SchemaError("rows must form a nonempty rectangular matrix", f"{field}.rows")
        dom = _parse_norm(obj.get("domainNorm", "l2"), f"{field}.domainNorm")
        cod = _parse_norm(obj.get("codomainNorm", "l2"), f"{field}.codomainNorm")
        return _checked(
            lambda: OperatorSpec.dense(
                np.array(matrix),
                NormedSpaceSpec(len(matrix[0]), dom),
                NormedSpaceSpec(len(matrix), cod),
            ),
            field,
        )
    raise SchemaError(f"unknown operator kind {kind!r}", f"{field}.kind")


def parse_operator_document(value, field: str = "operator") -> OperatorSpec:
    """Operator from a file-level value: either the object itself or wrapped
    under an \"operator\" key."""
    if isinstance(value, dict) and "operator" in value:
        value = value["operator"]
    return parse_operator(value, field)


def parse_index_set_document(value, field: str = "indexSet") -> frozenset[HaarIndex]:
    """Index set from a file-level value: a bare [[k, j], ...] list or an
    object carrying it under an \"indexSet\" key."""
    if isinstance(value, dict):
        value = _get(value, "indexSet", field)
    return parse_index_set(value, field)


def dump_operator(T: OperatorSpec) -> dict:
    if T.kind is OperatorKind.IDENTITY:
        return {"kind": "identity", "dim": T.domain.dim, "norm": T.domain.norm.value}
    if T.kind is OperatorKind.DIAGONAL:
        return {
            "kind": "diagonal",
            "dim": T.domain.dim,
            "norm": T.domain.norm.value,
            "entries": [float(v) for v in T.entries],
        }
    return {
        "kind": "dense",
        "rows": [[float(v) for v in row] for row in T.matrix],
        "domainNorm": T.domain.norm.value,
        "codomainNorm": T.codomain.norm.value,
    }
