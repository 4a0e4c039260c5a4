"""JSON file formats for matrices, QC keys and words.

Writers emit sorted position lists plus a ``schema`` tag; readers ignore
unknown keys but reject unsorted or duplicated positions.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

from .core import BinaryWord, QcMdpcKey, SparseBinaryMatrix
from .errors import FormatError, ParameterError

MATRIX_SCHEMA = "mdpc.matrix/1"
KEY_SCHEMA = "mdpc.qc-key/1"
WORD_SCHEMA = "mdpc.word/1"


def _int_list(value: Any, what: str) -> list[int]:
    if not isinstance(value, list) or not all(
        isinstance(x, int) and not isinstance(x, bool) for x in value
    ):
        raise FormatError(f"{what} must be a list of integers")
    return value


def _field(obj: dict, name: str, what: str):
    if not isinstance(obj, dict) or name not in obj:
        raise FormatError(f"{what}: missing field {name!r}")
    return obj[name]


def matrix_to_dict(m: SparseBinaryMatrix) -> dict:
    return {
        "schema": MATRIX_SCHEMA,
        "rows": m.rows,
        "cols": m.cols,
        "row_supports": [list(s) for s in m.row_supports],
    }


def matrix_from_dict(obj: dict) -> SparseBinaryMatrix:
    rows = _field(obj, "rows", "matrix")
    cols = _field(obj, "cols", "matrix")
    supports = _field(obj, "row_supports", "matrix")
    if not isinstance(supports, list):
        raise FormatError("matrix: row_supports must be a list")
    supports = [_int_list(s, f"row {i}") for i, s in enumerate(supports)]
    try:
        return SparseBinaryMatrix(rows, cols, tuple(tuple(s) for s in supports))
    except ParameterError as exc:
        raise FormatError(str(exc)) from exc


def key_to_dict(key: QcMdpcKey) -> dict:
    return {"schema": KEY_SCHEMA, "p": key.p, "h0": list(key.h0), "h1": list(key.h1)}


def key_from_dict(obj: dict) -> QcMdpcKey:
    p = _field(obj, "p", "key")
    h0 = _int_list(_field(obj, "h0", "key"), "h0")
    h1 = _int_list(_field(obj, "h1", "key"), "h1")
    try:
        return QcMdpcKey(p, tuple(h0), tuple(h1))
    except ParameterError as exc:
        raise FormatError(str(exc)) from exc


def word_to_dict(word: BinaryWord) -> dict:
    return {"schema": WORD_SCHEMA, "length": word.length, "support": list(word.support)}


def word_from_dict(obj: dict) -> BinaryWord:
    length = _field(obj, "length", "word")
    support = _int_list(_field(obj, "support", "word"), "support")
    try:
        return BinaryWord(length, tuple(support))
    except ParameterError as exc:
        raise FormatError(str(exc)) from exc


def read_json(path: str | Path) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc


def jsonable(obj: Any) -> Any:
    """Replace non-finite floats by the strings "inf", "-inf" and "nan" so the output is strict JSON."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(jsonable(obj), indent=1, sort_keys=True, allow_nan=False)


def write_json(path: str | Path, obj: Any) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(obj))
        fh.write("\n")


def load_matrix(path: str | Path) -> SparseBinaryMatrix:
    return matrix_from_dict(read_json(path))


def load_key(path: str | Path) -> QcMdpcKey:
    return key_from_dict(read_json(path))


def load_word(path: str | Path) -> BinaryWord:
    return word_from_dict(read_json(path))
