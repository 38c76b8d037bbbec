"""
JSON I/O for polytopes.

  {"type": "H", "H": [[...]], "h": [...]}
  {"type": "AH", "center": [...], "map": [[...]], "base": {H object}}
  {"type": "zonotope", "center": [...], "generator": [[...]]}

Floats are written with Python's shortest round-trip repr, so a load/dump
cycle reproduces every double exactly.
"""

import json
from typing import Any, Dict, Optional, Union

import numpy as np

from polycontain.errors import InvalidInputError, ParseError
from polycontain.geometry import AHPolytope, HPolytope, Set, Zonotope


def _matrix(M: np.ndarray):
    return [[float(v) for v in row] for row in np.asarray(M)]


def _vector(v: np.ndarray):
    return [float(x) for x in np.asarray(v).reshape(-1)]


def to_dict(s: Set) -> Dict[str, Any]:
    if isinstance(s, HPolytope):
        return {"type": "H", "H": _matrix(s.H), "h": _vector(s.h)}
    if isinstance(s, AHPolytope):
        return {"type": "AH", "center": _vector(s.center), "map": _matrix(s.map), "base": to_dict(s.base)}
    if isinstance(s, Zonotope):
        return {"type": "zonotope", "center": _vector(s.center), "generator": _matrix(s.generator)}
    raise InvalidInputError(f"cannot serialize {type(s).__name__}")


def _field(data: dict, key: str, source: Optional[str]):
    try:
        return data[key]
    except KeyError:
        raise ParseError(f"missing key {key!r} in {data.get('type', 'polytope')} object", source=source) from None


def _rows(value):
    """Nested list to a 2-D array; an empty list becomes a zero-row matrix"""
    A = np.array(value, dtype=float)
    if A.size == 0:
        return A.reshape(len(value), 0) if isinstance(value, list) else A
    return A


def from_dict(data: Dict[str, Any], source: Optional[str] = None) -> Set:
    if not isinstance(data, dict):
        raise ParseError(f"expected a JSON object, got {type(data).__name__}", source=source)
    kind = _field(data, "type", source)
    try:
        if kind == "H":
            return HPolytope(_rows(_field(data, "H", source)), _field(data, "h", source))
        if kind == "AH":
            base = from_dict(_field(data, "base", source), source)
            if not isinstance(base, HPolytope):
                raise ParseError("AH base must be an H object", source=source)
            return AHPolytope(_field(data, "center", source), _rows(_field(data, "map", source)), base)
        if kind == "zonotope":
            return Zonotope(_field(data, "center", source), _rows(_field(data, "generator", source)))
    except ParseError:
        raise
    except (TypeError, ValueError) as err:
        raise ParseError(str(err), source=source) from err
    raise ParseError(f"unknown polytope type {kind!r}", source=source)


def dumps(s: Set, indent: Optional[int] = 2) -> str:
    return json.dumps(to_dict(s), indent=indent)


def loads(text: str, source: Optional[str] = None) -> Set:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(err.msg, line=err.lineno, column=err.colno, source=source) from err
    return from_dict(data, source)


def save(s: Set, filepath: str):
    with open(filepath, "w") as f:
        f.write(dumps(s))
        f.write("\n")


def _read(filepath: str) -> str:
    try:
        with open(filepath, "r") as f:
            return f.read()
    except OSError as err:
        raise InvalidInputError(f"cannot read {filepath}: {err.strerror}") from err


def load(filepath: str) -> Set:
    return loads(_read(filepath), source=filepath)


def load_any(filepath: str) -> Union[Set, list]:
    """A single polytope, or a JSON list of polytopes"""
    try:
        data = json.loads(_read(filepath))
    except json.JSONDecodeError as err:
        raise ParseError(err.msg, line=err.lineno, column=err.colno, source=filepath) from err
    if isinstance(data, list):
        return [from_dict(d, filepath) for d in data]
    return from_dict(data, filepath)
