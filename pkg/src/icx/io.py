"""JSON reading and writing. Rationals travel as "p/q" strings."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Union

from .conjugate import SeparableFunction
from .core import INF, as_lattice_point, format_rational, parse_rational
from .functions import FiniteFunction
from .sets import DiscreteSet

Instance = Union[DiscreteSet, FiniteFunction, SeparableFunction]


class InputError(ValueError):
    """Malformed input file or argument."""


def read_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def rational_out(q) -> str:
    if q == INF:
        return "inf"
    if q == -INF:
        return "-inf"
    return format_rational(q)


def _dim(obj, found: int) -> int:
    dim = obj.get("dim", found)
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise InputError("'dim' must be a positive integer")
    if found is not None and dim != found:
        raise InputError(f"dimension mismatch: dim={dim} but points have {found} coordinates")
    return dim


def parse_instance(obj) -> Instance:
    """Decode a set, function or separable-function payload (``kind`` optional)."""
    if not isinstance(obj, dict):
        raise InputError("instance must be a JSON object")
    kind = obj.get("kind") or ("set" if "points" in obj else "function" if "values" in obj
                               else "separable" if "pieces" in obj else None)
    try:
        if kind == "set":
            return parse_set(obj)
        if kind == "function":
            return parse_function(obj)
        if kind == "separable":
            return parse_separable(obj)
    except InputError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise InputError(str(exc)) from exc
    raise InputError("cannot tell the instance kind (expected 'set', 'function' or 'separable')")


def parse_set(obj) -> DiscreteSet:
    pts = [as_lattice_point(p) for p in obj.get("points", [])]
    lens = {len(p) for p in pts}
    if len(lens) > 1:
        raise InputError("points have different dimensions")
    dim = _dim(obj, lens.pop() if lens else None)
    if not pts:
        raise InputError("a set needs at least one point")
    return DiscreteSet.of(pts, dim)


def parse_function(obj) -> FiniteFunction:
    rows = obj.get("values")
    if not isinstance(rows, list) or not rows:
        raise InputError("'values' must be a nonempty list")
    pairs = []
    for row in rows:
        if not isinstance(row, dict) or "x" not in row or "f" not in row:
            raise InputError("each value entry needs 'x' and 'f'")
        pairs.append((as_lattice_point(row["x"]), parse_rational(row["f"])))
    lens = {len(x) for x, _ in pairs}
    if len(lens) > 1:
        raise InputError("points have different dimensions")
    dim = _dim(obj, lens.pop())
    flag = obj.get("integer_valued")
    if flag is not None and not isinstance(flag, bool):
        raise InputError("'integer_valued' must be a boolean")
    return FiniteFunction.of(pairs, dim, flag)


def parse_separable(obj) -> SeparableFunction:
    pieces = obj.get("pieces")
    if not isinstance(pieces, list) or not pieces:
        raise InputError("'pieces' must be a nonempty list")
    out = []
    for piece in pieces:
        lo = piece.get("lo")
        if not isinstance(lo, int) or isinstance(lo, bool):
            raise InputError("each piece needs an integer 'lo'")
        out.append((lo, [parse_rational(v) for v in piece.get("values", [])]))
    _dim(obj, len(out))
    return SeparableFunction.of(out, obj.get("tag", "concave"))


def load_instance(path) -> Instance:
    return parse_instance(read_json(path))


def set_to_json(S: DiscreteSet) -> dict:
    out = {"kind": "set", "dim": S.dim, "points": [list(p) for p in S.points]}
    if S.empty:
        out["empty"] = True
    return out


def function_to_json(f: FiniteFunction) -> dict:
    out = {"kind": "function", "dim": f.dim, "integer_valued": f.integer_valued,
           "values": [{"x": list(x), "f": format_rational(v)} for x, v in f.table.items()]}
    if f.empty:
        out["empty"] = True
    return out


def separable_to_json(psi: SeparableFunction) -> dict:
    return {"kind": "separable", "dim": psi.dim, "tag": psi.kind,
            "pieces": [{"lo": lo, "values": [format_rational(v) for v in vals]}
                       for lo, vals in psi.pieces]}


def instance_to_json(obj: Instance) -> dict:
    if isinstance(obj, DiscreteSet):
        return set_to_json(obj)
    if isinstance(obj, FiniteFunction):
        return function_to_json(obj)
    return separable_to_json(obj)


def parse_vector(text: str, integral: bool = False):
    """Parse ``"1/2,1"`` or a JSON array; "inf"/"-inf" allowed for box bounds."""
    text = text.strip()
    if text.startswith("["):
        try:
            items = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"bad vector {text!r}") from exc
    else:
        items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise InputError("empty vector")
    try:
        if integral:
            return as_lattice_point(items)
        return tuple(parse_rational(c) for c in items)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def parse_bounds(text: str):
    """Integer vector whose entries may also be "inf"/"-inf"."""
    text = text.strip()
    items = json.loads(text) if text.startswith("[") else [t.strip() for t in text.split(",")]
    out = []
    for c in items:
        if isinstance(c, str) and c.lower() in ("inf", "+inf"):
            out.append(INF)
        elif isinstance(c, str) and c.lower() == "-inf":
            out.append(-INF)
        else:
            try:
                out.append(as_lattice_point([c])[0])
            except ValueError as exc:
                raise InputError(str(exc)) from exc
    return tuple(out)
