"""Regression corpus: JSON cases with inputs and exact expected outputs.

Each case file holds ``{"id", "check", "metadata", "inputs", "expect"}``.
The runner recomputes every key listed under ``expect`` and compares the
JSON-normalized values for equality.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Optional

from .conjugate import biconjugate_bruteforce, fenchel_check, integral_conjugate
from .core import as_rational_vector, format_rational
from .functions import (convex_envelope_at, is_integrally_convex_2d, is_integrally_convex_fn,
                        local_convex_extension)
from .io import InputError, parse_instance, parse_set, rational_out
from .minimize import argmin_set, beta
from .sets import apply_set_op, box_integrality_probe, is_hole_free, is_integrally_convex_set


class CorpusError(Exception):
    """The corpus directory is missing, empty or holds an unreadable case."""


@dataclass
class CaseResult:
    case_id: str
    ok: bool
    mismatches: list = field(default_factory=list)
    error: Optional[str] = None


def default_dir() -> Path:
    return Path(str(resources.files("icx") / "corpus"))


def load_corpus(directory=None) -> list[dict]:
    root = Path(directory) if directory is not None else default_dir()
    if not root.is_dir():
        raise CorpusError(f"corpus directory {root} does not exist")
    files = sorted(root.glob("*.json"))
    if not files:
        raise CorpusError(f"no corpus files in {root}")
    cases = []
    for path in files:
        try:
            case = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise CorpusError(f"{path.name}: invalid JSON ({exc.msg})") from exc
        missing = {"id", "check", "inputs", "expect"} - set(case)
        if missing:
            raise CorpusError(f"{path.name}: missing keys {sorted(missing)}")
        cases.append(case)
    return cases


def _pts(points):
    return [list(p) for p in points]


def _witness(verdict):
    w = verdict.witness
    if w is None:
        return None
    if isinstance(w[0], tuple):
        return [list(part) for part in w]
    return list(w)


def _set_check(inputs):
    S = parse_set(inputs["set"])
    ic, hf = is_integrally_convex_set(S), is_hole_free(S)
    return {"integrally_convex": ic.ok, "witness": _witness(ic),
            "hole_free": hf.ok, "hole": _witness(hf)}


def _set_op(inputs):
    S = parse_set(inputs["set"])
    other = parse_set(inputs["other"]) if "other" in inputs else None
    T = apply_set_op(S, inputs["op"], other, **inputs.get("params", {}))
    ic, hf = is_integrally_convex_set(T), is_hole_free(T)
    operands = [S] + ([other] if other is not None else [])
    return {"operands_integrally_convex": [is_integrally_convex_set(X).ok for X in operands],
            "result": _pts(T.points), "integrally_convex": ic.ok, "witness": _witness(ic),
            "hole_free": hf.ok, "hole": _witness(hf)}


def _probe(inputs):
    S = parse_set(inputs["set"])
    return {"probe": box_integrality_probe(S, int(inputs["alpha_max"]))}


def _fn_check(inputs):
    f = parse_instance(inputs["function"])
    at = [as_rational_vector(x) for x in inputs.get("at", [])]
    ge2, eq2 = is_integrally_convex_fn(f, "pairs_ge2"), is_integrally_convex_fn(f, "pairs_eq2")
    out = {"integrally_convex": ge2.ok, "witness": _witness(ge2),
           "modes_agree": ge2.ok == eq2.ok,
           "local_extension": [rational_out(local_convex_extension(f, x)) for x in at],
           "convex_envelope": [rational_out(convex_envelope_at(f, x)) for x in at],
           "argmin": _pts(argmin_set(f).points)}
    if f.dim == 2:
        out["modes_agree"] = out["modes_agree"] and is_integrally_convex_2d(f).ok == ge2.ok
    return out


def _conjugate(inputs):
    f = parse_instance(inputs["function"])
    return {"integrally_convex": is_integrally_convex_fn(f).ok,
            "conjugate": format_rational(integral_conjugate(f, as_rational_vector(inputs["p"]))),
            "biconjugate": format_rational(biconjugate_bruteforce(
                f, tuple(inputs["x"]), int(inputs["p_bound"]))),
            "value": format_rational(f(tuple(inputs["x"])))}


def _fenchel(inputs):
    f = parse_instance(inputs["function"])
    psi = parse_instance(inputs["psi"])
    rep = fenchel_check(f, psi, report_only=bool(inputs.get("report_only")),
                        p_bound=inputs.get("p_bound"))
    return {"primal": format_rational(rep.primal_opt), "dual": format_rational(rep.dual_opt),
            "gap": format_rational(rep.gap),
            "certificate": None if rep.certificate is None else list(rep.certificate)}


def _beta(inputs):
    return {"values": [format_rational(beta(n)) for n in inputs["n"]]}


CHECKS: dict[str, Callable[[dict], dict]] = {
    "set_check": _set_check,
    "set_op": _set_op,
    "probe": _probe,
    "fn_check": _fn_check,
    "conjugate": _conjugate,
    "fenchel": _fenchel,
    "beta": _beta,
}


def run_case(case: dict) -> CaseResult:
    cid = str(case.get("id"))
    check = CHECKS.get(case.get("check"))
    if check is None:
        return CaseResult(cid, False, error=f"unknown check {case.get('check')!r}")
    try:
        got = check(case["inputs"])
    except (InputError, ValueError, KeyError, TypeError) as exc:
        return CaseResult(cid, False, error=f"{type(exc).__name__}: {exc}")
    mismatches = []
    for key, want in case["expect"].items():
        if key not in got:
            mismatches.append({"key": key, "expected": want, "got": "<not computed>"})
        elif json.loads(json.dumps(got[key])) != want:
            mismatches.append({"key": key, "expected": want, "got": got[key]})
    return CaseResult(cid, not mismatches, mismatches)


def run_corpus(directory=None) -> list[CaseResult]:
    """Run every case in file-name order."""
    return [run_case(case) for case in load_corpus(directory)]
