"""Replayable witness bundles.

A bundle is a JSON document ``{"schema": "opmod-witness/1", "suite": ...,
"seed": ..., "entries": [...]}``.  Every entry stores the matrices (and
function) of one checked instance together with the quantities computed from
them; :func:`replay_entry` recomputes those quantities and reports whether
they reproduce.  Matrices use the ``{"rows", "cols", "re", "im"}`` layout of
:mod:`opmod.linalg_core`.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .bernstein import (BandLimitedFunction, TrigPolynomial, beta, sup_norm,
                        verify_operator_bernstein, verify_operator_bernstein_difference,
                        verify_quasicommutator_bernstein, verify_unitary_bernstein)
from .errors import InvalidInputError, SchemaError
from .funcalc import parse_function
from .linalg_core import (kyfan_norm, matrix_from_dict, matrix_to_dict, opnorm, split_cost)
from .moduli import Witness

BUNDLE_SCHEMA = "opmod-witness/1"
REPLAY_ATOL = 1e-8
INEQUALITY_SLACK = 1e-6


def _mat(doc, key):
    return matrix_from_dict(doc[key]) if doc.get(key) is not None else None


def encode_function(f) -> object:
    """Descriptor string or JSON document identifying ``f``."""
    if isinstance(f, BandLimitedFunction):
        return {"type": "bandlimited", **f.to_dict()}
    if isinstance(f, TrigPolynomial):
        return {"type": "trig", **f.to_dict()}
    if isinstance(f, str):
        return f
    raise InvalidInputError(f"cannot serialize function {f!r}")


def decode_function(doc):
    if isinstance(doc, str):
        return parse_function(doc)
    kind = doc.get("type")
    if kind == "bandlimited":
        return BandLimitedFunction.from_dict(doc)
    if kind == "trig":
        return TrigPolynomial.from_dict(doc)
    raise SchemaError(f"unknown function document type {kind!r}")


# ---------------------------------------------------------------------------
# Entry constructors
# ---------------------------------------------------------------------------

def modulus_entry(w: Witness, function) -> dict:
    return {"kind": "modulus", "flavor": w.flavor, "delta": w.delta, "value": w.value,
            "function": encode_function(function), "A": matrix_to_dict(w.A),
            "B": None if w.B is None else matrix_to_dict(w.B),
            "R": None if w.R is None else matrix_to_dict(w.R)}


def pair_entry(f, A, B, lhs, rhs, passed) -> dict:
    return {"kind": "operator-bernstein", "function": encode_function(f), "A": matrix_to_dict(A),
            "B": matrix_to_dict(B), "lhs": lhs, "rhs": rhs, "passed": passed}


def difference_entry(f, A, K, m, lhs, rhs, passed) -> dict:
    return {"kind": "difference", "function": encode_function(f), "A": matrix_to_dict(A),
            "K": matrix_to_dict(K), "m": m, "lhs": lhs, "rhs": rhs, "passed": passed}


def quasicommutator_entry(f, A, B, R, p, lhs, rhs, passed) -> dict:
    return {"kind": "quasicommutator", "function": encode_function(f), "A": matrix_to_dict(A),
            "B": matrix_to_dict(B), "R": matrix_to_dict(R), "p": "inf" if math.isinf(p) else p,
            "lhs": lhs, "rhs": rhs, "passed": passed}


def unitary_entry(f, U, V, lhs, rhs_linear, rhs_sharp, passed) -> dict:
    return {"kind": "unitary", "function": encode_function(f), "U": matrix_to_dict(U),
            "V": matrix_to_dict(V), "lhs": lhs, "rhs_linear": rhs_linear, "rhs_sharp": rhs_sharp,
            "passed": passed}


def scalar_entry(f, m, h, ratio, passed) -> dict:
    return {"kind": "scalar-bernstein", "function": encode_function(f), "m": m, "h": h,
            "ratio": ratio, "passed": passed}


def split_entry(T, l, T1, T2, cost, kyfan, passed) -> dict:
    return {"kind": "split", "T": matrix_to_dict(T), "l": l, "T1": matrix_to_dict(T1),
            "T2": matrix_to_dict(T2), "cost": cost, "kyfan": kyfan, "passed": passed}


def ratio_entry(label, lhs, rhs, ratio) -> dict:
    """Generic ``||lhs|| / ||rhs||`` entry (multiplier witnesses, diagonal instances)."""
    return {"kind": "ratio", "label": label, "lhs": matrix_to_dict(lhs), "rhs": matrix_to_dict(rhs),
            "ratio": ratio}


# ---------------------------------------------------------------------------
# Replay
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReplayResult:
    index: int
    kind: str
    reproduced: bool
    holds: bool | None
    detail: str


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= REPLAY_ATOL * max(1.0, abs(b))


def replay_entry(index: int, e: dict) -> ReplayResult:
    kind = e.get("kind")
    try:
        if kind == "modulus":
            w = Witness(e["flavor"], float(e["delta"]), float(e["value"]), _mat(e, "A"), _mat(e, "B"),
                        _mat(e, "R"))
            val = w.evaluate(decode_function(e["function"]))
            bad = w.violations()
            ok = _close(val, w.value) and not bad
            return ReplayResult(index, kind, ok, not bad,
                                f"value {val!r} (stored {w.value!r})" + (f"; {'; '.join(bad)}" if bad else ""))
        if kind == "operator-bernstein":
            f = decode_function(e["function"])
            lhs, rhs = verify_operator_bernstein(f, _mat(e, "A"), _mat(e, "B"))
            return _ineq(index, kind, e, lhs, rhs)
        if kind == "difference":
            f = decode_function(e["function"])
            lhs, rhs = verify_operator_bernstein_difference(f, _mat(e, "A"), _mat(e, "K"), int(e["m"]))
            return _ineq(index, kind, e, lhs, rhs)
        if kind == "quasicommutator":
            f = decode_function(e["function"])
            p = math.inf if e["p"] == "inf" else float(e["p"])
            lhs, rhs = verify_quasicommutator_bernstein(f, _mat(e, "A"), _mat(e, "B"), _mat(e, "R"), p)
            return _ineq(index, kind, e, lhs, rhs)
        if kind == "unitary":
            f = decode_function(e["function"])
            lhs, lin, sharp = verify_unitary_bernstein(f, _mat(e, "U"), _mat(e, "V"))
            holds = lhs <= sharp * (1 + INEQUALITY_SLACK) and sharp <= lin * (1 + INEQUALITY_SLACK)
            ok = (_close(lhs, e["lhs"]) and _close(lin, e["rhs_linear"]) and _close(sharp, e["rhs_sharp"])
                  and holds == bool(e["passed"]))
            return ReplayResult(index, kind, ok, holds, f"lhs {lhs!r}, sharp {sharp!r}, linear {lin!r}")
        if kind == "scalar-bernstein":
            f = decode_function(e["function"])
            m, h = int(e["m"]), float(e["h"])
            ratio = sup_norm(f.difference(h, m)) / (beta(f.sigma, abs(h)) ** m * sup_norm(f))
            holds = ratio <= 1 + INEQUALITY_SLACK
            ok = _close(ratio, e["ratio"]) and holds == bool(e["passed"])
            return ReplayResult(index, kind, ok, holds, f"ratio {ratio!r} (stored {e['ratio']!r})")
        if kind == "split":
            T, T1, T2, l = _mat(e, "T"), _mat(e, "T1"), _mat(e, "T2"), int(e["l"])
            cost, ky = split_cost(T1, T2, l), kyfan_norm(T, 1, l)
            exact = float(np.max(np.abs(T1 + T2 - T))) <= 1e-12 * max(1.0, opnorm(T))
            holds = exact and abs(cost - ky) <= 1e-9 * max(1.0, ky)
            ok = _close(cost, e["cost"]) and _close(ky, e["kyfan"]) and holds == bool(e["passed"])
            return ReplayResult(index, kind, ok, holds, f"cost {cost!r}, kyfan {ky!r}")
        if kind == "ratio":
            lhs, rhs = _mat(e, "lhs"), _mat(e, "rhs")
            ratio = opnorm(lhs) / opnorm(rhs)
            return ReplayResult(index, kind, _close(ratio, e["ratio"]), None,
                                f"{e.get('label', '')}: ratio {ratio!r} (stored {e['ratio']!r})")
    except (KeyError, TypeError, ValueError) as exc:
        return ReplayResult(index, str(kind), False, None, f"malformed entry: {exc}")
    return ReplayResult(index, str(kind), False, None, f"unknown entry kind {kind!r}")


def _ineq(index, kind, e, lhs, rhs) -> ReplayResult:
    holds = lhs <= rhs * (1 + INEQUALITY_SLACK) + 1e-12
    ok = _close(lhs, e["lhs"]) and _close(rhs, e["rhs"]) and holds == bool(e["passed"])
    return ReplayResult(index, kind, ok, holds, f"lhs {lhs!r} (stored {e['lhs']!r}), rhs {rhs!r}")


def make_bundle(suite: str, seed: int, entries) -> dict:
    return {"schema": BUNDLE_SCHEMA, "suite": suite, "seed": seed, "entries": list(entries)}


def load_bundle(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh, parse_constant=lambda t: (_ for _ in ()).throw(
                SchemaError(f"non-finite number {t} in bundle")))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"bundle is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("schema") != BUNDLE_SCHEMA:
        found = doc.get("schema") if isinstance(doc, dict) else type(doc).__name__
        raise SchemaError(f"expected bundle schema '{BUNDLE_SCHEMA}', found {found!r}")
    if not isinstance(doc.get("entries", []), list):
        raise SchemaError("bundle 'entries' must be a list")
    return doc
