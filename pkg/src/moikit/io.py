"""JSON encodings for matrices, measures and decompositions.

Complex numbers are ``[re, im]`` pairs.  Floats are written with Python's
shortest round-trip representation, so decoding an encoded value gives back
the same doubles bit for bit.

* matrix: ``{"rows": n, "cols": m, "data": [[re, im], ...]}`` (row-major)
* PVM: ``{"dim": n, "atoms": [{"label": ..., "projection": <matrix>}, ...]}``
* decomposition: ``{"arity": m, "points": [...], "weights": [...],
  "factors": [<table>, ...]}`` where each table lists, per atom of the
  matching measure (in atom order), the ``[re, im]`` values at every point.
"""

from __future__ import annotations

import json
from typing import Sequence

import numpy as np

from .decomp import IPD, DiscreteMeasure, TableFactor, ipd_exp_dd, ipd_monomial_dd
from .errors import MOIError
from .pvm import FinitePVM


class MalformedInput(ValueError):
    code = "MalformedInput"


def _pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _unpair(x) -> complex:
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in x):
        return complex(x[0], x[1])
    raise MalformedInput(f"expected a complex [re, im] pair, got {x!r}")


def matrix_to_json(a) -> dict:
    a = np.asarray(a, dtype=complex)
    return {"rows": int(a.shape[0]), "cols": int(a.shape[1]),
            "data": [_pair(z) for z in a.reshape(-1).tolist()]}


def matrix_from_json(obj) -> np.ndarray:
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"matrix object needs rows, cols and data: {exc}") from None
    if rows < 1 or cols < 1 or not isinstance(data, list) or len(data) != rows * cols:
        raise MalformedInput(f"matrix data length {len(data) if isinstance(data, list) else '?'} "
                             f"does not match {rows}x{cols}")
    out = np.array([_unpair(x) for x in data], dtype=complex).reshape(rows, cols)
    if not np.all(np.isfinite(out)):
        raise MalformedInput("matrix entries must be finite")
    return out


def _label_to_json(label):
    if isinstance(label, tuple):
        return [_label_to_json(x) for x in label]
    if isinstance(label, (np.integer, np.floating)):
        return label.item()
    return label


def pvm_to_json(P: FinitePVM) -> dict:
    atoms = []
    for lab, val, p in zip(P.labels, P.values, P.projections):
        atom = {"label": _label_to_json(lab), "projection": matrix_to_json(p)}
        if val != lab:
            atom["value"] = _label_to_json(val)
        atoms.append(atom)
    return {"dim": P.dim, "atoms": atoms}


def _label_from_json(x):
    return tuple(_label_from_json(v) for v in x) if isinstance(x, list) else x


def pvm_from_json(obj) -> FinitePVM:
    try:
        atoms = obj["atoms"]
        labels = [_label_from_json(a["label"]) for a in atoms]
        projs = [matrix_from_json(a["projection"]) for a in atoms]
        values = [_label_from_json(a.get("value", a["label"])) for a in atoms]
    except (KeyError, TypeError) as exc:
        raise MalformedInput(f"PVM object needs atoms with label and projection: {exc}") from None
    P = FinitePVM(tuple(labels), tuple(projs), tuple(values))
    if "dim" in obj and obj["dim"] != P.dim:
        raise MalformedInput(f"declared dim {obj['dim']} != projection size {P.dim}")
    return P.validate()


def _point_to_json(p):
    if isinstance(p, tuple):
        return [_point_to_json(x) for x in p]
    if isinstance(p, (np.integer, np.floating)):
        return p.item()
    return p


def ipd_to_json(ipd: IPD, Ps: Sequence[FinitePVM]) -> dict:
    tabs = ipd.tables(Ps)
    return {
        "arity": ipd.arity,
        "points": [_point_to_json(p) for p in ipd.measure.points],
        "weights": [float(w) for w in ipd.weights],
        "factors": [[[_pair(z) for z in row] for row in tab.tolist()] for tab in tabs],
    }


def ipd_from_json(obj) -> IPD:
    try:
        arity = int(obj["arity"])
        weights = [float(w) for w in obj["weights"]]
        points = obj.get("points", list(range(len(weights))))
        factors = obj["factors"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"decomposition object is incomplete: {exc}") from None
    if len(factors) != arity or len(points) != len(weights):
        raise MalformedInput("factor count must equal arity and points must match weights")
    tables = []
    for tab in factors:
        rows = [[_unpair(z) for z in row] for row in tab]
        if any(len(r) != len(weights) for r in rows):
            raise MalformedInput("every factor row needs one value per point")
        tables.append(TableFactor(np.array(rows, dtype=complex).reshape(len(rows), len(weights))))
    pts = tuple(_label_from_json(p) for p in points)
    try:
        measure = DiscreteMeasure(pts, weights)
    except ValueError as exc:
        raise MalformedInput(str(exc)) from None
    return IPD(measure, tables, name="json")


def builtin_ipd(spec: str, k: int) -> IPD:
    """``monomial:n`` or ``exp:t:nodes`` decomposition for a k-fold integral."""
    parts = spec.split(":")
    try:
        if parts[0] == "monomial" and len(parts) == 2:
            n = int(parts[1])
            return ipd_monomial_dd(n, k)
        if parts[0] == "exp" and len(parts) == 3:
            t, nodes = float(parts[1]), int(parts[2])
            return ipd_exp_dd(k, t, nodes)
    except MOIError:
        raise
    except ValueError as exc:
        raise MalformedInput(f"bad decomposition spec {spec!r}: {exc}") from None
    raise MalformedInput(f"unknown decomposition spec {spec!r}")


def dumps(obj) -> str:
    """Deterministic JSON text (sorted keys, shortest float repr, no NaN/Inf)."""
    return json.dumps(obj, sort_keys=True, allow_nan=False, separators=(", ", ": "))


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON: {exc}") from None
