"""Model file I/O.

Models are stored as JSON documents with expression-string transition
labels and bit-exact rationals.  Serialization is deterministic (sorted
keys, sorted transition records) so files diff cleanly and round-trip
tests can compare text.  See README for the document schema.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .model import MC_ACT, GEN_PREFIX, Csrg, ModelError, Pmdp
from .polyalg import ParseError, parse_poly, render_poly


class SchemaError(ModelError):
    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location


def _require(doc: dict, key: str, where: str):
    if key not in doc:
        raise SchemaError(where, f"missing key {key!r}")
    return doc[key]


def _parse_label(text: Any, where: str):
    if not isinstance(text, str):
        raise SchemaError(where, "probability must be an expression string")
    try:
        return parse_poly(text)
    except ParseError as exc:
        raise SchemaError(where, f"bad expression {text!r}: {exc}") from exc


def _check_names(names, where: str, generated: bool):
    for name in names:
        if not isinstance(name, str) or not name:
            raise SchemaError(where, f"bad name {name!r}")
        if name.startswith(GEN_PREFIX) and not generated:
            raise SchemaError(
                where,
                f"{name!r} uses the reserved generated-name prefix {GEN_PREFIX!r}; "
                'only documents marked "generated": true may contain it',
            )


def model_to_doc(m: Pmdp | Csrg, certificate: dict | None = None) -> dict:
    if isinstance(m, Csrg):
        doc: dict[str, Any] = {
            "kind": "csrg",
            "states": sorted(m.states),
            "initial": m.initial,
            "targets": sorted(m.targets),
            "actions1": {s: list(m.acts1[s]) for s in sorted(m.states)},
            "actions2": {s: list(m.acts2[s]) for s in sorted(m.states)},
            "kernel": [
                {
                    "state": s,
                    "a": a,
                    "b": b,
                    "dist": {t: str(p) for t, p in sorted(row.items())},
                }
                for (s, a, b), row in sorted(m.kernel.items())
            ],
        }
    else:
        pmc = m.is_pmc()
        records = []
        for (s, a, t), poly in sorted(m.trans.items()):
            rec = {"from": s, "to": t, "prob": render_poly(poly)}
            if not (pmc and a == MC_ACT):
                rec["action"] = a
            records.append(rec)
        doc = {
            "kind": "pmc" if pmc else "pmdp",
            "states": list(m.states),
            "params": list(m.params),
            "initial": m.initial,
            "transitions": records,
            "targets": {name: sorted(members) for name, members in sorted(m.targets.items())},
        }
    if any(str(n).startswith(GEN_PREFIX) for n in doc["states"]) or any(
        str(n).startswith(GEN_PREFIX) for n in doc.get("params", [])
    ):
        doc["generated"] = True
    if certificate is not None:
        doc["certificate"] = certificate
    return doc


def doc_to_model(doc: dict) -> Pmdp | Csrg:
    if not isinstance(doc, dict):
        raise SchemaError("$", "document must be an object")
    kind = doc.get("kind", "pmdp")
    generated = bool(doc.get("generated", False))
    if kind == "csrg":
        states = _require(doc, "states", "$")
        _check_names(states, "states", generated)
        kernel = {}
        for i, rec in enumerate(_require(doc, "kernel", "$")):
            where = f"kernel[{i}]"
            s = _require(rec, "state", where)
            a = _require(rec, "a", where)
            b = _require(rec, "b", where)
            dist = {}
            for t, p in _require(rec, "dist", where).items():
                if t not in states:
                    raise SchemaError(where, f"unknown state {t!r}")
                try:
                    dist[t] = Fraction(p)
                except (ValueError, ZeroDivisionError) as exc:
                    raise SchemaError(where, f"bad probability {p!r}") from exc
            kernel[(s, a, b)] = dist
        return Csrg(
            states,
            _require(doc, "initial", "$"),
            doc.get("targets", []),
            _require(doc, "actions1", "$"),
            _require(doc, "actions2", "$"),
            kernel,
        )
    if kind not in ("pmdp", "pmc"):
        raise SchemaError("kind", f"unknown model kind {kind!r}")
    states = _require(doc, "states", "$")
    params = doc.get("params", [])
    _check_names(states, "states", generated)
    _check_names(params, "params", generated)
    trans = {}
    for i, rec in enumerate(_require(doc, "transitions", "$")):
        where = f"transitions[{i}]"
        s = _require(rec, "from", where)
        t = _require(rec, "to", where)
        a = rec.get("action", MC_ACT)
        if s not in states:
            raise SchemaError(where, f"unknown source state {s!r}")
        if t not in states:
            raise SchemaError(where, f"unknown target state {t!r}")
        poly = _parse_label(_require(rec, "prob", where), where)
        if (s, a, t) in trans:
            raise SchemaError(where, f"duplicate transition ({s},{a},{t})")
        trans[(s, a, t)] = poly
    targets = doc.get("targets", {})
    if not isinstance(targets, dict):
        raise SchemaError("targets", "must map set names to state lists")
    for name, members in targets.items():
        for t in members:
            if t not in states:
                raise SchemaError(f"targets[{name}]", f"unknown state {t!r}")
    try:
        return Pmdp(states, params, _require(doc, "initial", "$"), trans, targets)
    except ModelError as exc:
        raise SchemaError("$", str(exc)) from exc


def render_doc(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def save_model(m: Pmdp | Csrg, path: str | Path, certificate: dict | None = None) -> None:
    Path(path).write_text(render_doc(model_to_doc(m, certificate)))


def load_model(path: str | Path) -> Pmdp | Csrg:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"not valid JSON: {exc}") from exc
    return doc_to_model(doc)


def load_certificate(path: str | Path) -> dict | None:
    doc = json.loads(Path(path).read_text())
    return doc.get("certificate")
