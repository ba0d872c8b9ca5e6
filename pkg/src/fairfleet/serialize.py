"""Canonical JSON documents for instances, assignments and reports.

Canonical form is ``json.dumps(..., sort_keys=True, separators=(",", ":"))``.
Rationals are written as bare integers when integral and as
``"numerator/denominator"`` strings otherwise.

Instance document::

    {"schema": 1, "n": 2, "m": 3,
     "profits": [{"type": "additive", "weights": [1, 1, 5]}, ...],
     "feasibility": {"matrix": [[1, 1, 1], [0, 1, 1]]},
     "metadata": {"name": "theorem3"}}

``feasibility`` may instead hold ``{"constraints": {"capacities": [...],
"demands": [...], "bays": [[l, w, h], ...], "packages": [...]}}`` which is
compiled to a matrix on load. Table profits are
``{"type": "explicit_table", "support": [0, 1], "table": {"": 0, "0": 2,
"0,1": 3, "1": 1}}`` with comma-joined subset keys.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Union

from .algorithms import RoundTrace
from .fairness import FairnessReport, PairWitness, RequestWitness
from .model import (
    Additive,
    Assignment,
    BonusSuperadditive,
    BudgetAdditive,
    ConstraintSpec,
    ExplicitTable,
    Instance,
    InvalidInstanceError,
    ProfitFunction,
    as_rational,
    compile_feasibility,
    validate_instance,
)

SCHEMA_VERSION = 1


class DocumentError(ValueError):
    """Malformed document; ``where`` names the offending field."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f"line {e.lineno} column {e.colno}", e.msg) from None


def encode_rational(x: Fraction) -> Union[int, str]:
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def decode_rational(v, where: str) -> Fraction:
    if isinstance(v, bool) or not isinstance(v, (int, str)):
        raise DocumentError(where, f"expected an integer or 'p/q' string, got {v!r}")
    try:
        return as_rational(v)
    except (ValueError, ZeroDivisionError):
        raise DocumentError(where, f"bad rational {v!r}") from None


def _require(d: dict, key: str, where: str):
    if not isinstance(d, dict):
        raise DocumentError(where, "expected an object")
    if key not in d:
        raise DocumentError(f"{where}.{key}", "missing")
    return d[key]


def _rational_list(v, where):
    if not isinstance(v, list):
        raise DocumentError(where, "expected a list")
    return tuple(decode_rational(x, f"{where}[{t}]") for t, x in enumerate(v))


# profits


def encode_profit(pf: ProfitFunction) -> dict:
    if isinstance(pf, ExplicitTable):
        table = {",".join(map(str, sorted(S))): encode_rational(v) for S, v in pf.table.items()}
        return {"type": pf.kind, "support": list(pf.support), "table": table}
    out = {"type": pf.kind, "weights": [encode_rational(w) for w in pf.weights]}
    if isinstance(pf, BudgetAdditive):
        out["cap"] = encode_rational(pf.cap)
    elif isinstance(pf, BonusSuperadditive):
        out["bonus"] = encode_rational(pf.bonus)
    return out


def decode_profit(d: dict, m: int, where: str) -> ProfitFunction:
    kind = _require(d, "type", where)
    if kind == "explicit_table":
        support = _require(d, "support", where)
        raw = _require(d, "table", where)
        if not isinstance(raw, dict):
            raise DocumentError(f"{where}.table", "expected an object")
        table = {}
        for key, v in raw.items():
            try:
                S = frozenset(int(x) for x in key.split(",")) if key else frozenset()
            except ValueError:
                raise DocumentError(f"{where}.table", f"bad subset key {key!r}") from None
            table[S] = decode_rational(v, f"{where}.table[{key!r}]")
        try:
            return ExplicitTable(m, tuple(support), table)
        except (ValueError, IndexError, TypeError) as e:
            raise DocumentError(where, str(e)) from None
    weights = _rational_list(_require(d, "weights", where), f"{where}.weights")
    if len(weights) != m:
        raise DocumentError(f"{where}.weights", f"{len(weights)} weights for {m} requests")
    if kind == "additive":
        return Additive(weights)
    if kind == "budget_additive":
        return BudgetAdditive(weights, decode_rational(_require(d, "cap", where), f"{where}.cap"))
    if kind == "bonus_superadditive":
        return BonusSuperadditive(weights, decode_rational(_require(d, "bonus", where), f"{where}.bonus"))
    raise DocumentError(f"{where}.type", f"unknown profit type {kind!r}")


# instances


def encode_constraints(spec: ConstraintSpec) -> dict:
    out = {
        "capacities": [encode_rational(c) for c in spec.capacities],
        "demands": [encode_rational(c) for c in spec.demands],
    }
    if spec.bays is not None:
        out["bays"] = [[encode_rational(x) for x in t] for t in spec.bays]
        out["packages"] = [[encode_rational(x) for x in t] for t in spec.packages]
    return out


def decode_constraints(d: dict, where: str) -> ConstraintSpec:
    caps = _rational_list(_require(d, "capacities", where), f"{where}.capacities")
    demands = _rational_list(_require(d, "demands", where), f"{where}.demands")
    bays = packages = None
    if "bays" in d or "packages" in d:
        bays = tuple(_rational_list(t, f"{where}.bays[{x}]") for x, t in enumerate(_require(d, "bays", where)))
        packages = tuple(
            _rational_list(t, f"{where}.packages[{x}]") for x, t in enumerate(_require(d, "packages", where))
        )
    try:
        return ConstraintSpec(caps, demands, bays, packages)
    except ValueError as e:
        raise DocumentError(where, str(e)) from None


@dataclass(frozen=True)
class InstanceDocument:
    """An instance plus what its file said beyond the instance itself."""

    instance: Instance
    constraints: Optional[ConstraintSpec] = None
    metadata: Dict[str, Any] = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        inst = self.instance
        if self.constraints is not None:
            feas = {"constraints": encode_constraints(self.constraints)}
        else:
            feas = {"matrix": [list(row) for row in inst.feasibility]}
        out = {
            "schema": SCHEMA_VERSION,
            "n": inst.n,
            "m": inst.m,
            "profits": [encode_profit(pf) for pf in inst.profits],
            "feasibility": feas,
        }
        if self.metadata:
            out["metadata"] = self.metadata
        return out


def document_from_json(d) -> InstanceDocument:
    where = "instance"
    schema = _require(d, "schema", where)
    if schema != SCHEMA_VERSION:
        raise DocumentError(f"{where}.schema", f"unsupported schema version {schema!r}")
    n = _require(d, "n", where)
    m = _require(d, "m", where)
    if not (isinstance(n, int) and isinstance(m, int) and n >= 0 and m >= 0):
        raise DocumentError(where, "n and m must be non-negative integers")
    profits = _require(d, "profits", where)
    if not isinstance(profits, list) or len(profits) != n:
        raise DocumentError(f"{where}.profits", f"expected a list of {n} profit blocks")
    pfs = tuple(decode_profit(p, m, f"{where}.profits[{i}]") for i, p in enumerate(profits))
    feas = _require(d, "feasibility", where)
    constraints = None
    if isinstance(feas, dict) and "constraints" in feas:
        constraints = decode_constraints(feas["constraints"], f"{where}.feasibility.constraints")
        matrix = compile_feasibility(constraints)
    else:
        matrix = _require(feas, "matrix", f"{where}.feasibility")
    try:
        inst = Instance(pfs, tuple(tuple(r) for r in matrix), m)
    except (ValueError, TypeError) as e:
        raise DocumentError(f"{where}.feasibility", str(e)) from None
    metadata = d.get("metadata", {})
    if not isinstance(metadata, dict):
        raise DocumentError(f"{where}.metadata", "expected an object")
    return InstanceDocument(inst, constraints, metadata)


def parse_document(text: str, validate: bool = True) -> InstanceDocument:
    doc = document_from_json(_loads(text))
    if validate:
        verdict = validate_instance(doc.instance)
        if not verdict:
            raise InvalidInstanceError(verdict)
    return doc


def serialize_document(doc: InstanceDocument) -> str:
    return dumps(doc.to_json())


def parse_instance(text: str) -> Instance:
    """Parse and validate an instance document."""
    return parse_document(text).instance


def serialize_instance(inst: Instance, metadata: Optional[dict] = None) -> str:
    return serialize_document(InstanceDocument(inst, None, metadata or {}))


def instance_digest(inst: Instance) -> str:
    return hashlib.sha256(serialize_instance(inst).encode()).hexdigest()


# assignments


def encode_assignment(asg: Assignment) -> List[List[int]]:
    return asg.as_lists()


def decode_assignment(v, where: str = "assignment") -> Assignment:
    if isinstance(v, dict):
        v = _require(v, "bundles", where)
    if not isinstance(v, list) or not all(isinstance(b, list) for b in v):
        raise DocumentError(where, "expected a list of index lists")
    for b in v:
        if not all(isinstance(j, int) and not isinstance(j, bool) for j in b):
            raise DocumentError(where, "request indices must be integers")
    try:
        return Assignment(tuple(frozenset(b) for b in v))
    except ValueError as e:
        raise DocumentError(where, str(e)) from None


def parse_assignment(text: str) -> Assignment:
    return decode_assignment(_loads(text))


def serialize_assignment(asg: Assignment) -> str:
    return dumps({"bundles": encode_assignment(asg), "schema": SCHEMA_VERSION})


# reports


def encode_witness(w) -> dict:
    if isinstance(w, PairWitness):
        return {"i": w.i, "k": w.k, "own": encode_rational(w.own), "other": encode_rational(w.other)}
    return {"driver": w.driver, "request": w.request}


def decode_witness(d: dict):
    if "i" in d:
        return PairWitness(d["i"], d["k"], decode_rational(d["own"], "witness.own"),
                           decode_rational(d["other"], "witness.other"))
    return RequestWitness(d["driver"], d["request"])


def encode_fairness(rep: FairnessReport) -> dict:
    return {
        "verdicts": dict(rep.verdicts),
        "witnesses": {k: [encode_witness(w) for w in ws] for k, ws in rep.witnesses.items()},
    }


def decode_fairness(d: dict) -> FairnessReport:
    return FairnessReport(
        dict(_require(d, "verdicts", "fairness")),
        {k: [decode_witness(w) for w in ws] for k, ws in d.get("witnesses", {}).items()},
    )


def encode_round(t: RoundTrace) -> dict:
    return {
        "index": t.index,
        "request": t.request,
        "driver": t.driver,
        "retired": t.retired,
        "cycles": [list(c) for c in t.cycles],
        "pre_cycles": [list(c) for c in t.pre_cycles],
        "returned": sorted(t.returned),
        "welfare": encode_rational(t.welfare),
        "assignment": encode_assignment(t.assignment),
    }


def decode_round(d: dict) -> RoundTrace:
    return RoundTrace(
        index=d["index"],
        request=d["request"],
        driver=d["driver"],
        welfare=decode_rational(d["welfare"], "round.welfare"),
        assignment=decode_assignment(d["assignment"], "round.assignment"),
        cycles=tuple(tuple(c) for c in d["cycles"]),
        returned=frozenset(d["returned"]),
        pre_cycles=tuple(tuple(c) for c in d["pre_cycles"]),
        retired=d["retired"],
    )


@dataclass(frozen=True)
class RunReport:
    algorithm: str
    instance_sha256: str
    assignment: Assignment
    fairness: FairnessReport
    rounds: tuple
    seconds: float

    @property
    def round_count(self) -> int:
        return len(self.rounds)

    def to_json(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "instance_sha256": self.instance_sha256,
            "assignment": encode_assignment(self.assignment),
            "fairness": encode_fairness(self.fairness),
            "rounds": [encode_round(t) for t in self.rounds],
            "round_count": self.round_count,
            "seconds": self.seconds,
        }


def report_from_json(d: dict) -> RunReport:
    return RunReport(
        algorithm=_require(d, "algorithm", "report"),
        instance_sha256=_require(d, "instance_sha256", "report"),
        assignment=decode_assignment(_require(d, "assignment", "report")),
        fairness=decode_fairness(_require(d, "fairness", "report")),
        rounds=tuple(decode_round(t) for t in _require(d, "rounds", "report")),
        seconds=_require(d, "seconds", "report"),
    )


def parse_report(text: str) -> RunReport:
    return report_from_json(_loads(text))


def serialize_report(rep: RunReport) -> str:
    return dumps(rep.to_json())


def write_atomic(path: str, text: str) -> None:
    """Write via a temp file in the target directory, then rename over."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
            f.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
