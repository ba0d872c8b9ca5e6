"""Feasibility, completeness and the EQ1 / EF1 / FEQ1 / FEF1 checkers.

For an ordered pair of drivers ``(i, k)`` every notion compares an *own*
profit against the profit of some *other* bundle with one request removed:

    EQ1   own p_i(R_i)    other R_k    valued by p_k
    EF1   own p_i(R_i)    other R_k    valued by p_i
    FEQ1  own p_i(F_ii)   other F_ik   valued by p_k
    FEF1  own p_i(F_ii)   other F_ik   valued by p_i

where ``F_ik`` is the part of ``R_k`` that vehicle ``i`` can serve.

The pair is satisfied when the other bundle is empty or when some single
removal brings its value down to the own profit. Pairs with ``i == k`` can
never be violated (monotonicity) and are skipped. None of the checkers
require the assignment to be feasible or complete.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .model import Assignment, Instance, check_assignment_shape, feasible_subset


class Notion(str, enum.Enum):
    EQ1 = "EQ1"
    EF1 = "EF1"
    FEQ1 = "FEQ1"
    FEF1 = "FEF1"

    @classmethod
    def parse(cls, s: str) -> "Notion":
        try:
            return cls(s.upper())
        except ValueError:
            raise ValueError(f"unknown fairness notion {s!r}") from None

    @property
    def restricted(self) -> bool:
        # FEQ1/FEF1 compare only requests feasible for the evaluating driver.
        return self in (Notion.FEQ1, Notion.FEF1)

    @property
    def envy_based(self) -> bool:
        return self in (Notion.EF1, Notion.FEF1)


@dataclass(frozen=True)
class PairWitness:
    """A violated ordered pair: ``own < other`` where ``other`` is the
    smallest value of the compared bundle over all single removals."""

    i: int
    k: int
    own: Fraction
    other: Fraction


@dataclass(frozen=True)
class RequestWitness:
    """A request breaking feasibility or completeness.

    ``driver`` holds the request, or is None when a servable request was
    left unassigned.
    """

    driver: Optional[int]
    request: int


class _Profits:
    # Per-call memo of p_i(S); checkers evaluate the same bundles repeatedly.
    def __init__(self, inst: Instance):
        self.inst = inst
        self.cache: Dict[Tuple[int, frozenset], Fraction] = {}

    def __call__(self, i: int, S: frozenset) -> Fraction:
        key = (i, S)
        v = self.cache.get(key)
        if v is None:
            v = self.cache[key] = self.inst.profit(i, S)
        return v


def _pair_terms(inst, asg, notion, i, k, p):
    if notion.restricted:
        own = p(i, feasible_subset(inst, i, asg[i]))
        other = feasible_subset(inst, i, asg[k])
    else:
        own = p(i, asg[i])
        other = asg[k]
    valuer = i if notion.envy_based else k
    return own, other, valuer


def _pair_ok(inst, asg, notion, i, k, p) -> bool:
    own, other, valuer = _pair_terms(inst, asg, notion, i, k, p)
    if not other:
        return True
    return any(own >= p(valuer, other - {j}) for j in sorted(other))


def _pair_witness(inst, asg, notion, i, k, p) -> Optional[PairWitness]:
    own, other, valuer = _pair_terms(inst, asg, notion, i, k, p)
    if not other:
        return None
    best = min(p(valuer, other - {j}) for j in other)
    if own >= best:
        return None
    return PairWitness(i, k, own, best)


def check_notion(inst: Instance, asg: Assignment, notion: Notion) -> bool:
    check_assignment_shape(inst, asg)
    notion = Notion(notion)
    p = _Profits(inst)
    return all(
        _pair_ok(inst, asg, notion, i, k, p)
        for i in range(inst.n)
        for k in range(inst.n)
        if i != k
    )


def notion_violations(inst: Instance, asg: Assignment, notion: Notion) -> List[PairWitness]:
    """Every ordered pair violating ``notion``, in (i, k) order."""
    check_assignment_shape(inst, asg)
    notion = Notion(notion)
    p = _Profits(inst)
    out = []
    for i in range(inst.n):
        for k in range(inst.n):
            if i != k:
                w = _pair_witness(inst, asg, notion, i, k, p)
                if w is not None:
                    out.append(w)
    return out


def check_eq1(inst: Instance, asg: Assignment) -> bool:
    return check_notion(inst, asg, Notion.EQ1)


def check_ef1(inst: Instance, asg: Assignment) -> bool:
    return check_notion(inst, asg, Notion.EF1)


def check_feq1(inst: Instance, asg: Assignment) -> bool:
    return check_notion(inst, asg, Notion.FEQ1)


def check_fef1(inst: Instance, asg: Assignment) -> bool:
    return check_notion(inst, asg, Notion.FEF1)


def feasibility_violations(inst: Instance, asg: Assignment) -> List[RequestWitness]:
    check_assignment_shape(inst, asg)
    return [
        RequestWitness(i, j)
        for i in range(inst.n)
        for j in sorted(asg[i] - inst.feasible_for(i))
    ]


def completeness_violations(inst: Instance, asg: Assignment) -> List[RequestWitness]:
    check_assignment_shape(inst, asg)
    holder = {j: i for i, b in enumerate(asg) for j in b}
    out = []
    for j in range(inst.m):
        if j in inst.servable and j not in holder:
            out.append(RequestWitness(None, j))
        elif j not in inst.servable and j in holder:
            out.append(RequestWitness(holder[j], j))
    return out


def is_feasible(inst: Instance, asg: Assignment) -> bool:
    """Every assigned request is feasible for its driver's vehicle."""
    check_assignment_shape(inst, asg)
    return all(asg[i] <= inst.feasible_for(i) for i in range(inst.n))


def is_complete(inst: Instance, asg: Assignment) -> bool:
    """Exactly the servable requests are assigned."""
    check_assignment_shape(inst, asg)
    return asg.assigned == inst.servable


NOTIONS = ("feasible", "complete") + tuple(n.value for n in Notion)


@dataclass(frozen=True)
class FairnessReport:
    verdicts: Dict[str, bool]
    witnesses: Dict[str, list] = field(default_factory=dict)

    def __getitem__(self, notion: str) -> bool:
        return self.verdicts[notion]

    @property
    def all_hold(self) -> bool:
        return all(self.verdicts.values())


def fairness_report(inst: Instance, asg: Assignment) -> FairnessReport:
    """All six verdicts; failed notions carry their violating witnesses."""
    found = {
        "feasible": feasibility_violations(inst, asg),
        "complete": completeness_violations(inst, asg),
    }
    for notion in Notion:
        found[notion.value] = notion_violations(inst, asg, notion)
    verdicts = {name: not found[name] for name in NOTIONS}
    witnesses = {name: found[name] for name in NOTIONS if found[name]}
    return FairnessReport(verdicts, witnesses)
