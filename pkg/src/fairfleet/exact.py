"""Exhaustive oracles: assignment enumeration, the existence problem for
feasible complete EQ1/EF1/FEQ1/FEF1 assignments, and the reduction from
PARTITION used to show that problem is hard."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Optional, Sequence, Tuple

from .fairness import Notion, check_notion, is_complete, is_feasible
from .model import Additive, Assignment, Instance

DEFAULT_BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    pass


def _branches(inst: Instance, require_feasible: bool, require_complete: bool):
    # Options per request: a driver index, or None for "leave unassigned".
    out = []
    for j in range(inst.m):
        drivers = list(inst.vehicles_for(j)) if require_feasible else list(range(inst.n))
        servable = j in inst.servable
        if require_complete:
            options = drivers if servable else [None]
        else:
            options = drivers + [None]
        out.append(options)
    return out


def search_size(inst: Instance, require_feasible: bool = True, require_complete: bool = True) -> int:
    """Number of leaves :func:`enumerate_assignments` would visit."""
    return math.prod(len(o) for o in _branches(inst, require_feasible, require_complete))


def enumerate_assignments(
    inst: Instance,
    require_feasible: bool = True,
    require_complete: bool = True,
    budget: int = DEFAULT_BUDGET,
) -> Iterator[Assignment]:
    """Yield each assignment meeting the flags exactly once.

    Requests are placed in index order. With ``require_feasible`` only
    feasible drivers are branched on; with ``require_complete`` servable
    requests must be placed and unservable ones are left out. Raises
    :class:`BudgetExceeded` up front if the tree has more than ``budget``
    leaves.
    """
    branches = _branches(inst, require_feasible, require_complete)
    size = math.prod(len(o) for o in branches)
    if size > budget:
        raise BudgetExceeded(f"{size} assignments to enumerate, budget is {budget}")
    for choice in itertools.product(*branches):
        bundles = [set() for _ in range(inst.n)]
        for j, i in enumerate(choice):
            if i is not None:
                bundles[i].add(j)
        yield Assignment(tuple(frozenset(b) for b in bundles))


@dataclass(frozen=True)
class ExistenceQuery:
    instance: Instance
    notion: Notion
    require_feasible: bool = True
    require_complete: bool = True

    def __post_init__(self):
        object.__setattr__(self, "notion", Notion(self.notion))


class Existence(NamedTuple):
    exists: bool
    witness: Optional[Assignment]


def decide_existence(q: ExistenceQuery, budget: int = DEFAULT_BUDGET) -> Existence:
    """Search for an assignment passing the query; the first one found (in
    enumeration order) is returned as the witness."""
    for asg in enumerate_assignments(q.instance, q.require_feasible, q.require_complete, budget):
        if check_notion(q.instance, asg, q.notion):
            return Existence(True, asg)
    return Existence(False, None)


@dataclass(frozen=True)
class PartitionInstance:
    """A multiset of positive integers with even sum ``2P > m >= 1``."""

    values: Tuple[int, ...]

    def __post_init__(self):
        values = tuple(self.values)
        if not values:
            raise ValueError("partition multiset is empty")
        if any(not isinstance(v, int) or isinstance(v, bool) or v <= 0 for v in values):
            raise ValueError("partition values must be positive integers")
        total = sum(values)
        if total % 2:
            raise ValueError(f"sum {total} is odd")
        if not total > len(values):
            raise ValueError(f"sum {total} must exceed the number of values {len(values)}")
        object.__setattr__(self, "values", values)

    @property
    def half(self) -> int:
        return sum(self.values) // 2

    @property
    def m(self) -> int:
        return len(self.values)


def is_valid_partition_multiset(values: Sequence[int]) -> bool:
    try:
        PartitionInstance(tuple(values))
    except ValueError:
        return False
    return True


def has_equal_partition(values: Sequence[int]) -> bool:
    """Subset-sum by enumeration; odd sums are answered without search."""
    total = sum(values)
    if total % 2:
        return False
    half = total // 2
    return any(
        sum(v for v, keep in zip(values, mask) if keep) == half
        for mask in itertools.product((0, 1), repeat=len(values))
    )


def build_partition_reduction(pi: PartitionInstance) -> Instance:
    """Three drivers, ``m`` number-requests then four special requests.

    Every driver values number-request ``j`` at ``values[j]`` and the
    specials at ``2P, 2P, 3P, 3P``. Driver 0 serves only the last two
    specials, driver 1 the number-requests and the first special, driver 2
    the number-requests and the second special.
    """
    P = pi.half
    weights = tuple(pi.values) + (2 * P, 2 * P, 3 * P, 3 * P)
    ones = (1,) * pi.m
    zeros = (0,) * pi.m
    feasibility = (
        zeros + (0, 0, 1, 1),
        ones + (1, 0, 0, 0),
        ones + (0, 1, 0, 0),
    )
    return Instance(tuple(Additive(weights) for _ in range(3)), feasibility)


def verify_reduction(pi: PartitionInstance, budget: int = DEFAULT_BUDGET) -> bool:
    """Check the reduction's biconditional on one multiset.

    True iff "an equal partition exists" agrees with "a feasible complete
    EF1 assignment of the reduced instance exists", and EQ1 and EF1 agree
    on every feasible complete assignment of the reduced instance.
    """
    inst = build_partition_reduction(pi)
    partition = has_equal_partition(pi.values)
    ef1_exists = False
    for asg in enumerate_assignments(inst, True, True, budget):
        eq1 = check_notion(inst, asg, Notion.EQ1)
        ef1 = check_notion(inst, asg, Notion.EF1)
        if eq1 != ef1:
            return False
        ef1_exists = ef1_exists or ef1
    return partition == ef1_exists


def partition_sweep(max_size: int, max_value: int) -> Iterator[Tuple[int, ...]]:
    """All valid multisets with at most ``max_size`` values in ``1..max_value``."""
    for size in range(1, max_size + 1):
        for values in itertools.combinations_with_replacement(range(1, max_value + 1), size):
            if is_valid_partition_multiset(values):
                yield values


def witness_is_sound(q: ExistenceQuery, asg: Assignment) -> bool:
    """Re-check a witness against every predicate the query asked for."""
    inst = q.instance
    return (
        (not q.require_feasible or is_feasible(inst, asg))
        and (not q.require_complete or is_complete(inst, asg))
        and check_notion(inst, asg, q.notion)
    )
