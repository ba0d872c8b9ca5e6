"""Named fixture instances and a seeded random instance generator."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Sequence

from .exact import PartitionInstance, build_partition_reduction
from .model import (
    Additive,
    Assignment,
    BonusSuperadditive,
    BudgetAdditive,
    ExplicitTable,
    Instance,
    as_rational,
    unit_feasibility,
)

FIXTURES = ("example1", "example2", "theorem1", "theorem3", "partition")
VARIANTS = ("additive", "budget_additive", "bonus_superadditive", "explicit_table")


@dataclass(frozen=True)
class Fixture:
    name: str
    instance: Instance
    references: Dict[str, Assignment] = field(default_factory=dict)
    notes: Dict[str, object] = field(default_factory=dict)


def _bundles(*bundles) -> Assignment:
    return Assignment(tuple(frozenset(b) for b in bundles))


def example1(epsilon: Fraction = Fraction(1, 10)) -> Fixture:
    """Two vehicles on [0, 1] at 0 and 1, requests at eps and 2*eps, one unit
    of profit per visit.

    The notes carry the two route lengths: v0 serving both requests in order
    (unfair) and each vehicle driving to one request (fair). Route lengths
    are plain distance sums along those fixed routes.
    """
    eps = as_rational(epsilon)
    if not 0 <= eps < Fraction(1, 4):
        raise ValueError(f"epsilon must lie in [0, 1/4), got {eps}")
    vehicles = (Fraction(0), Fraction(1))
    requests = (eps, 2 * eps)
    unfair = abs(requests[0] - vehicles[0]) + abs(requests[1] - requests[0])
    fair = abs(requests[0] - vehicles[0]) + abs(requests[1] - vehicles[1])
    inst = Instance((Additive((1, 1)), Additive((1, 1))), unit_feasibility(2, 2))
    return Fixture(
        "example1",
        inst,
        {"unfair": _bundles({0, 1}, ()), "fair": _bundles({0}, {1})},
        {
            "epsilon": eps,
            "vehicle_positions": vehicles,
            "request_positions": requests,
            "objective_unfair": unfair,
            "objective_fair": fair,
        },
    )


def example2() -> Fixture:
    """Two drivers, four requests; driver 0 values each at 4, driver 1 at 1."""
    inst = Instance((Additive((4,) * 4), Additive((1,) * 4)), unit_feasibility(2, 4))
    return Fixture(
        "example2",
        inst,
        {"eq1": _bundles({0}, {1, 2, 3}), "ef1": _bundles({0, 2}, {1, 3})},
    )


def theorem1() -> Fixture:
    """Unit profits; only vehicle 0 can serve anything."""
    inst = Instance((Additive((1, 1)), Additive((1, 1))), ((1, 1), (0, 0)))
    return Fixture("theorem1", inst, {"feasible_complete": _bundles({0, 1}, ())})


def theorem3() -> Fixture:
    """Profits (1, 1, 5) for both drivers; vehicle 1 cannot serve request 0."""
    inst = Instance((Additive((1, 1, 5)), Additive((1, 1, 5))), ((1, 1, 1), (0, 1, 1)))
    return Fixture(
        "theorem3",
        inst,
        {
            "fair_infeasible": _bundles({2}, {0, 1}),
            "feasible_unfair": _bundles({0, 1, 2}, ()),
        },
    )


def partition(values: Sequence[int]) -> Fixture:
    pi = PartitionInstance(tuple(values))
    return Fixture("partition", build_partition_reduction(pi), {}, {"values": pi.values, "half": pi.half})


def generate_fixture(name: str, epsilon=None, values: Optional[Sequence[int]] = None) -> Fixture:
    if name == "example1":
        return example1(Fraction(1, 10) if epsilon is None else epsilon)
    if name == "example2":
        return example2()
    if name == "theorem1":
        return theorem1()
    if name == "theorem3":
        return theorem3()
    if name == "partition":
        if values is None:
            raise ValueError("the partition fixture needs a multiset")
        return partition(values)
    raise ValueError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")


def _random_weight(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(0, 12), rng.choice((1, 1, 2, 3)))


def _random_table(rng: random.Random, m: int) -> ExplicitTable:
    # Monotone by construction: each subset is worth at least its best
    # one-smaller subset, plus a random non-negative increment.
    support = tuple(sorted(rng.sample(range(m), min(m, rng.randint(1, 5))))) if m else ()
    table = {frozenset(): Fraction(0)}
    for k in range(1, len(support) + 1):
        for S in itertools.combinations(support, k):
            S = frozenset(S)
            floor = max(table[S - {j}] for j in S)
            table[S] = floor + Fraction(rng.randint(0, 6), rng.choice((1, 2)))
    return ExplicitTable(m, support, table)


def random_profit(rng: random.Random, variant: str, m: int):
    if variant == "explicit_table":
        return _random_table(rng, m)
    weights = tuple(_random_weight(rng) for _ in range(m))
    if variant == "additive":
        return Additive(weights)
    if variant == "budget_additive":
        return BudgetAdditive(weights, Fraction(rng.randint(0, 4 * m + 4), rng.choice((1, 2))))
    if variant == "bonus_superadditive":
        return BonusSuperadditive(weights, Fraction(rng.randint(0, 3), rng.choice((1, 2))))
    raise ValueError(f"unknown profit variant {variant!r}")


def generate_random(
    seed: int,
    n: int,
    m: int,
    variants: Sequence[str] = VARIANTS,
    density: float = 1.0,
) -> Instance:
    """Each driver draws a variant from ``variants``; each ``f_ij`` is 1 with
    probability ``density`` (0 and 1 are exact)."""
    if not 0 <= density <= 1:
        raise ValueError(f"density must lie in [0, 1], got {density}")
    variants = tuple(variants)
    for v in variants:
        if v not in VARIANTS:
            raise ValueError(f"unknown profit variant {v!r}")
    rng = random.Random(seed)
    profits = tuple(random_profit(rng, rng.choice(variants), m) for _ in range(n))
    rows = tuple(tuple(int(rng.random() < density) for _ in range(m)) for _ in range(n))
    return Instance(profits, rows, m)


def random_assignment(rng: random.Random, inst: Instance, p_unassigned: float = 0.2) -> Assignment:
    """Each request goes to a uniform driver, or nowhere with ``p_unassigned``."""
    bundles = [set() for _ in range(inst.n)]
    for j in range(inst.m):
        if inst.n and rng.random() >= p_unassigned:
            bundles[rng.randrange(inst.n)].add(j)
    return Assignment(tuple(frozenset(b) for b in bundles))
