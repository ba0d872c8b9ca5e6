"""Instances, monotone profit oracles, feasibility and assignments.

All profit values are exact :class:`fractions.Fraction` numbers. Request and
vehicle indices are 0-based throughout the package.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Tuple, Union

Rational = Union[int, str, Fraction]
FeasibilityMatrix = Tuple[Tuple[int, ...], ...]

MAX_TABLE_SUPPORT = 16


def as_rational(x) -> Fraction:
    """Coerce ``x`` to a Fraction. Floats are read by their decimal repr."""
    if isinstance(x, bool):
        raise TypeError("booleans are not profit values")
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x!r}")
        return Fraction(repr(x))
    return Fraction(x)


def _lcm_of_denominators(values: Iterable[Fraction]) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, v.denominator)
    return out


def _check_indices(S: Iterable[int], m: int) -> frozenset:
    S = frozenset(S)
    for j in S:
        if not isinstance(j, int) or not 0 <= j < m:
            raise IndexError(f"request index {j!r} out of range [0, {m})")
    return S


class ProfitFunction:
    """Base class for the monotone set functions ``p_i : 2^R -> Q>=0``.

    Subclasses implement ``_value`` on a frozenset of in-range indices and
    expose ``m`` (number of requests) and ``denominator`` (a common
    denominator of every value the function can take).
    """

    m: int
    kind: str = ""

    def _value(self, S: frozenset) -> Fraction:
        raise NotImplementedError

    @property
    def denominator(self) -> int:
        raise NotImplementedError

    def __call__(self, S: Iterable[int]) -> Fraction:
        return evaluate_profit(self, S)


class _Vector(ProfitFunction):
    # Shared storage for variants built on a per-request weight vector:
    # integer numerators over one common denominator so that sums stay cheap.
    weights: Tuple[Fraction, ...]

    def _scale(self, extra: Sequence[Fraction] = ()) -> None:
        ws = tuple(as_rational(w) for w in self.weights)
        extra = tuple(as_rational(e) for e in extra)
        den = _lcm_of_denominators(ws + extra)
        object.__setattr__(self, "weights", ws)
        object.__setattr__(self, "_den", den)
        object.__setattr__(self, "_nums", tuple(int(w * den) for w in ws))

    @property
    def m(self) -> int:
        return len(self.weights)

    @property
    def denominator(self) -> int:
        return self._den

    def _sum_nums(self, S: frozenset) -> int:
        nums = self._nums
        return sum(nums[j] for j in S)


@dataclass(frozen=True)
class Additive(_Vector):
    """``p(S) = sum of weights[j] for j in S``."""

    weights: Tuple[Fraction, ...]
    kind = "additive"

    def __post_init__(self):
        self._scale()

    def _value(self, S):
        return Fraction(self._sum_nums(S), self._den)


@dataclass(frozen=True)
class BudgetAdditive(_Vector):
    """Additive value capped at ``cap``: ``p(S) = min(sum, cap)``."""

    weights: Tuple[Fraction, ...]
    cap: Fraction
    kind = "budget_additive"

    def __post_init__(self):
        object.__setattr__(self, "cap", as_rational(self.cap))
        self._scale([self.cap])

    def _value(self, S):
        return min(Fraction(self._sum_nums(S), self._den), self.cap)


@dataclass(frozen=True)
class BonusSuperadditive(_Vector):
    """Additive value plus ``bonus`` for every unordered pair in the bundle."""

    weights: Tuple[Fraction, ...]
    bonus: Fraction
    kind = "bonus_superadditive"

    def __post_init__(self):
        object.__setattr__(self, "bonus", as_rational(self.bonus))
        self._scale([self.bonus])

    def _value(self, S):
        k = len(S)
        return Fraction(self._sum_nums(S), self._den) + self.bonus * (k * (k - 1) // 2)


@dataclass(frozen=True)
class ExplicitTable(ProfitFunction):
    """A general set function given by its table over ``support``.

    Requests outside the support are worth nothing:
    ``p(S) = table[S & support]``. The table must list every subset of the
    support; the empty set may be omitted and then defaults to 0.
    """

    m: int
    support: Tuple[int, ...]
    table: Mapping[frozenset, Fraction] = field(compare=False)
    kind = "explicit_table"

    def __post_init__(self):
        support = tuple(sorted(set(self.support)))
        if len(support) > MAX_TABLE_SUPPORT:
            raise ValueError(f"table support has {len(support)} requests (max {MAX_TABLE_SUPPORT})")
        _check_indices(support, self.m)
        bit = {j: 1 << t for t, j in enumerate(support)}
        values = [None] * (1 << len(support))
        for key, v in self.table.items():
            key = frozenset(key)
            if not key <= set(support):
                raise ValueError(f"table entry {sorted(key)} lies outside support {list(support)}")
            values[sum(bit[j] for j in key)] = as_rational(v)
        if values[0] is None:
            values[0] = Fraction(0)
        missing = [mask for mask, v in enumerate(values) if v is None]
        if missing:
            subset = [j for j in support if missing[0] & bit[j]]
            raise ValueError(f"table has no entry for subset {subset}")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "_bit", bit)
        object.__setattr__(self, "_values", tuple(values))
        object.__setattr__(
            self,
            "table",
            {frozenset(j for j in support if mask & bit[j]): v for mask, v in enumerate(values)},
        )

    def __eq__(self, other):
        if not isinstance(other, ExplicitTable):
            return NotImplemented
        return (self.m, self.support, self._values) == (other.m, other.support, other._values)

    def __hash__(self):
        return hash((self.m, self.support, self._values))

    @property
    def denominator(self) -> int:
        return _lcm_of_denominators(self._values)

    def _mask(self, S: frozenset) -> int:
        bit = self._bit
        return sum(bit[j] for j in S if j in bit)

    def _value(self, S):
        return self._values[self._mask(S)]


def evaluate_profit(pf: ProfitFunction, S: Iterable[int]) -> Fraction:
    """Return ``p(S)``; raises IndexError on out-of-range request indices."""
    return pf._value(_check_indices(S, pf.m))


def marginal_profit(pf: ProfitFunction, S: Iterable[int], j: int) -> Fraction:
    """Return ``p(S | {j}) - p(S)`` for a request ``j`` not in ``S``."""
    S = _check_indices(S, pf.m)
    _check_indices((j,), pf.m)
    if j in S:
        raise ValueError(f"request {j} is already in the bundle")
    return pf._value(S | {j}) - pf._value(S)


@dataclass(frozen=True)
class ConstraintSpec:
    """Per-vehicle capacities and per-request demands, with optional 3-D sizes.

    ``bays[i]`` and ``packages[j]`` are (length, width, height) triples.
    Either both are given or neither is.
    """

    capacities: Tuple[Fraction, ...]
    demands: Tuple[Fraction, ...]
    bays: Optional[Tuple[Tuple[Fraction, Fraction, Fraction], ...]] = None
    packages: Optional[Tuple[Tuple[Fraction, Fraction, Fraction], ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "capacities", tuple(as_rational(c) for c in self.capacities))
        object.__setattr__(self, "demands", tuple(as_rational(d) for d in self.demands))
        if (self.bays is None) != (self.packages is None):
            raise ValueError("bays and packages must be given together")
        if self.bays is not None:
            bays = tuple(tuple(as_rational(x) for x in b) for b in self.bays)
            packages = tuple(tuple(as_rational(x) for x in p) for p in self.packages)
            if len(bays) != len(self.capacities) or len(packages) != len(self.demands):
                raise ValueError("dimension lists must match vehicle and request counts")
            if any(len(t) != 3 for t in bays + packages):
                raise ValueError("3-D dimensions must be triples")
            object.__setattr__(self, "bays", bays)
            object.__setattr__(self, "packages", packages)
        values = list(self.capacities) + list(self.demands)
        if self.bays is not None:
            values += [x for t in self.bays + self.packages for x in t]
        if any(v < 0 for v in values):
            raise ValueError("capacities, demands and dimensions must be non-negative")


def compile_feasibility(spec: ConstraintSpec) -> FeasibilityMatrix:
    """Feasible iff the demand fits the capacity and, when 3-D sizes are
    given, the sorted package triple fits component-wise in the sorted bay
    triple (rotations allowed, no tilting)."""
    rows = []
    for i, cap in enumerate(spec.capacities):
        row = []
        for j, demand in enumerate(spec.demands):
            ok = demand <= cap
            if ok and spec.bays is not None:
                bay = sorted(spec.bays[i])
                pkg = sorted(spec.packages[j])
                ok = all(p <= b for p, b in zip(pkg, bay))
            row.append(int(ok))
        rows.append(tuple(row))
    return tuple(rows)


@dataclass(frozen=True)
class Instance:
    """``n`` drivers with profit oracles and an ``n x m`` 0/1 feasibility matrix.

    ``num_requests`` is only needed when ``n == 0``; otherwise it is read
    off the matrix (and checked if given).
    """

    profits: Tuple[ProfitFunction, ...]
    feasibility: FeasibilityMatrix
    num_requests: Optional[int] = None

    def __post_init__(self):
        profits = tuple(self.profits)
        rows = tuple(tuple(int(x) for x in row) for row in self.feasibility)
        if len(rows) != len(profits):
            raise ValueError(f"{len(profits)} profit functions but {len(rows)} feasibility rows")
        m = self.num_requests
        if m is None:
            if not rows:
                raise ValueError("num_requests is required when there are no vehicles")
            m = len(rows[0])
        if m < 0:
            raise ValueError("negative request count")
        for i, row in enumerate(rows):
            if len(row) != m:
                raise ValueError(f"feasibility row {i} has {len(row)} entries, expected {m}")
            if any(x not in (0, 1) for x in row):
                raise ValueError(f"feasibility row {i} has entries other than 0/1")
        object.__setattr__(self, "profits", profits)
        object.__setattr__(self, "feasibility", rows)
        object.__setattr__(self, "num_requests", m)
        feasible = tuple(frozenset(j for j in range(m) if row[j]) for row in rows)
        object.__setattr__(self, "_feasible", feasible)
        object.__setattr__(self, "_servable", frozenset().union(*feasible))

    @property
    def n(self) -> int:
        return len(self.profits)

    @property
    def m(self) -> int:
        return self.num_requests

    def feasible_for(self, i: int) -> frozenset:
        """Requests vehicle ``i`` can serve."""
        return self._feasible[i]

    @property
    def servable(self) -> frozenset:
        """Requests feasible for at least one vehicle."""
        return self._servable

    def vehicles_for(self, j: int) -> Tuple[int, ...]:
        return tuple(i for i in range(self.n) if self.feasibility[i][j])

    def profit(self, i: int, S: Iterable[int]) -> Fraction:
        return evaluate_profit(self.profits[i], S)


def feasible_subset(inst: Instance, i: int, S: Iterable[int]) -> frozenset:
    """``{j in S | f_ij = 1}``."""
    return inst.feasible_for(i).intersection(S)


@dataclass(frozen=True)
class Assignment:
    """Pairwise-disjoint bundles of request indices, one per driver.

    Requests may be left out (partial assignments are allowed).
    """

    bundles: Tuple[frozenset, ...]

    def __post_init__(self):
        bundles = tuple(frozenset(b) for b in self.bundles)
        seen = set()
        for i, b in enumerate(bundles):
            overlap = seen & b
            if overlap:
                raise ValueError(f"request {min(overlap)} appears in more than one bundle (again in {i})")
            seen |= b
        object.__setattr__(self, "bundles", bundles)

    @classmethod
    def empty(cls, n: int) -> "Assignment":
        return cls((frozenset(),) * n)

    def __len__(self):
        return len(self.bundles)

    def __getitem__(self, i: int) -> frozenset:
        return self.bundles[i]

    def __iter__(self):
        return iter(self.bundles)

    @property
    def assigned(self) -> frozenset:
        return frozenset().union(*self.bundles)

    def replace(self, i: int, bundle: Iterable[int]) -> "Assignment":
        bundles = list(self.bundles)
        bundles[i] = frozenset(bundle)
        return Assignment(tuple(bundles))

    def as_lists(self) -> list:
        return [sorted(b) for b in self.bundles]

    def __repr__(self):
        return f"Assignment({self.as_lists()})"


class InvalidInstanceError(ValueError):
    def __init__(self, verdict: "Validation"):
        super().__init__(verdict.reason)
        self.verdict = verdict


@dataclass(frozen=True)
class Validation:
    """Outcome of :func:`validate_instance`. Truthy iff the instance is valid.

    On failure ``driver``, ``subset`` and ``request`` locate the first
    violated invariant where that makes sense.
    """

    valid: bool
    reason: Optional[str] = None
    driver: Optional[int] = None
    subset: Optional[frozenset] = None
    request: Optional[int] = None

    def __bool__(self):
        return self.valid


def _check_profit(i: int, pf: ProfitFunction) -> Optional[Validation]:
    if isinstance(pf, ExplicitTable):
        support = pf.support
        for k in range(len(support) + 1):
            for S in itertools.combinations(support, k):
                S = frozenset(S)
                v = pf._value(S)
                if not S and v != 0:
                    return Validation(False, f"driver {i}: profit of the empty set is {v}, not 0", i, S)
                if v < 0:
                    return Validation(False, f"driver {i}: negative profit {v} for {sorted(S)}", i, S)
                for j in support:
                    if j not in S and pf._value(S | {j}) < v:
                        return Validation(
                            False,
                            f"driver {i}: not monotone, adding request {j} to {sorted(S)} lowers the profit",
                            i, S, j,
                        )
        return None
    if isinstance(pf, _Vector):
        for j, w in enumerate(pf.weights):
            if w < 0:
                return Validation(False, f"driver {i}: negative weight {w} for request {j}", i, frozenset(), j)
        extra = getattr(pf, "cap", None)
        if extra is None:
            extra = getattr(pf, "bonus", None)
        if extra is not None and extra < 0:
            return Validation(False, f"driver {i}: negative {pf.kind} parameter {extra}", i)
        return None
    return Validation(False, f"driver {i}: unsupported profit function {type(pf).__name__}", i)


def validate_instance(inst: Instance) -> Validation:
    """Check shapes, non-negativity, ``p(empty) = 0`` and monotonicity.

    The ExplicitTable variant is checked exhaustively over its support
    lattice; the vector variants are monotone whenever their parameters are
    non-negative.
    """
    for i, pf in enumerate(inst.profits):
        if pf.m != inst.m:
            return Validation(False, f"driver {i}: profit function covers {pf.m} requests, instance has {inst.m}", i)
        bad = _check_profit(i, pf)
        if bad is not None:
            return bad
    return Validation(True)


def ensure_valid(inst: Instance) -> Instance:
    verdict = validate_instance(inst)
    if not verdict:
        raise InvalidInstanceError(verdict)
    return inst


def check_assignment_shape(inst: Instance, asg: Assignment) -> None:
    if len(asg) != inst.n:
        raise ValueError(f"assignment has {len(asg)} bundles for {inst.n} drivers")
    for j in asg.assigned:
        if not isinstance(j, int) or not 0 <= j < inst.m:
            raise IndexError(f"request index {j!r} out of range [0, {inst.m})")


def unit_feasibility(n: int, m: int) -> FeasibilityMatrix:
    return tuple((1,) * m for _ in range(n))


def feasible_welfare(inst: Instance, asg: Assignment) -> Fraction:
    """``sum_i p_i(F_ii)``, the feasible utilitarian welfare."""
    return sum(
        (inst.profit(i, feasible_subset(inst, i, asg[i])) for i in range(inst.n)),
        Fraction(0),
    )
