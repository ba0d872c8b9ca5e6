"""Feasible-Min-Max (FEQ1) and Feasible-Envy-Graph (FEF1) assignment.

Both algorithms only query profits through the instance's oracle and break
every tie towards the lowest index, so runs are reproducible. Each run
returns the final assignment together with one :class:`RoundTrace` per loop
iteration.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .model import (
    Assignment,
    Instance,
    check_assignment_shape,
    ensure_valid,
    feasible_subset,
    feasible_welfare,
)

log = logging.getLogger(__name__)

Cycle = Tuple[int, ...]


class AlgorithmError(RuntimeError):
    """An internal invariant broke (never expected on a valid instance)."""


@dataclass(frozen=True)
class RoundTrace:
    """One loop iteration.

    ``cycles`` are the envy cycles rotated after the pick, ``pre_cycles``
    those rotated before it (only when the projection had no unenvied
    driver). ``welfare`` is ``sum_i p_i(F_ii)`` at the end of the round and
    ``assignment`` the end-of-round assignment.
    """

    index: int
    request: Optional[int]
    driver: Optional[int]
    welfare: Fraction
    assignment: Assignment
    cycles: Tuple[Cycle, ...] = ()
    returned: FrozenSet[int] = frozenset()
    pre_cycles: Tuple[Cycle, ...] = ()
    retired: bool = False


# Feasible-Min-Max


def feasible_min_max(inst: Instance) -> Tuple[Assignment, List[RoundTrace]]:
    """Repeatedly give the poorest remaining driver their most profitable
    feasible remaining request; retire drivers with nothing left to take.

    The result is feasible, complete and FEQ1.
    """
    ensure_valid(inst)
    bundles = [frozenset() for _ in range(inst.n)]
    current = [Fraction(0)] * inst.n
    remaining_vehicles = list(range(inst.n))
    pool = set(inst.servable)
    trace: List[RoundTrace] = []
    limit = inst.m + inst.n

    while pool:
        if len(trace) >= limit:
            raise AlgorithmError(f"Feasible-Min-Max exceeded {limit} iterations")
        if not remaining_vehicles:
            raise AlgorithmError(f"requests {sorted(pool)} left with no vehicle")
        i = min(remaining_vehicles, key=lambda k: (current[k], k))
        options = sorted(pool & inst.feasible_for(i))
        if options:
            best_j, best_v = None, None
            for h in options:
                v = inst.profit(i, bundles[i] | {h})
                if best_v is None or v > best_v:
                    best_j, best_v = h, v
            bundles[i] = bundles[i] | {best_j}
            current[i] = best_v
            pool.discard(best_j)
            asg = Assignment(tuple(bundles))
            trace.append(RoundTrace(len(trace), best_j, i, sum(current, Fraction(0)), asg))
        else:
            remaining_vehicles.remove(i)
            asg = Assignment(tuple(bundles))
            trace.append(RoundTrace(len(trace), None, i, sum(current, Fraction(0)), asg, retired=True))

    return Assignment(tuple(bundles)), trace


# Feasible envy graph


@dataclass(frozen=True)
class EnvyGraph:
    """Edge ``(i, k)`` iff ``p_i(F_ii) < p_i(F_ik)``.

    A snapshot: it is recomputed from the assignment whenever bundles move.
    """

    n: int
    edges: FrozenSet[Tuple[int, int]]

    def successors(self, i: int) -> List[int]:
        return sorted(k for (a, k) in self.edges if a == i)

    def find_cycle(self) -> Optional[Cycle]:
        return _find_cycle(range(self.n), self.edges)

    def is_acyclic(self) -> bool:
        return self.find_cycle() is None


@dataclass(frozen=True)
class GraphProjection:
    """The envy graph restricted to the vehicles that can serve ``request``."""

    request: int
    vertices: Tuple[int, ...]
    edges: FrozenSet[Tuple[int, int]]


def _find_cycle(vertices, edges) -> Optional[Cycle]:
    # DFS from the lowest-index vertex, successors in ascending order; the
    # first back edge found closes the returned cycle.
    adj: Dict[int, List[int]] = {}
    for a, b in sorted(edges):
        adj.setdefault(a, []).append(b)
    state: Dict[int, int] = {}  # 1 = on stack, 2 = done
    for root in sorted(vertices):
        if root in state:
            continue
        stack = [root]
        iters = [iter(adj.get(root, ()))]
        state[root] = 1
        while stack:
            nxt = next(iters[-1], None)
            if nxt is None:
                state[stack.pop()] = 2
                iters.pop()
            elif state.get(nxt) == 1:
                return tuple(stack[stack.index(nxt):])
            elif nxt not in state:
                state[nxt] = 1
                stack.append(nxt)
                iters.append(iter(adj.get(nxt, ())))
    return None


def build_feasible_envy_graph(inst: Instance, asg: Assignment) -> EnvyGraph:
    check_assignment_shape(inst, asg)
    edges = set()
    for i in range(inst.n):
        own = inst.profit(i, feasible_subset(inst, i, asg[i]))
        for k in range(inst.n):
            if k != i and own < inst.profit(i, feasible_subset(inst, i, asg[k])):
                edges.add((i, k))
    return EnvyGraph(inst.n, frozenset(edges))


def project_graph(g: EnvyGraph, inst: Instance, j: int) -> GraphProjection:
    if not 0 <= j < inst.m:
        raise IndexError(f"request index {j} out of range [0, {inst.m})")
    vertices = inst.vehicles_for(j)
    keep = set(vertices)
    edges = frozenset((a, b) for (a, b) in g.edges if a in keep and b in keep)
    return GraphProjection(j, vertices, edges)


def find_unenvied(proj: GraphProjection) -> int:
    """Lowest-index vertex of the projection with no incoming edge."""
    envied = {b for (_, b) in proj.edges}
    for v in proj.vertices:
        if v not in envied:
            return v
    raise AlgorithmError(f"no unenvied driver among {list(proj.vertices)} for request {proj.request}")


def rotate(asg: Assignment, cycle: Cycle) -> Assignment:
    """Each driver on the cycle takes the bundle of the driver it envies."""
    bundles = list(asg.bundles)
    for t, i in enumerate(cycle):
        bundles[i] = asg[cycle[(t + 1) % len(cycle)]]
    return Assignment(tuple(bundles))


def eliminate_feasible_cycles(inst: Instance, asg: Assignment) -> Tuple[Assignment, List[Cycle]]:
    """Rotate envy cycles one at a time, rebuilding the graph after each,
    until the feasible envy graph is acyclic."""
    cycles = []
    welfare = feasible_welfare(inst, asg)
    while True:
        cycle = build_feasible_envy_graph(inst, asg).find_cycle()
        if cycle is None:
            return asg, cycles
        asg = rotate(asg, cycle)
        cycles.append(cycle)
        after = feasible_welfare(inst, asg)
        if after <= welfare:
            raise AlgorithmError(f"rotating {cycle} did not raise feasible welfare ({welfare} -> {after})")
        welfare = after


def return_non_feasible(inst: Instance, asg: Assignment) -> Tuple[Assignment, FrozenSet[int]]:
    """Strip every request its holder cannot serve; return them as a set."""
    check_assignment_shape(inst, asg)
    returned = frozenset().union(*(asg[i] - inst.feasible_for(i) for i in range(inst.n)))
    kept = tuple(asg[i] & inst.feasible_for(i) for i in range(inst.n))
    return Assignment(kept), returned


def round_cap(inst: Instance) -> int:
    """Upper bound on Feasible-Envy-Graph rounds.

    Welfare lies in ``[0, U]`` with ``U = sum_i p_i(all requests i can
    serve)`` and every cycle round raises it by at least ``1/L``, ``L`` a
    common denominator of all profit values. Between two cycle rounds there
    are at most ``m`` plain rounds, hence ``m + (m + 1) * U * L``.
    """
    U = sum((inst.profit(i, inst.feasible_for(i)) for i in range(inst.n)), Fraction(0))
    L = math.lcm(1, *(pf.denominator for pf in inst.profits))
    return inst.m + (inst.m + 1) * int(U * L)


def feasible_envy_graph_algorithm(
    inst: Instance, request_order: Optional[Sequence[int]] = None
) -> Tuple[Assignment, List[RoundTrace]]:
    """Envy-graph assignment restricted to feasible requests.

    Each round takes the first pooled request in ``request_order`` (default:
    ascending index), gives it to an unenvied driver of the projection onto
    the vehicles that can serve it, rotates all feasible envy cycles and
    sends requests that ended up with an incapable vehicle back to the pool.
    The result is feasible, complete and FEF1.
    """
    ensure_valid(inst)
    if request_order is None:
        request_order = range(inst.m)
    order = list(request_order)
    if sorted(order) != list(range(inst.m)):
        raise ValueError("request_order must be a permutation of the request indices")
    rank = {j: t for t, j in enumerate(order)}

    asg = Assignment.empty(inst.n)
    pool = set(inst.servable)
    trace: List[RoundTrace] = []
    cap = round_cap(inst)

    while pool:
        if len(trace) >= cap:
            raise AlgorithmError(f"Feasible-Envy-Graph exceeded its round cap {cap}")
        j = min(pool, key=rank.__getitem__)
        proj = project_graph(build_feasible_envy_graph(inst, asg), inst, j)
        pre_cycles: List[Cycle] = []
        returned = frozenset()
        if not any(v not in {b for _, b in proj.edges} for v in proj.vertices):
            log.debug("round %d: projection for request %d has no source", len(trace), j)
            asg, pre_cycles = eliminate_feasible_cycles(inst, asg)
            asg, returned = return_non_feasible(inst, asg)
            pool |= returned
            proj = project_graph(build_feasible_envy_graph(inst, asg), inst, j)
        i = find_unenvied(proj)
        asg = asg.replace(i, asg[i] | {j})
        pool.discard(j)
        asg, cycles = eliminate_feasible_cycles(inst, asg)
        asg, back = return_non_feasible(inst, asg)
        pool |= back
        trace.append(
            RoundTrace(
                len(trace), j, i, feasible_welfare(inst, asg), asg,
                cycles=tuple(cycles), returned=returned | back, pre_cycles=tuple(pre_cycles),
            )
        )

    return asg, trace
