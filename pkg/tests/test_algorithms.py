import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairfleet.algorithms import (
    AlgorithmError,
    EnvyGraph,
    GraphProjection,
    build_feasible_envy_graph,
    eliminate_feasible_cycles,
    feasible_envy_graph_algorithm,
    feasible_min_max,
    find_unenvied,
    project_graph,
    return_non_feasible,
    rotate,
    round_cap,
)
from fairfleet.fairness import check_fef1, check_feq1, is_complete, is_feasible
from fairfleet.generators import VARIANTS, generate_random
from fairfleet.model import (
    Additive,
    Assignment,
    ExplicitTable,
    Instance,
    InvalidInstanceError,
    feasible_welfare,
    unit_feasibility,
)


def A(*bundles):
    return Assignment(tuple(frozenset(b) for b in bundles))


def empty_requests(n=2):
    return Instance(tuple(Additive(()) for _ in range(n)), ((),) * n, 0)


# Feasible-Min-Max


def test_min_max_single_capable(thm1):
    asg, trace = feasible_min_max(thm1)
    assert asg == A({0, 1}, ())


def test_min_max_four_request_trace(ex2):
    asg, trace = feasible_min_max(ex2)
    assert asg == A({0}, {1, 2, 3})
    assert [(t.driver, t.request) for t in trace] == [(0, 0), (1, 1), (1, 2), (1, 3)]


def test_min_max_no_requests():
    asg, trace = feasible_min_max(empty_requests())
    assert asg == A((), ()) and trace == []


def test_min_max_retires_vehicles():
    # driver 1 has nothing to take, is retired once it is the poorest
    inst = Instance((Additive((1, 1, 1)), Additive((1, 1, 1))), ((1, 1, 1), (0, 0, 0)))
    asg, trace = feasible_min_max(inst)
    assert asg == A({0, 1, 2}, ())
    assert [t.retired for t in trace] == [False, True, False, False]


def test_min_max_picks_best_marginal():
    inst = Instance((Additive((1, 3, 2)), Additive((0, 0, 0))), ((1, 1, 1), (0, 0, 1)))
    asg, trace = feasible_min_max(inst)
    assert trace[0].request == 1  # best marginal for driver 0
    assert trace[1].driver == 1 and trace[1].request == 2
    assert asg == A({0, 1}, {2})


def test_min_max_rejects_invalid_instance():
    bad = ExplicitTable(2, (0, 1), {frozenset({0}): 2, frozenset({1}): 2, frozenset({0, 1}): 1})
    with pytest.raises(InvalidInstanceError):
        feasible_min_max(Instance((bad,), ((1, 1),)))


# envy graph pieces


def test_graph_empty_assignment(thm3):
    assert build_feasible_envy_graph(thm3, A((), ())).edges == frozenset()


def test_graph_three_request(thm3):
    # p_1(empty) = 0 < p_1({1, 2}) = 6 ; p_0({0,1,2}) = 7 >= p_0(empty)
    g = build_feasible_envy_graph(thm3, A({0, 1, 2}, ()))
    assert g.edges == {(1, 0)}


def test_graph_four_request_after_first_pick(ex2):
    assert build_feasible_envy_graph(ex2, A({0}, ())).edges == {(1, 0)}


def test_projection(thm3, ex2):
    g = build_feasible_envy_graph(ex2, A({0}, ()))
    proj = project_graph(g, ex2, 1)
    assert proj.vertices == (0, 1) and proj.edges == g.edges
    assert project_graph(build_feasible_envy_graph(thm3, A((), ())), thm3, 0).vertices == (0,)
    nobody = Instance((Additive((1,)), Additive((1,))), ((0,), (0,)))
    proj = project_graph(EnvyGraph(2, frozenset()), nobody, 0)
    assert proj.vertices == () and proj.edges == frozenset()


def test_find_unenvied():
    assert find_unenvied(GraphProjection(0, (0, 1), frozenset())) == 0
    assert find_unenvied(GraphProjection(0, (0, 1), frozenset({(1, 0)}))) == 1
    assert find_unenvied(GraphProjection(0, (2,), frozenset())) == 2
    with pytest.raises(AlgorithmError):
        find_unenvied(GraphProjection(0, (0, 1), frozenset({(0, 1), (1, 0)})))


def test_find_cycle_lowest_index_dfs():
    g = EnvyGraph(4, frozenset({(0, 1), (1, 2), (2, 1), (2, 3), (3, 0)}))
    # DFS from 0: 0 -> 1 -> 2 -> 1 is the first back edge
    assert g.find_cycle() == (1, 2)
    assert EnvyGraph(3, frozenset({(0, 1), (1, 2)})).find_cycle() is None
    assert EnvyGraph(3, frozenset({(2, 0), (0, 2)})).find_cycle() == (0, 2)


def test_rotate():
    asg = A({0}, {1}, {2})
    assert rotate(asg, (0, 1, 2)) == A({1}, {2}, {0})


def test_eliminate_acyclic_unchanged(ex2):
    asg = A({0}, ())
    assert eliminate_feasible_cycles(ex2, asg) == (asg, [])


def test_eliminate_two_cycle():
    inst = Instance((Additive((0, 5)), Additive((5, 0))), unit_feasibility(2, 2))
    asg = A({0}, {1})
    assert feasible_welfare(inst, asg) == 0
    out, cycles = eliminate_feasible_cycles(inst, asg)
    assert out == A({1}, {0})
    assert cycles == [(0, 1)]
    assert feasible_welfare(inst, out) == 10


def test_rotation_can_break_feasibility():
    # driver 0 cannot serve request 2, but envies the bundle {1, 2}
    inst = Instance((Additive((0, 5, 0)), Additive((5, 0, 0))), ((1, 1, 0), (1, 1, 1)))
    out, cycles = eliminate_feasible_cycles(inst, A({0}, {1, 2}))
    assert cycles == [(0, 1)]
    assert out == A({1, 2}, {0})
    assert not is_feasible(inst, out)
    fixed, returned = return_non_feasible(inst, out)
    assert fixed == A({1}, {0}) and returned == {2}


def test_return_non_feasible(thm3):
    asg = A({0}, {1})
    assert return_non_feasible(thm3, asg) == (asg, frozenset())
    assert return_non_feasible(thm3, A((), {0, 1})) == (A((), {1}), frozenset({0}))
    nobody = Instance((Additive((1, 1)),), ((0, 0),))
    assert return_non_feasible(nobody, A({0, 1})) == (A(()), frozenset({0, 1}))


# Feasible-Envy-Graph


def test_envy_graph_four_request(ex2):
    asg, trace = feasible_envy_graph_algorithm(ex2)
    assert asg == A({0, 2}, {1, 3})
    assert [(t.request, t.driver) for t in trace] == [(0, 0), (1, 1), (2, 0), (3, 1)]


def test_envy_graph_request_order(ex2):
    asg, _ = feasible_envy_graph_algorithm(ex2, [3, 2, 1, 0])
    assert asg == A({1, 3}, {0, 2})
    with pytest.raises(ValueError):
        feasible_envy_graph_algorithm(ex2, [0, 1])


def test_envy_graph_single_capable(thm1):
    asg, _ = feasible_envy_graph_algorithm(thm1)
    assert asg == A({0, 1}, ())
    assert check_fef1(thm1, asg)


def test_envy_graph_no_requests():
    asg, trace = feasible_envy_graph_algorithm(empty_requests(3))
    assert asg == A((), (), ()) and trace == []


def test_envy_graph_returns_requests_to_pool():
    inst = Instance((Additive((0, 5, 0)), Additive((5, 0, 0))), ((1, 1, 0), (1, 1, 1)))
    asg, trace = feasible_envy_graph_algorithm(inst, [2, 0, 1])
    assert any(t.returned for t in trace)
    assert is_feasible(inst, asg) and is_complete(inst, asg) and check_fef1(inst, asg)


# properties


def _check_min_max(inst):
    asg, trace = feasible_min_max(inst)
    assert is_feasible(inst, asg) and is_complete(inst, asg) and check_feq1(inst, asg)
    assert len(trace) <= inst.m + inst.n
    for t in trace:
        assert check_feq1(inst, t.assignment)
    assert not (asg.assigned - inst.servable)


def _check_envy_graph(inst):
    asg, trace = feasible_envy_graph_algorithm(inst)
    assert is_feasible(inst, asg) and is_complete(inst, asg) and check_fef1(inst, asg)
    assert len(trace) <= round_cap(inst)
    prev = 0
    for t in trace:
        assert check_fef1(inst, t.assignment)
        assert is_feasible(inst, t.assignment)
        assert build_feasible_envy_graph(inst, t.assignment).is_acyclic()
        assert t.welfare >= prev
        if t.cycles:
            assert t.welfare > prev
        prev = t.welfare
    assert not (asg.assigned - inst.servable)


@settings(max_examples=150, deadline=None)
@given(
    st.integers(0, 2**32 - 1),
    st.integers(1, 5),
    st.integers(0, 10),
    st.sampled_from([0.0, 0.3, 0.7, 1.0]),
    st.lists(st.sampled_from(VARIANTS), min_size=1, max_size=4),
)
def test_algorithms_guarantees(seed, n, m, density, variants):
    inst = generate_random(seed, n, m, variants, density)
    _check_min_max(inst)
    _check_envy_graph(inst)


def test_eliminate_leaves_acyclic_graph():
    rng = random.Random(8)
    for _ in range(300):
        inst = generate_random(rng.getrandbits(32), rng.randint(2, 5), rng.randint(1, 9), density=rng.random())
        bundles = [set() for _ in range(inst.n)]
        for j in range(inst.m):
            bundles[rng.randrange(inst.n)].add(j)
        asg = Assignment(tuple(frozenset(b) for b in bundles))
        before = feasible_welfare(inst, asg)
        out, cycles = eliminate_feasible_cycles(inst, asg)
        assert build_feasible_envy_graph(inst, out).is_acyclic()
        assert sorted(map(sorted, out)) == sorted(map(sorted, asg))
        if cycles:
            assert feasible_welfare(inst, out) > before


def test_density_zero_assigns_nothing():
    inst = generate_random(4, 3, 6, density=0.0)
    assert feasible_min_max(inst)[0] == A((), (), ())
    assert feasible_envy_graph_algorithm(inst)[0] == A((), (), ())


def test_round_cap_examples(ex2, thm3):
    # U = 16 + 4, integral profits: cap = m + (m + 1) * U
    assert round_cap(ex2) == 4 + 5 * 20
    inst = Instance((Additive(("1/2", "1/3")),), ((1, 1),))
    # U = 5/6, common denominator 6
    assert round_cap(inst) == 2 + 3 * 5
