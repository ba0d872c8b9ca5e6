import random

import pytest

from fairfleet.fairness import (
    Notion,
    PairWitness,
    check_ef1,
    check_eq1,
    check_fef1,
    check_feq1,
    check_notion,
    fairness_report,
    is_complete,
    is_feasible,
)
from fairfleet.generators import generate_random, random_assignment
from fairfleet.model import Additive, Assignment, Instance

from oracle import Oracle, all_assignments


def A(*bundles):
    return Assignment(tuple(frozenset(b) for b in bundles))


# feasibility / completeness


def test_is_feasible(thm1, thm3):
    assert not is_feasible(thm3, A({2}, {0, 1}))
    assert is_feasible(thm3, A((), ()))
    assert is_feasible(thm1, A({0, 1}, ()))


def test_is_complete(thm1):
    assert is_complete(thm1, A({0, 1}, ()))
    assert not is_complete(thm1, A({0}, ()))
    nobody = Instance((Additive((1, 1)), Additive((1, 1))), ((1, 0), (1, 0)))
    assert not is_complete(nobody, A({0}, {1}))
    assert is_complete(nobody, A({0}, ()))
    assert is_complete(Instance((Additive(()),), ((),)), A(()))


# EQ1 / EF1 on the two-driver, four-request example


def test_eq1_example(ex2):
    assert check_eq1(ex2, A({0}, {1, 2, 3}))
    assert not check_eq1(ex2, A({0, 1}, {2, 3}))
    assert check_eq1(ex2, A((), ()))


def test_ef1_example(ex2):
    assert check_ef1(ex2, A({0, 1}, {2, 3}))
    assert not check_ef1(ex2, A({0}, {1, 2, 3}))
    assert check_ef1(ex2, A((), ()))


# FEQ1 / FEF1 on the three-request example


def test_feq1_fef1_infeasible_but_fair(thm3):
    asg = A({2}, {0, 1})
    assert check_feq1(thm3, asg)
    assert check_fef1(thm3, asg)


def test_feq1_fef1_feasible_but_unfair(thm3):
    asg = A({0, 1, 2}, ())
    assert not check_feq1(thm3, asg)
    assert not check_fef1(thm3, asg)


def test_report_feasible_unfair(thm3):
    rep = fairness_report(thm3, A({0, 1, 2}, ()))
    assert rep["feasible"] and rep["complete"]
    assert not rep["FEQ1"] and not rep["FEF1"]
    # driver 1 holds nothing and sees {1, 2} of driver 0's bundle
    assert [(w.i, w.k) for w in rep.witnesses["FEQ1"]] == [(1, 0)]
    assert rep.witnesses["FEF1"] == [PairWitness(1, 0, 0, 1)]


def test_report_empty():
    inst = Instance((Additive(()), Additive(())), ((), ()))
    rep = fairness_report(inst, A((), ()))
    assert rep.all_hold and rep.witnesses == {}


def test_report_two_two_split(ex2):
    rep = fairness_report(ex2, A({0, 1}, {2, 3}))
    assert rep["EF1"] and not rep["EQ1"]
    assert rep.witnesses["EQ1"] == [PairWitness(1, 0, 2, 4)]


def test_report_request_witnesses(thm3):
    rep = fairness_report(thm3, A({2}, {0}))
    assert [(w.driver, w.request) for w in rep.witnesses["feasible"]] == [(1, 0)]
    assert [(w.driver, w.request) for w in rep.witnesses["complete"]] == [(None, 1)]


def test_shape_errors(thm3):
    with pytest.raises(ValueError):
        check_eq1(thm3, A({0}))
    with pytest.raises(IndexError):
        check_eq1(thm3, A({5}, ()))


# properties


def _random_pairs(count, seed, density, max_n=3, max_m=8):
    rng = random.Random(seed)
    for _ in range(count):
        inst = generate_random(rng.getrandbits(32), rng.randint(1, max_n), rng.randint(0, max_m), density=density)
        yield inst, random_assignment(rng, inst)


@pytest.mark.parametrize("density", [0.3, 0.7, 1.0])
def test_checkers_match_oracle_random(density):
    for inst, asg in _random_pairs(150, 11, density):
        o = Oracle(inst)
        R = list(asg.bundles)
        assert is_feasible(inst, asg) == o.feasible(R)
        assert is_complete(inst, asg) == o.complete(R)
        for notion in Notion:
            assert check_notion(inst, asg, notion) == o.holds(notion.value, R), (notion, inst, asg)


def test_checkers_match_oracle_exhaustive_small():
    rng = random.Random(3)
    for _ in range(12):
        inst = generate_random(rng.getrandbits(32), 2, 4, density=rng.choice([0.5, 1.0]))
        o = Oracle(inst)
        for R in all_assignments(2, 4):
            asg = Assignment(tuple(R))
            for notion in Notion:
                assert check_notion(inst, asg, notion) == o.holds(notion.value, R)


def test_unit_feasibility_coincidence():
    for inst, asg in _random_pairs(300, 17, 1.0):
        assert check_feq1(inst, asg) == check_eq1(inst, asg)
        assert check_fef1(inst, asg) == check_ef1(inst, asg)


def test_witnesses_reproduce_violation():
    for inst, asg in _random_pairs(300, 23, 0.7):
        rep = fairness_report(inst, asg)
        for notion, witnesses in rep.witnesses.items():
            assert not rep.verdicts[notion]
            for w in witnesses:
                if isinstance(w, PairWitness):
                    assert w.own < w.other
                    single = Assignment(tuple(asg[x] if x in (w.i, w.k) else frozenset() for x in range(inst.n)))
                    assert not check_notion(inst, single, Notion(notion))
        for notion, ok in rep.verdicts.items():
            assert ok == (notion not in rep.witnesses)


def test_identical_profits_make_eq1_and_ef1_agree():
    rng = random.Random(31)
    for _ in range(200):
        inst0 = generate_random(rng.getrandbits(32), 1, rng.randint(0, 7), density=0.6)
        n = rng.randint(2, 3)
        rows = tuple(tuple(int(rng.random() < 0.6) for _ in range(inst0.m)) for _ in range(n))
        inst = Instance(inst0.profits * n, rows, inst0.m)
        asg = random_assignment(rng, inst)
        assert check_eq1(inst, asg) == check_ef1(inst, asg)


def test_checkers_ignore_feasibility_of_assignment():
    inst = Instance((Additive((1, 1)), Additive((1, 1))), ((1, 1), (0, 0)))
    assert check_ef1(inst, A({0}, {1}))
    assert check_fef1(inst, A({0}, {1}))
    assert check_eq1(inst, A({0}, {1}))
