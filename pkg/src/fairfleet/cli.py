"""Command-line entry point.

Exit codes: 0 success, 1 a checked predicate failed, 2 usage or parse
error, 3 enumeration budget exceeded. Errors are written to stderr as one
JSON object per line.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from . import serialize as ser
from .algorithms import AlgorithmError, feasible_envy_graph_algorithm, feasible_min_max
from .bench import SuiteSpec, run_suite
from .exact import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    ExistenceQuery,
    PartitionInstance,
    build_partition_reduction,
    decide_existence,
    partition_sweep,
    verify_reduction,
)
from .fairness import NOTIONS, Notion, fairness_report
from .generators import FIXTURES, VARIANTS, generate_fixture, generate_random
from .model import InvalidInstanceError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

ALGORITHMS = {
    "feq1": (feasible_min_max, Notion.FEQ1),
    "fef1": (feasible_envy_graph_algorithm, Notion.FEF1),
}


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path) as f:
            return f.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _emit(args, obj) -> None:
    text = obj if isinstance(obj, str) else ser.dumps(obj)
    if getattr(args, "output", None):
        ser.write_atomic(args.output, text)
    else:
        sys.stdout.write(text + "\n")


def _int_list(text: str):
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _jsonable(v):
    if isinstance(v, Fraction):
        return ser.encode_rational(v)
    if isinstance(v, (tuple, list)):
        return [_jsonable(x) for x in v]
    return v


def cmd_solve(args) -> int:
    inst = ser.parse_instance(_read(args.instance))
    alg, notion = ALGORITHMS[args.alg]
    start = time.perf_counter()
    if args.order is not None:
        if args.alg != "fef1":
            raise UsageError("--order only applies to --alg fef1")
        asg, trace = alg(inst, _int_list(args.order))
    else:
        asg, trace = alg(inst)
    seconds = time.perf_counter() - start
    fairness = fairness_report(inst, asg)
    report = ser.RunReport(args.alg, ser.instance_digest(inst), asg, fairness, tuple(trace), seconds)
    _emit(args, ser.serialize_report(report))
    guaranteed = fairness["feasible"] and fairness["complete"] and fairness[notion.value]
    return EXIT_OK if guaranteed else EXIT_FAIL


def cmd_check(args) -> int:
    inst = ser.parse_instance(_read(args.instance))
    asg = ser.parse_assignment(_read(args.assignment))
    try:
        report = fairness_report(inst, asg)
    except (ValueError, IndexError) as e:
        raise ser.DocumentError("assignment", str(e)) from None
    _emit(args, ser.encode_fairness(report))
    required = args.require or list(NOTIONS)
    return EXIT_OK if all(report[r] for r in required) else EXIT_FAIL


def cmd_exists(args) -> int:
    inst = ser.parse_instance(_read(args.instance))
    q = ExistenceQuery(inst, Notion.parse(args.notion), not args.allow_infeasible, not args.allow_incomplete)
    found = decide_existence(q, args.budget)
    _emit(args, {
        "notion": q.notion.value,
        "require_feasible": q.require_feasible,
        "require_complete": q.require_complete,
        "answer": "yes" if found.exists else "no",
        "witness": ser.encode_assignment(found.witness) if found.exists else None,
    })
    return EXIT_OK


def cmd_reduce(args) -> int:
    try:
        pi = PartitionInstance(tuple(_int_list(args.multiset)))
    except ValueError as e:
        raise UsageError(str(e)) from None
    inst = build_partition_reduction(pi)
    _emit(args, ser.serialize_instance(inst, {"name": "partition", "values": list(pi.values)}))
    return EXIT_OK


def cmd_verify_reduction(args) -> int:
    rows = []
    for values in partition_sweep(args.max_size, args.max_value):
        rows.append({"values": list(values), "ok": verify_reduction(PartitionInstance(values), args.budget)})
    ok = all(r["ok"] for r in rows)
    _emit(args, {"checked": len(rows), "ok": ok, "failures": [r["values"] for r in rows if not r["ok"]]})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_gen(args) -> int:
    if args.kind == "fixture":
        eps = Fraction(args.epsilon) if args.epsilon is not None else None
        values = _int_list(args.values) if args.values else None
        try:
            fx = generate_fixture(args.name, eps, values)
        except ValueError as e:
            raise UsageError(str(e)) from None
        meta = {"name": fx.name}
        meta.update({k: _jsonable(v) for k, v in fx.notes.items()})
        if fx.references:
            meta["references"] = {k: ser.encode_assignment(a) for k, a in fx.references.items()}
        _emit(args, ser.serialize_instance(fx.instance, meta))
    else:
        variants = tuple(args.variants.split(","))
        try:
            inst = generate_random(args.seed, args.n, args.m, variants, args.density)
        except ValueError as e:
            raise UsageError(str(e)) from None
        _emit(args, ser.serialize_instance(inst, {"name": "random", "seed": args.seed, "density": args.density}))
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        spec = SuiteSpec.parse(args.suite)
    except (ValueError, TypeError) as e:
        raise UsageError(str(e)) from None
    summary = run_suite(spec, args.jobs)
    _emit(args, summary.to_json())
    return EXIT_OK if summary.all_ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fairfleet", description="Fair request assignment for drivers.")
    sub = p.add_subparsers(dest="command", required=True)

    def out(sp):
        sp.add_argument("-o", "--output", help="write to this file (atomically) instead of stdout")

    sp = sub.add_parser("solve", help="run the FEQ1 or FEF1 algorithm")
    sp.add_argument("--alg", choices=sorted(ALGORITHMS), required=True)
    sp.add_argument("--order", help="request order for fef1, comma-separated indices")
    sp.add_argument("instance")
    out(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("check", help="fairness report for an assignment")
    sp.add_argument("instance")
    sp.add_argument("assignment")
    sp.add_argument("--require", action="append", choices=NOTIONS,
                    help="notions whose failure sets exit status 1 (default: all)")
    out(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("exists", help="decide whether a fair feasible complete assignment exists")
    sp.add_argument("--notion", required=True, choices=[n.value.lower() for n in Notion])
    sp.add_argument("--allow-infeasible", action="store_true")
    sp.add_argument("--allow-incomplete", action="store_true")
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    sp.add_argument("instance")
    out(sp)
    sp.set_defaults(func=cmd_exists)

    sp = sub.add_parser("reduce", help="instance reduced from a PARTITION multiset, e.g. 2,2")
    sp.add_argument("multiset")
    out(sp)
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("verify-reduction", help="check the PARTITION reduction on all small multisets")
    sp.add_argument("--max-size", type=int, default=4)
    sp.add_argument("--max-value", type=int, default=5)
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    out(sp)
    sp.set_defaults(func=cmd_verify_reduction)

    sp = sub.add_parser("gen", help="emit a fixture or random instance")
    gen = sp.add_subparsers(dest="kind", required=True)
    fx = gen.add_parser("fixture")
    fx.add_argument("name", choices=FIXTURES)
    fx.add_argument("--epsilon", help="example1 position parameter, rational in [0, 1/4)")
    fx.add_argument("--values", help="partition multiset, comma-separated")
    out(fx)
    fx.set_defaults(func=cmd_gen)
    rnd = gen.add_parser("random")
    rnd.add_argument("--seed", type=int, default=0)
    rnd.add_argument("--n", type=int, required=True)
    rnd.add_argument("--m", type=int, required=True)
    rnd.add_argument("--variants", default=",".join(VARIANTS))
    rnd.add_argument("--density", type=float, default=1.0)
    out(rnd)
    rnd.set_defaults(func=cmd_gen)

    sp = sub.add_parser("bench", help="run the randomized guarantee suite")
    sp.add_argument("--suite", default="", help="e.g. count=1000,max_n=5,max_m=12,densities=0.3/0.7/1.0")
    sp.add_argument("--jobs", type=int, default=1)
    out(sp)
    sp.set_defaults(func=cmd_bench)
    return p


def _error(kind: str, message: str, **extra) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message, **extra}) + "\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvalidInstanceError as e:
        v = e.verdict
        _error("invalid_instance", str(e), driver=v.driver,
               subset=sorted(v.subset) if v.subset is not None else None, request=v.request)
        return EXIT_USAGE
    except ser.DocumentError as e:
        _error("parse", str(e), where=e.where)
        return EXIT_USAGE
    except UsageError as e:
        _error("usage", str(e))
        return EXIT_USAGE
    except BudgetExceeded as e:
        _error("budget", str(e))
        return EXIT_BUDGET
    except AlgorithmError as e:
        _error("internal", str(e))
        return EXIT_FAIL
    except ValueError as e:
        _error("usage", str(e))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
