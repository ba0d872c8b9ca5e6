"""Randomized suite: run both algorithms over seeded random instances and
check their guarantees (feasible, complete, FEQ1 / FEF1 respectively)."""

from __future__ import annotations

import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from .algorithms import AlgorithmError, feasible_envy_graph_algorithm, feasible_min_max, round_cap
from .fairness import check_fef1, check_feq1, is_complete, is_feasible
from .generators import VARIANTS, generate_random


@dataclass(frozen=True)
class SuiteSpec:
    count: int = 1000
    max_n: int = 5
    max_m: int = 12
    densities: Tuple[float, ...] = (0.3, 0.7, 1.0)
    variants: Tuple[str, ...] = VARIANTS
    seed: int = 0
    audit: bool = False

    @classmethod
    def parse(cls, text: str) -> "SuiteSpec":
        """Parse ``key=value`` pairs separated by commas, e.g.
        ``count=200,max_n=4,densities=0.3/1.0,audit=1``."""
        kw = {}
        for part in filter(None, (p.strip() for p in text.split(","))):
            key, sep, value = part.partition("=")
            if not sep:
                raise ValueError(f"suite option {part!r} is not key=value")
            if key in ("count", "max_n", "max_m", "seed"):
                kw[key] = int(value)
            elif key == "densities":
                kw[key] = tuple(float(x) for x in value.split("/"))
            elif key == "variants":
                kw[key] = tuple(value.split("/"))
            elif key == "audit":
                kw[key] = value.lower() in ("1", "true", "yes")
            else:
                raise ValueError(f"unknown suite option {key!r}")
        return cls(**kw)

    def case(self, k: int) -> Tuple[int, int, int, float]:
        """(seed, n, m, density) of the k-th instance."""
        rng = random.Random(self.seed * 1_000_003 + k)
        n = rng.randint(1, self.max_n)
        m = rng.randint(0, self.max_m)
        return rng.getrandbits(32), n, m, self.densities[k % len(self.densities)]

    def instance(self, k: int):
        seed, n, m, density = self.case(k)
        return generate_random(seed, n, m, self.variants, density)


@dataclass
class CaseResult:
    k: int
    ok: Dict[str, bool]
    problems: Dict[str, List[str]]
    rounds: Dict[str, int]
    seconds: Dict[str, float]


def _welfare_problems(trace) -> List[str]:
    out = []
    prev = 0
    for t in trace:
        if t.welfare < prev:
            out.append(f"round {t.index}: welfare fell {prev} -> {t.welfare}")
        if (t.cycles or t.pre_cycles) and not t.welfare > prev:
            out.append(f"round {t.index}: cycles rotated but welfare did not rise")
        prev = t.welfare
    return out


def run_case(spec: SuiteSpec, k: int) -> CaseResult:
    inst = spec.instance(k)
    ok, problems, rounds, seconds = {}, {}, {}, {}
    for name, alg, notion in (
        ("feq1", feasible_min_max, check_feq1),
        ("fef1", feasible_envy_graph_algorithm, check_fef1),
    ):
        issues = []
        start = time.perf_counter()
        try:
            asg, trace = alg(inst)
        except AlgorithmError as e:
            issues.append(f"algorithm error: {e}")
            asg, trace = None, []
        seconds[name] = time.perf_counter() - start
        rounds[name] = len(trace)
        if asg is not None:
            if not is_feasible(inst, asg):
                issues.append("not feasible")
            if not is_complete(inst, asg):
                issues.append("not complete")
            if not notion(inst, asg):
                issues.append(f"not {name.upper()}")
            if name == "feq1" and len(trace) > inst.m + inst.n:
                issues.append(f"{len(trace)} iterations exceed m + n")
            if name == "fef1":
                if len(trace) > round_cap(inst):
                    issues.append("round cap breached")
                issues.extend(_welfare_problems(trace))
            if spec.audit:
                for t in trace:
                    if not notion(inst, t.assignment):
                        issues.append(f"round {t.index}: intermediate assignment not {name.upper()}")
        ok[name] = not issues
        problems[name] = issues
    return CaseResult(k, ok, problems, rounds, seconds)


def _run_chunk(args):
    spec, ks = args
    return [run_case(spec, k) for k in ks]


@dataclass
class SuiteSummary:
    spec: SuiteSpec
    cases: List[CaseResult] = field(default_factory=list)
    seconds: float = 0.0

    def passed(self, alg: str) -> int:
        return sum(c.ok[alg] for c in self.cases)

    def failures(self, alg: str) -> List[CaseResult]:
        return [c for c in self.cases if not c.ok[alg]]

    @property
    def all_ok(self) -> bool:
        return all(all(c.ok.values()) for c in self.cases)

    def to_json(self) -> dict:
        out = {"count": len(self.cases), "seconds": round(self.seconds, 3), "algorithms": {}}
        for alg in ("feq1", "fef1"):
            fails = self.failures(alg)
            out["algorithms"][alg] = {
                "passed": self.passed(alg),
                "pass_rate": self.passed(alg) / len(self.cases) if self.cases else 1.0,
                "max_rounds": max((c.rounds[alg] for c in self.cases), default=0),
                "seconds": round(sum(c.seconds[alg] for c in self.cases), 3),
                "failures": [{"case": c.k, "problems": c.problems[alg]} for c in fails[:20]],
            }
        return out


def run_suite(spec: SuiteSpec, jobs: int = 1) -> SuiteSummary:
    start = time.perf_counter()
    if jobs <= 1:
        cases = [run_case(spec, k) for k in range(spec.count)]
    else:
        chunks = [(spec, list(range(s, spec.count, jobs))) for s in range(jobs)]
        with ProcessPoolExecutor(jobs) as ex:
            cases = sorted((c for part in ex.map(_run_chunk, chunks) for c in part), key=lambda c: c.k)
    return SuiteSummary(spec, cases, time.perf_counter() - start)
