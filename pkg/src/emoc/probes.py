"""Bundled problems, host oracles, and probe-suite generation.

A probe suite is the finite input domain a program is judged on: a
geometric ladder of sizes, and per size a worst case, a best case, and a
few seeded random cases, each carrying the oracle's expected output.
Suites regenerate byte-identically from (problem, schedule, seed).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

__all__ = [
    "SizeSchedule",
    "Probe",
    "ProbeSuite",
    "ProblemSpec",
    "PROBLEMS",
    "build_probe_suite",
    "oracle_output",
    "suite_to_json",
    "suite_from_json",
]

_MASK = 0xFFFFFFFFFFFFFFFF


class SplitMix64:
    """Tiny portable PRNG (splitmix64); documented so suites are
    reproducible by independent implementations."""

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        return self.next_u64() % bound


def _mix_seed(seed: int, *parts) -> int:
    text = "|".join(str(p) for p in (seed,) + parts)
    h = 0xCBF29CE484222325
    for b in text.encode():
        h = ((h ^ b) * 0x100000001B3) & _MASK
    return h


@dataclass(frozen=True)
class SizeSchedule:
    """Geometric size ladder: s0, s0*r, s0*r^2, ... (n points)."""

    s0: int = 8
    r: float = 2.0
    n: int = 10

    def __post_init__(self):
        if self.s0 < 1:
            raise ValueError("s0 must be >= 1")
        if self.r <= 1:
            raise ValueError("r must be > 1")
        if self.n < 2:
            raise ValueError("n must be >= 2")

    def sizes(self) -> tuple:
        out = []
        for i in range(self.n):
            v = round(self.s0 * self.r ** i)
            if out and v <= out[-1]:
                v = out[-1] + 1
            out.append(v)
        return tuple(out)


@dataclass(frozen=True)
class Probe:
    size: int
    tag: str  # "worst" | "best" | "random-<i>"
    args: tuple
    oracle: object


@dataclass(frozen=True)
class ProbeSuite:
    problem: str
    schedule: SizeSchedule
    seed: int
    probes: tuple

    def sizes(self) -> tuple:
        return self.schedule.sizes()

    def by_size(self) -> dict:
        groups: dict = {}
        for p in self.probes:
            groups.setdefault(p.size, []).append(p)
        return groups

    def fingerprint(self) -> str:
        sched = self.schedule
        return f"{self.problem}:s0={sched.s0},r={sched.r},n={sched.n}:seed={self.seed}"


# --- oracles ---

def _is_prime_host(v: int) -> bool:
    if v < 2:
        return False
    if v < 4:
        return True
    if v % 2 == 0:
        return False
    d = 3
    while d * d <= v:
        if v % d == 0:
            return False
        d += 2
    return True


def _largest_prime_below(bound: int) -> int:
    v = bound - 1
    while v >= 2:
        if _is_prime_host(v):
            return v
        v -= 1
    raise ValueError(f"no prime below {bound}")


def _oracle_sort(args):
    (a,) = args
    return sorted(a)


def _oracle_search(args):
    a, target = args
    for i, v in enumerate(a):
        if v == target:
            return i  # least index on ties
    return -1


def _oracle_is_prime(args):
    (v,) = args
    return _is_prime_host(v)


# --- case generators (each returns an args tuple for one probe) ---

def _sort_worst(size, rng):
    return ([v for v in range(size, 0, -1)],)


def _sort_best(size, rng):
    return ([v for v in range(1, size + 1)],)


def _sort_random(size, rng):
    return ([rng.below(4 * size + 1) for _ in range(size)],)


def _search_list(size, rng):
    vals = []
    v = rng.below(4)
    for _ in range(size):
        vals.append(v)
        v += 1 + rng.below(4)  # strictly increasing
    return vals


def _search_worst(size, rng):
    vals = _search_list(size, rng)
    return (vals, vals[-1] + 1)  # absent target


def _search_best(size, rng):
    vals = _search_list(size, rng)
    return (vals, vals[0])


def _search_random(size, rng):
    vals = _search_list(size, rng)
    return (vals, vals[rng.below(size)])


def _prime_worst(bits, rng):
    return (_largest_prime_below(2 ** bits),)


def _prime_best(bits, rng):
    return (2 ** bits,)  # even composite for bits >= 2


def _prime_random(bits, rng):
    v = (1 << (bits - 1)) | 1
    if bits > 2:
        v |= rng.next_u64() >> (64 - bits + 2) << 1
    return (v,)


@dataclass(frozen=True)
class ProblemSpec:
    """A problem: argument shape, oracle, size semantics, case makers."""

    name: str
    arity: int
    size_unit: str  # "length" | "bits"
    oracle: object = field(compare=False)
    worst: object = field(compare=False)
    best: object = field(compare=False)
    random: object = field(compare=False)
    default_schedule: SizeSchedule = SizeSchedule()
    min_size: int = 1


PROBLEMS = {
    "sort_ascending": ProblemSpec(
        name="sort_ascending",
        arity=1,
        size_unit="length",
        oracle=_oracle_sort,
        worst=_sort_worst,
        best=_sort_best,
        random=_sort_random,
        default_schedule=SizeSchedule(s0=8, r=2.0, n=10),
    ),
    "search_index": ProblemSpec(
        name="search_index",
        arity=2,
        size_unit="length",
        oracle=_oracle_search,
        worst=_search_worst,
        best=_search_best,
        random=_search_random,
        default_schedule=SizeSchedule(s0=8, r=2.0, n=10),
    ),
    # sizes are bit lengths; trial division is exponential in bits, so the
    # ladder tops out near 21 bits instead of 4096
    "is_prime": ProblemSpec(
        name="is_prime",
        arity=1,
        size_unit="bits",
        oracle=_oracle_is_prime,
        worst=_prime_worst,
        best=_prime_best,
        random=_prime_random,
        default_schedule=SizeSchedule(s0=3, r=1.24, n=10),
        min_size=2,
    ),
}


def oracle_output(problem: ProblemSpec, args):
    """Ground-truth output for one argument tuple."""
    if len(args) != problem.arity:
        raise ValueError(
            f"{problem.name} takes {problem.arity} argument(s), got {len(args)}"
        )
    return problem.oracle(tuple(args))


def build_probe_suite(problem: ProblemSpec, schedule: SizeSchedule = None,
                      seed: int = 0, randoms_per_size: int = 3) -> ProbeSuite:
    if schedule is None:
        schedule = problem.default_schedule
    probes = []
    for size in schedule.sizes():
        if size < problem.min_size:
            raise ValueError(
                f"size {size} below {problem.name}'s minimum {problem.min_size}"
            )
        cases = [("worst", problem.worst), ("best", problem.best)]
        cases += [(f"random-{i}", problem.random) for i in range(randoms_per_size)]
        for k, (tag, gen) in enumerate(cases):
            rng = SplitMix64(_mix_seed(seed, problem.name, size, k))
            args = gen(size, rng)
            probes.append(Probe(size=size, tag=tag, args=tuple(args),
                                oracle=problem.oracle(tuple(args))))
    return ProbeSuite(problem=problem.name, schedule=schedule, seed=seed,
                      probes=tuple(probes))


# --- serialization ---

def suite_to_json(suite: ProbeSuite) -> str:
    doc = {
        "problem": suite.problem,
        "schedule": {"s0": suite.schedule.s0, "r": suite.schedule.r,
                     "n": suite.schedule.n},
        "seed": suite.seed,
        "probes": [
            {"size": p.size, "tag": p.tag, "args": list(p.args),
             "oracle": p.oracle}
            for p in suite.probes
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def suite_from_json(text: str) -> ProbeSuite:
    doc = json.loads(text)
    sched = SizeSchedule(**doc["schedule"])
    probes = tuple(
        Probe(size=p["size"], tag=p["tag"], args=tuple(p["args"]),
              oracle=p["oracle"])
        for p in doc["probes"]
    )
    return ProbeSuite(problem=doc["problem"], schedule=sched,
                      seed=doc["seed"], probes=probes)
