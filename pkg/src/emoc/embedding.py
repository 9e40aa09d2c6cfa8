"""The E/M/O/C embedding and its distance metric.

A program is normalized, lowered, and run over a probe suite.  The vector
concatenates:

* e  — one bit: 1 if any probe disagreed with the oracle, trapped, or ran
  out of budget;
* m  — n-1 auxiliary-memory scaling exponents over the size ladder;
* o  — K operation-presence bits (or counts) over a fixed opcode alphabet;
* c  — n-1 step-count scaling exponents.

Exponents are log(x2/x1)/log(s2/s1) of per-size medians, so with the
default doubling schedule they read directly as big-O exponents.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from statistics import median

from .bytecode import OPCODE_NAMES, stream_bytes
from .corpus import CorpusManifest, Program
from .errors import ConfigMismatchError, NonTerminationError
from .lang import lower
from .normalize import PassConfig, normalize
from .probes import PROBLEMS, ProbeSuite, ProblemSpec, SizeSchedule, build_probe_suite
from .vm import Budgets, BudgetExhausted, evaluate

__all__ = [
    "DEFAULT_O_ALPHABET",
    "EmocConfig",
    "DistanceWeights",
    "EmocVector",
    "scaling_exponents",
    "probe_cache_key",
    "embed",
    "embed_corpus",
    "distance",
    "vectors_to_csv",
    "vectors_to_json",
    "vectors_from_csv",
    "vectors_from_json",
]

# Every opcode that is not pure control/data plumbing.  CONST, LOAD,
# STORE, JUMP, BRANCH, CALL, RET and POP_TOP appear in essentially every
# program, so they carry no signal for telling algorithms apart.
DEFAULT_O_ALPHABET = (
    "ADD", "SUB", "MUL", "DIV", "MOD", "NEG",
    "EQ", "NE", "LT", "LE", "GT", "GE",
    "NOT", "AND", "OR",
    "INDEX_LOAD", "INDEX_STORE",
    "LIST_NEW", "LIST_PUSH", "LIST_POP", "LIST_LEN",
)


@dataclass(frozen=True)
class EmocConfig:
    o_alphabet: tuple = DEFAULT_O_ALPHABET
    o_mode: str = "binary"  # binary | counts
    pass_config: PassConfig = field(default_factory=PassConfig)

    def __post_init__(self):
        if not self.o_alphabet:
            raise ValueError("o_alphabet must be non-empty")
        unknown = [n for n in self.o_alphabet if n not in OPCODE_NAMES]
        if unknown:
            raise ValueError(f"unknown opcodes in o_alphabet: {unknown}")
        if self.o_mode not in ("binary", "counts"):
            raise ValueError("o_mode must be 'binary' or 'counts'")

    def fingerprint(self) -> str:
        pc = self.pass_config
        passes = "".join(c for c, on in
                         zip("adic", (pc.alpha, pc.dce, pc.inline, pc.commute))
                         if on)
        return f"K={len(self.o_alphabet)}:{self.o_mode}:passes={passes}"


@dataclass(frozen=True)
class DistanceWeights:
    wE: float = 1.0
    wM: float = 1.0
    wO: float = 1.0
    wC: float = 1.0

    def __post_init__(self):
        ws = (self.wE, self.wM, self.wO, self.wC)
        if any(w < 0 for w in ws):
            raise ValueError("weights must be non-negative")
        if not any(ws):
            raise ValueError("at least one weight must be positive")


@dataclass(frozen=True)
class EmocVector:
    program_id: str
    problem: str
    e: int
    m: tuple
    o: tuple
    c: tuple
    suite_fingerprint: str
    config_fingerprint: str
    label: str = ""

    def values(self) -> tuple:
        return (self.e,) + self.m + self.o + self.c

    def __len__(self) -> int:
        return 1 + len(self.m) + len(self.o) + len(self.c)


def scaling_exponents(measurements, sizes):
    """Exponents of successive per-size measurements.

    ``sizes`` may be a SizeSchedule or an explicit increasing sequence.
    """
    if isinstance(sizes, SizeSchedule):
        sizes = sizes.sizes()
    sizes = tuple(sizes)[: len(tuple(measurements))]
    measurements = tuple(measurements)
    if len(measurements) < 2:
        raise ValueError("need at least two measurements")
    if any(x < 1 for x in measurements):
        raise ValueError("measurements must be >= 1")
    out = []
    for (s1, x1), (s2, x2) in zip(zip(sizes, measurements),
                                  zip(sizes[1:], measurements[1:])):
        out.append(math.log(x2 / x1) / math.log(s2 / s1))
    return tuple(out)


def probe_cache_key(sbytes: bytes, entry: str, suite: ProbeSuite, probe,
                    budgets: Budgets):
    """Cache key for one probe evaluation of one lowered stream.

    Shared by embed() and any caller that wants to reuse its cache.
    """
    return (sbytes, entry, suite.fingerprint(), probe.tag, probe.size, budgets)


def _suite_sorted(suite: ProbeSuite):
    groups = suite.by_size()
    return [(size, groups[size]) for size in sorted(groups)]


def embed(program: Program, problem: ProblemSpec, suite: ProbeSuite,
          cfg: EmocConfig = None, budgets: Budgets = None,
          cache: dict = None) -> EmocVector:
    """Embed one program over a suite.

    ``cache`` (optional dict) memoizes evaluation reports keyed by the
    lowered stream bytes, so structurally identical programs (for
    example normalization-equivalent variants) are executed once.

    If a size exhausts the budget, E is 1 and exponents come from the
    completed smaller sizes; larger sizes are skipped since they can only
    exhaust as well.  Fewer than two completed sizes is an error.
    """
    if cfg is None:
        cfg = EmocConfig()
    if budgets is None:
        budgets = Budgets()
    tree = normalize(program.tree, cfg.pass_config)
    stream = lower(tree)
    sbytes = stream_bytes(stream)

    e = 0
    op_totals = {name: 0 for name in OPCODE_NAMES}
    completed_sizes = []
    med_steps = []
    med_aux = []
    for size, probes in _suite_sorted(suite):
        reports = []
        exhausted = False
        for probe in probes:
            key = probe_cache_key(sbytes, program.entry, suite, probe, budgets)
            report = cache.get(key) if cache is not None else None
            if report is None:
                args = [list(v) if isinstance(v, list) else v
                        for v in probe.args]
                report = evaluate(stream, program.entry, args, budgets)
                if cache is not None:
                    cache[key] = report
            reports.append((probe, report))
            for name, count in report.op_counts.items():
                op_totals[name] += count
            if not report.ok:
                e = 1
                if isinstance(report.outcome, BudgetExhausted):
                    exhausted = True
            elif not _matches_oracle(report.outcome, probe.oracle):
                e = 1
        if exhausted:
            break
        completed_sizes.append(size)
        med_steps.append(median(r.steps for _, r in reports))
        med_aux.append(median(r.aux_peak_cells for _, r in reports))

    if len(completed_sizes) < 2:
        raise NonTerminationError(
            f"{program.id}: fewer than two sizes completed within budget"
        )
    m = scaling_exponents(med_aux, completed_sizes)
    c = scaling_exponents(med_steps, completed_sizes)
    if cfg.o_mode == "binary":
        o = tuple(1 if op_totals[name] > 0 else 0 for name in cfg.o_alphabet)
    else:
        o = tuple(op_totals[name] for name in cfg.o_alphabet)
    return EmocVector(
        program_id=program.id, problem=suite.problem, e=e, m=m, o=o, c=c,
        suite_fingerprint=suite.fingerprint(),
        config_fingerprint=cfg.fingerprint(), label=program.label,
    )


def _matches_oracle(outcome, oracle) -> bool:
    if isinstance(outcome, list) and isinstance(oracle, (list, tuple)):
        return len(outcome) == len(oracle) and all(
            _matches_oracle(u, v) for u, v in zip(outcome, oracle))
    if isinstance(outcome, bool) != isinstance(oracle, bool):
        return False
    return outcome == oracle


def embed_corpus(manifest: CorpusManifest, cfg: EmocConfig = None,
                 schedule: SizeSchedule = None, seed: int = 0,
                 budgets: Budgets = None, cache: dict = None):
    """Embed every manifest entry over one shared suite.

    Returns (suite, vectors, errors); errors is a list of (program id,
    message) for entries that failed, in manifest order.
    """
    problem = PROBLEMS[manifest.problem]
    suite = build_probe_suite(problem, schedule, seed)
    if cache is None:
        cache = {}
    vectors = []
    errors = []
    for prog in manifest.programs:
        try:
            vectors.append(embed(prog, problem, suite, cfg, budgets, cache))
        except NonTerminationError as exc:
            errors.append((prog.id, str(exc)))
    return suite, vectors, errors


def distance(u: EmocVector, v: EmocVector,
             w: DistanceWeights = None) -> float:
    """Weighted Euclidean distance over the four blocks; the O block is
    averaged over its K dimensions so alphabet size does not dominate."""
    if w is None:
        w = DistanceWeights()
    if u.config_fingerprint != v.config_fingerprint:
        raise ConfigMismatchError(
            f"config mismatch: {u.config_fingerprint} vs {v.config_fingerprint}"
        )
    if len(u.m) != len(v.m) or len(u.c) != len(v.c):
        raise ConfigMismatchError("vectors cover different size ladders")
    k = len(u.o)
    total = w.wE * (u.e - v.e) ** 2
    total += w.wM * sum((a - b) ** 2 for a, b in zip(u.m, v.m))
    total += (w.wO / k) * sum((a - b) ** 2 for a, b in zip(u.o, v.o))
    total += w.wC * sum((a - b) ** 2 for a, b in zip(u.c, v.c))
    return math.sqrt(total)


# --- export formats ---

def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, float) else str(x)


def vectors_to_csv(vectors) -> str:
    """CSV with the fixed header id,label,e,m1..,o1..,c1.. ."""
    if not vectors:
        raise ValueError("no vectors to export")
    first = vectors[0]
    header = (["id", "label", "e"]
              + [f"m{i + 1}" for i in range(len(first.m))]
              + [f"o{i + 1}" for i in range(len(first.o))]
              + [f"c{i + 1}" for i in range(len(first.c))])
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for v in vectors:
        row = [v.program_id, v.label, str(v.e)]
        row += [_fmt(x) for x in v.m]
        row += [str(x) for x in v.o]
        row += [_fmt(x) for x in v.c]
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def vectors_to_json(vectors) -> str:
    doc = [
        {
            "id": v.program_id, "label": v.label, "problem": v.problem,
            "e": v.e, "m": list(v.m), "o": list(v.o), "c": list(v.c),
            "suite_fingerprint": v.suite_fingerprint,
            "config_fingerprint": v.config_fingerprint,
        }
        for v in vectors
    ]
    return json.dumps(doc, indent=2) + "\n"


def vectors_from_csv(text: str):
    """Rebuild vectors from the CSV export.

    The CSV drops provenance, so all rows get a shared placeholder
    fingerprint; distances within one file remain well defined.
    """
    lines = [ln for ln in text.splitlines() if ln]
    if len(lines) < 2:
        raise ValueError("CSV has no data rows")
    header = lines[0].split(",")
    n_m = sum(1 for h in header if h.startswith("m") and h[1:].isdigit())
    n_o = sum(1 for h in header if h.startswith("o") and h[1:].isdigit())
    n_c = sum(1 for h in header if h.startswith("c") and h[1:].isdigit())
    out = []
    for ln in lines[1:]:
        cells = ln.split(",")
        pid, label, e = cells[0], cells[1], int(cells[2])
        rest = cells[3:]
        m = tuple(float(x) for x in rest[:n_m])
        o_raw = rest[n_m:n_m + n_o]
        o = tuple(int(x) if "." not in x else float(x) for x in o_raw)
        c = tuple(float(x) for x in rest[n_m + n_o:n_m + n_o + n_c])
        out.append(EmocVector(program_id=pid, problem="", e=e, m=m, o=o,
                              c=c, suite_fingerprint="csv",
                              config_fingerprint="csv", label=label))
    return out


def vectors_from_json(text: str):
    doc = json.loads(text)
    return [
        EmocVector(
            program_id=item["id"], problem=item["problem"], e=item["e"],
            m=tuple(item["m"]), o=tuple(item["o"]), c=tuple(item["c"]),
            suite_fingerprint=item["suite_fingerprint"],
            config_fingerprint=item["config_fingerprint"],
            label=item.get("label", ""),
        )
        for item in doc
    ]
