"""Four equivalence relations between programs.

The relations form a hierarchy: encoding-equal implies ast-equal implies
instruction-equal implies functional-equal (over any finite probe suite).
The ast and instruction relations run in two modes: raw compares the
programs as written (modulo alpha renaming for ast), normalized compares
them after the normalizer.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .bytecode import stream_bytes
from .corpus import Program
from .errors import EmocError
from .lang import SourceUnit, lower
from .normalize import PassConfig, alpha_canonicalize, normalize
from .probes import ProbeSuite
from .vm import Budgets, evaluate

__all__ = [
    "EquivVerdict",
    "encoding_equivalent",
    "ast_equivalent",
    "instruction_equivalent",
    "functional_equivalent",
]


@dataclass(frozen=True)
class EquivVerdict:
    relation: str  # encoding | ast | instruction | functional
    mode: str      # raw | normalized | n/a
    equal: bool
    witness: object = None       # divergence evidence when equal is False
    probes_examined: int = None  # functional verdicts only

    def __post_init__(self):
        if not self.equal and self.witness is None:
            raise ValueError("unequal verdict requires a witness")


def encoding_equivalent(a: SourceUnit, b: SourceUnit) -> EquivVerdict:
    """Byte identity of the newline-normalized sources."""
    ta, tb = a.text, b.text
    if ta == tb:
        return EquivVerdict("encoding", "n/a", True)
    limit = min(len(ta), len(tb))
    offset = next((i for i in range(limit) if ta[i] != tb[i]), limit)
    return EquivVerdict("encoding", "n/a", False,
                        witness={"byte_offset": offset})


def _prepared_tree(prog: Program, mode: str, cfg: PassConfig):
    if mode == "raw":
        return alpha_canonicalize(prog.tree)
    if mode == "normalized":
        return normalize(prog.tree, cfg)
    raise EmocError(f"unknown mode {mode!r}; use raw or normalized")


def ast_equivalent(a: Program, b: Program, mode: str = "raw",
                   cfg: PassConfig = None) -> EquivVerdict:
    """Structural tree equality; raw mode ignores variable names."""
    ta = _prepared_tree(a, mode, cfg)
    tb = _prepared_tree(b, mode, cfg)
    if ta == tb:
        return EquivVerdict("ast", mode, True)
    return EquivVerdict("ast", mode, False,
                        witness={"node_path": _first_diff_path(ta, tb)})


def instruction_equivalent(a: Program, b: Program, mode: str = "raw",
                           cfg: PassConfig = None) -> EquivVerdict:
    """Byte identity of the lowered instruction streams."""
    ta = a.tree if mode == "raw" else _prepared_tree(a, mode, cfg)
    tb = b.tree if mode == "raw" else _prepared_tree(b, mode, cfg)
    sa, sb = lower(ta), lower(tb)
    if stream_bytes(sa) == stream_bytes(sb):
        return EquivVerdict("instruction", mode, True)
    return EquivVerdict("instruction", mode, False,
                        witness=_stream_diff(sa, sb))


def functional_equivalent(a: Program, b: Program, suite: ProbeSuite,
                          budgets: Budgets = None) -> EquivVerdict:
    """Output agreement on every probe; any trap or budget event on
    either side makes the pair unequal with that probe as witness."""
    sa, sb = lower(a.tree), lower(b.tree)
    identical = stream_bytes(sa) == stream_bytes(sb)
    examined = 0
    for probe in suite.probes:
        examined += 1
        ra = evaluate(sa, a.entry, _clone_args(probe.args), budgets)
        if identical and a.entry == b.entry:
            rb = ra
        else:
            rb = evaluate(sb, b.entry, _clone_args(probe.args), budgets)
        if not ra.ok or not rb.ok or not _values_equal(ra.outcome, rb.outcome):
            witness = {
                "size": probe.size,
                "tag": probe.tag,
                "args": list(probe.args),
                "outcome_a": _describe(ra),
                "outcome_b": _describe(rb),
            }
            return EquivVerdict("functional", "n/a", False, witness=witness,
                                probes_examined=examined)
    return EquivVerdict("functional", "n/a", True, probes_examined=examined)


def _clone_args(args):
    return [list(v) if isinstance(v, list) else v for v in args]


def _values_equal(x, y) -> bool:
    """Type-strict equality: bools and ints never compare equal."""
    if isinstance(x, list) and isinstance(y, list):
        return len(x) == len(y) and all(
            _values_equal(u, v) for u, v in zip(x, y))
    if isinstance(x, bool) != isinstance(y, bool):
        return False
    return type(x) is type(y) and x == y


def _describe(report):
    if report.ok:
        return report.outcome
    return repr(report.outcome)


def _first_diff_path(a, b, path="ast") -> str:
    """Pre-order path of the first structural difference."""
    if type(a) is not type(b):
        return path
    if isinstance(a, tuple):
        for i, (x, y) in enumerate(zip(a, b)):
            sub = _first_diff_path(x, y, f"{path}[{i}]")
            if sub is not None:
                return sub
        if len(a) != len(b):
            return f"{path}[{min(len(a), len(b))}]"
        return None
    if dataclasses.is_dataclass(a):
        for f in dataclasses.fields(a):
            sub = _first_diff_path(getattr(a, f.name), getattr(b, f.name),
                                   f"{path}.{f.name}")
            if sub is not None:
                return sub
        return None
    return path if a != b else None


def _stream_diff(sa, sb):
    fa = {f.name: f for f in sa.functions}
    fb = {f.name: f for f in sb.functions}
    for name in list(fa) + [n for n in fb if n not in fa]:
        if name not in fa or name not in fb:
            return {"function": name, "instruction_index": None,
                    "note": "function only on one side"}
        xa, xb = fa[name], fb[name]
        for i, (u, v) in enumerate(zip(xa.instrs, xb.instrs)):
            if u != v:
                return {"function": name, "instruction_index": i,
                        "a": f"{u.name} {u.operand}",
                        "b": f"{v.name} {v.operand}"}
        if len(xa.instrs) != len(xb.instrs):
            return {"function": name,
                    "instruction_index": min(len(xa.instrs), len(xb.instrs)),
                    "note": "streams have different lengths"}
        if (xa.arity, xa.n_slots) != (xb.arity, xb.n_slots):
            return {"function": name, "instruction_index": 0,
                    "note": "arity or slot count differs"}
    return {"function": None, "instruction_index": None,
            "note": "function order differs"}
