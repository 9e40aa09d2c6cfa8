"""Lowered instruction streams for the MiniAlg subject language.

A compiled program is an ordered table of functions, each holding a flat
list of (opcode, operand) instructions with locals resolved to dense slot
indices.  The opcode alphabet is fixed; stream identity is decided on the
canonical byte serialization produced by :func:`stream_bytes`.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

#: Fixed opcode alphabet, in normative order.
OPCODE_NAMES = (
    "CONST",
    "LOAD",
    "STORE",
    "ADD",
    "SUB",
    "MUL",
    "DIV",
    "MOD",
    "NEG",
    "EQ",
    "NE",
    "LT",
    "LE",
    "GT",
    "GE",
    "NOT",
    "AND",
    "OR",
    "INDEX_LOAD",
    "INDEX_STORE",
    "LIST_NEW",
    "LIST_PUSH",
    "LIST_POP",
    "LIST_LEN",
    "JUMP",
    "BRANCH",
    "CALL",
    "RET",
    "POP_TOP",
)

OP = {name: i for i, name in enumerate(OPCODE_NAMES)}
N_OPCODES = len(OPCODE_NAMES)

# Operand conventions:
#   CONST       operand = immediate value; aux = 1 when the value is a boolean
#   LOAD/STORE  operand = local slot index
#   JUMP        operand = absolute target index within the function
#   BRANCH      operand = absolute target, jumped to when the popped condition
#               is false; target -1 means "trap assertion-failure instead"
#   AND/OR      operand = absolute target; AND jumps there leaving the value
#               when the top is false (OR: when true), otherwise pops it
#   LIST_NEW    operand = k >= 0 pops k literal elements; -1 pops (n, fill)
#   CALL        operand = callee index in the function table
# All other opcodes take operand 0.

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1


@dataclass(frozen=True)
class Instr:
    op: int
    operand: int = 0
    aux: int = 0

    @property
    def name(self) -> str:
        return OPCODE_NAMES[self.op]


@dataclass(frozen=True)
class FunctionCode:
    name: str
    arity: int
    n_slots: int
    instrs: tuple[Instr, ...]


@dataclass(frozen=True)
class InstructionStream:
    functions: tuple[FunctionCode, ...]
    _index: dict[str, int] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        self._index.update({f.name: i for i, f in enumerate(self.functions)})

    def function(self, name: str) -> FunctionCode:
        return self.functions[self._index[name]]

    def has_function(self, name: str) -> bool:
        return name in self._index


def stream_bytes(stream: InstructionStream) -> bytes:
    """Canonical byte serialization; two streams are equal iff these match."""
    chunks = []
    for fn in stream.functions:
        head = fn.name.encode("utf-8")
        chunks.append(struct.pack("<I", len(head)))
        chunks.append(head)
        chunks.append(struct.pack("<iiI", fn.arity, fn.n_slots, len(fn.instrs)))
        for ins in fn.instrs:
            chunks.append(struct.pack("<bqb", ins.op, ins.operand, ins.aux))
    return b"".join(chunks)


def disassemble(stream: InstructionStream) -> str:
    lines = []
    for fn in stream.functions:
        lines.append(f"fn {fn.name}/{fn.arity} slots={fn.n_slots}")
        for i, ins in enumerate(fn.instrs):
            suffix = ""
            if ins.op == OP["CONST"] and ins.aux:
                suffix = " (bool)"
            lines.append(f"  {i:4d}  {ins.name} {ins.operand}{suffix}")
    return "\n".join(lines)
