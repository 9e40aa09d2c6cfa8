"""Budgets and evaluation reports shared by both VM backends."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..bytecode import OPCODE_NAMES

TRAP_KINDS = (
    "division-by-zero",
    "modulo-by-zero",
    "index-out-of-bounds",
    "integer-overflow",
    "assertion-failure",
    "pop-from-empty",
    "type-error",
)

DEFAULT_MAX_STEPS = 1_000_000_000
DEFAULT_MAX_CELLS = 10_000_000
DEFAULT_MAX_CALL_DEPTH = 10_000


@dataclass(frozen=True)
class Budgets:
    max_steps: int = DEFAULT_MAX_STEPS
    max_cells: int = DEFAULT_MAX_CELLS
    max_call_depth: int = DEFAULT_MAX_CALL_DEPTH

    def __post_init__(self):
        if self.max_steps <= 0 or self.max_cells <= 0 or self.max_call_depth <= 0:
            raise ValueError("budgets must be strictly positive")


@dataclass(frozen=True)
class Trap:
    kind: str


@dataclass(frozen=True)
class BudgetExhausted:
    which: str  # "steps" | "cells" | "depth"


@dataclass(frozen=True)
class EvalReport:
    outcome: object  # Value | Trap | BudgetExhausted
    steps: int
    op_counts: dict = field(compare=True)
    aux_peak_cells: int

    @property
    def ok(self) -> bool:
        return not isinstance(self.outcome, (Trap, BudgetExhausted))

    def to_json_dict(self) -> dict:
        if isinstance(self.outcome, Trap):
            outcome = {"trap": self.outcome.kind}
        elif isinstance(self.outcome, BudgetExhausted):
            outcome = {"budget_exhausted": self.outcome.which}
        else:
            outcome = {"value": self.outcome}
        return {
            "outcome": outcome,
            "steps": self.steps,
            "op_counts": {name: self.op_counts[name] for name in OPCODE_NAMES},
            "aux_peak_cells": self.aux_peak_cells,
        }
