"""Instrumented execution of instruction streams.

The compiled core (``_vmcore``, Cython) is used when it was built; setting
``EMOC_PURE=1`` in the environment forces the pure-Python backend.  Both
backends produce byte-identical :class:`EvalReport` values.
"""

from __future__ import annotations

import os

from .report import Budgets, BudgetExhausted, EvalReport, Trap, TRAP_KINDS

if os.environ.get("EMOC_PURE") == "1":
    from . import _pyvm as _backend

    BACKEND = "python"
else:
    try:
        from . import _vmcore as _backend  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _pyvm as _backend

        BACKEND = "python"

evaluate = _backend.evaluate

from . import _pyvm  # noqa: E402  (always importable, used by the benchmark)

evaluate_pure = _pyvm.evaluate

__all__ = [
    "Budgets",
    "BudgetExhausted",
    "EvalReport",
    "Trap",
    "TRAP_KINDS",
    "BACKEND",
    "evaluate",
    "evaluate_pure",
]
