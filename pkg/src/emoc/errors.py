"""Exception types shared across the toolkit."""

from __future__ import annotations


class EmocError(Exception):
    """Base class for all toolkit errors."""


class MiniAlgSyntaxError(EmocError):
    """Raised on ungrammatical source; carries a 1-based source position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class MiniAlgNameError(EmocError):
    """Unknown identifier, duplicate definition, or bad call arity."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        where = f"{line}:{col}: " if line else ""
        super().__init__(f"{where}{message}")
        self.message = message
        self.line = line
        self.col = col


class EvaluationError(EmocError):
    """Raised when an evaluation cannot even start (bad entry, bad arity)."""


class NonTerminationError(EmocError):
    """Raised when budget exhaustion leaves too little data for an embedding."""


class ConfigMismatchError(EmocError):
    """Raised when vectors produced under different configs are combined."""
