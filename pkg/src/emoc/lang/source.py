"""Source units: raw program text plus its origin tag."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class SourceUnit:
    text: str
    origin: str = "<inline>"

    @classmethod
    def from_text(cls, text, origin: str = "<inline>") -> "SourceUnit":
        if isinstance(text, bytes):
            text = text.decode("utf-8")
        return cls(text=normalize_newlines(text), origin=origin)

    @classmethod
    def from_path(cls, path) -> "SourceUnit":
        p = Path(path)
        return cls.from_text(p.read_bytes(), origin=str(p))


def normalize_newlines(text: str) -> str:
    return text.replace("\r\n", "\n").replace("\r", "\n")
