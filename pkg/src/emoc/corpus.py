"""Programs, corpus manifests, and the bundled example corpus.

A manifest is a JSON file listing programs for one problem:

    {"problem": "sort_ascending",
     "entries": [{"path": "bubble_baseline.alg", "entry": "sort_ascending",
                  "algorithm_label": "bubble", "variant": "baseline"}, ...]}

Paths are relative to the manifest's directory.  Loading is eager: every
referenced file is parsed immediately so errors surface with the path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import EmocError, MiniAlgSyntaxError
from .lang import SourceUnit, parse
from .lang import ast as A
from .probes import PROBLEMS

__all__ = [
    "Program",
    "ManifestEntry",
    "CorpusManifest",
    "load_program",
    "load_manifest",
    "bundled_manifest_path",
    "BUNDLED_GROUPS",
]

BUNDLED_GROUPS = {
    "sorting": "sort_ascending",
    "search": "search_index",
    "primes": "is_prime",
}


@dataclass(frozen=True)
class Program:
    """A parsed program plus the metadata downstream stages need."""

    id: str
    source: SourceUnit
    tree: A.Ast
    entry: str
    label: str = ""
    variant: str = ""

    @classmethod
    def from_source(cls, source: SourceUnit, entry: str, id: str = None,
                    label: str = "", variant: str = "") -> "Program":
        tree = parse(source)
        if not tree.has_function(entry):
            raise EmocError(f"{source.origin}: no function named {entry!r}")
        return cls(id=id or source.origin, source=source, tree=tree,
                   entry=entry, label=label, variant=variant)

    @classmethod
    def from_path(cls, path, entry: str, **kw) -> "Program":
        return cls.from_source(SourceUnit.from_path(path), entry, **kw)


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    entry: str
    algorithm_label: str
    variant: str


@dataclass(frozen=True)
class CorpusManifest:
    problem: str
    entries: tuple
    programs: tuple  # parsed Program per entry, same order

    def labels(self) -> dict:
        return {p.id: p.label for p in self.programs}


def load_manifest(path) -> CorpusManifest:
    path = Path(path)
    if not path.exists():
        raise EmocError(f"manifest not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise EmocError(f"{path}: malformed JSON ({exc})") from exc

    problem_name = doc.get("problem")
    if problem_name not in PROBLEMS:
        raise EmocError(f"{path}: unknown problem {problem_name!r}")
    problem = PROBLEMS[problem_name]

    raw = doc.get("entries")
    if not isinstance(raw, list) or not raw:
        raise EmocError(f"{path}: manifest has no entries")

    entries = []
    programs = []
    seen = set()
    for item in raw:
        try:
            entry = ManifestEntry(
                path=item["path"], entry=item["entry"],
                algorithm_label=item["algorithm_label"],
                variant=item.get("variant", ""),
            )
        except (KeyError, TypeError) as exc:
            raise EmocError(f"{path}: malformed entry {item!r}") from exc
        if not entry.algorithm_label:
            raise EmocError(f"{path}: empty label for {entry.path}")
        if entry.path in seen:
            raise EmocError(f"{path}: duplicate path {entry.path}")
        seen.add(entry.path)

        prog_path = path.parent / entry.path
        if not prog_path.exists():
            raise EmocError(f"{path}: missing program file {prog_path}")
        try:
            prog = Program.from_path(
                prog_path, entry.entry, id=entry.path,
                label=entry.algorithm_label, variant=entry.variant,
            )
        except MiniAlgSyntaxError as exc:
            raise EmocError(f"{prog_path}: {exc}") from exc
        fn = prog.tree.function(entry.entry)
        if len(fn.params) != problem.arity:
            raise EmocError(
                f"{prog_path}: entry {entry.entry!r} has arity "
                f"{len(fn.params)}, problem {problem_name} needs {problem.arity}"
            )
        entries.append(entry)
        programs.append(prog)

    return CorpusManifest(problem=problem_name, entries=tuple(entries),
                          programs=tuple(programs))


def bundled_manifest_path(group: str) -> Path:
    """Filesystem path of a bundled corpus manifest (sorting/search/primes)."""
    if group not in BUNDLED_GROUPS:
        raise EmocError(f"unknown corpus group {group!r}; "
                        f"choose from {sorted(BUNDLED_GROUPS)}")
    root = resources.files("emoc") / "data" / group / "manifest.json"
    return Path(str(root))
