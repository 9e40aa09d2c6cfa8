"""Shared fixtures.

The acceptance criteria all lean on the same corpus embeddings, so those
are computed once per session behind a shared evaluation cache keyed by
lowered stream bytes; normalization-equivalent variants then cost one
execution between them.
"""

from __future__ import annotations

import time

import pytest

from emoc.corpus import BUNDLED_GROUPS, Program, bundled_manifest_path, load_manifest
from emoc.embedding import embed_corpus
from emoc.lang import SourceUnit


def make_program(text: str, entry: str, id: str = "<test>", **kw) -> Program:
    return Program.from_source(SourceUnit.from_text(text, origin=id),
                               entry, id=id, **kw)


@pytest.fixture(scope="session")
def manifests():
    return {group: load_manifest(bundled_manifest_path(group))
            for group in BUNDLED_GROUPS}


@pytest.fixture(scope="session")
def eval_cache():
    return {}


@pytest.fixture(scope="session")
def corpus_embeddings(manifests, eval_cache):
    """{group: (suite, vectors)} over default schedules, plus the wall
    time the full sweep took (used by the oracle-sweep time limit)."""
    out = {}
    start = time.perf_counter()
    for group, man in manifests.items():
        suite, vectors, errors = embed_corpus(man, seed=42, cache=eval_cache)
        assert not errors, errors
        out[group] = (suite, vectors)
    out["elapsed"] = time.perf_counter() - start
    return out
