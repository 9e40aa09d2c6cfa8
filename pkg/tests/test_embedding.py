import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_program
from emoc.embedding import (DEFAULT_O_ALPHABET, DistanceWeights, EmocConfig,
                            EmocVector, distance, embed, embed_corpus,
                            scaling_exponents, vectors_from_csv,
                            vectors_from_json, vectors_to_csv,
                            vectors_to_json)
from emoc.errors import ConfigMismatchError, NonTerminationError
from emoc.probes import PROBLEMS, SizeSchedule, build_probe_suite
from emoc.vm import Budgets

BUBBLE = """\
fn sort_ascending(a) {
    let n = len(a);
    for i in range(n) {
        for j in range(n - 1 - i) {
            if a[j] > a[j + 1] {
                let t = a[j];
                a[j] = a[j + 1];
                a[j + 1] = t;
            }
        }
    }
    return a;
}
"""


def small_embed(text, problem="sort_ascending", sched=SizeSchedule(4, 2.0, 3),
                **kw):
    spec = PROBLEMS[problem]
    suite = build_probe_suite(spec, sched, seed=5)
    return embed(make_program(text, problem), spec, suite, **kw)


# --- scaling exponents ---

def test_scaling_exponents_doubling():
    # quadratic growth over a doubling ladder reads as exponent 2
    assert scaling_exponents([64, 256, 1024], [8, 16, 32]) == (2.0, 2.0)


def test_scaling_exponents_constant():
    assert scaling_exponents([5, 5, 5], [8, 16, 32]) == (0.0, 0.0)


def test_scaling_exponents_accepts_schedule():
    assert scaling_exponents([8, 16], SizeSchedule(8, 2.0, 2)) == (1.0,)


def test_scaling_exponents_validation():
    with pytest.raises(ValueError):
        scaling_exponents([8], [8])
    with pytest.raises(ValueError):
        scaling_exponents([0, 8], [8, 16])


# --- embed ---

def test_vector_layout_and_length():
    v = small_embed(BUBBLE, sched=SizeSchedule(4, 2.0, 4))
    assert v.e == 0
    assert len(v.m) == 3 and len(v.c) == 3
    assert len(v.o) == len(DEFAULT_O_ALPHABET) == 21
    assert len(v) == 1 + 3 + 21 + 3
    assert v.values() == (v.e,) + v.m + v.o + v.c


LINEAR_SEARCH = """\
fn search_index(a, t) {
    for i in range(len(a)) {
        if a[i] == t { return i; }
    }
    return 0 - 1;
}
"""


def test_default_schedule_gives_forty_dimensions():
    spec = PROBLEMS["search_index"]
    suite = build_probe_suite(spec, seed=5)
    v = embed(make_program(LINEAR_SEARCH, "search_index"), spec, suite)
    assert len(v) == 40  # 1 + 9 + 21 + 9


def test_correct_program_has_e_zero():
    assert small_embed(BUBBLE).e == 0


def test_wrong_program_has_e_one():
    v = small_embed("fn sort_ascending(a) { return a; }")
    assert v.e == 1


def test_trapping_program_has_e_one():
    v = small_embed("fn sort_ascending(a) { let x = a[len(a)]; return a; }")
    assert v.e == 1


def test_bool_int_confusion_counts_as_disagreement():
    v = small_embed("fn is_prime(n) { return 1; }", "is_prime",
                    SizeSchedule(3, 2.0, 3))
    assert v.e == 1


def test_rename_invariance():
    renamed = BUBBLE.replace("a[", "zz[").replace("(a)", "(zz)") \
                    .replace("return a;", "return zz;")
    a = small_embed(BUBBLE)
    b = small_embed(renamed)
    assert a.values() == b.values()


def test_o_bits_reflect_opcode_use():
    v = small_embed(BUBBLE)
    bits = dict(zip(DEFAULT_O_ALPHABET, v.o))
    assert bits["GT"] == 1 and bits["INDEX_LOAD"] == 1
    assert bits["MUL"] == 0 and bits["LIST_PUSH"] == 0


def test_o_counts_mode():
    cfg = EmocConfig(o_mode="counts")
    v = small_embed(BUBBLE, cfg=cfg)
    counts = dict(zip(DEFAULT_O_ALPHABET, v.o))
    assert counts["GT"] > counts["MUL"] == 0
    assert v.config_fingerprint != EmocConfig().fingerprint()


def test_nontermination_when_budget_kills_every_size():
    looping = "fn sort_ascending(a) { while 0 < 1 { } return a; }"
    with pytest.raises(NonTerminationError):
        small_embed(looping, budgets=Budgets(max_steps=1000))


def test_partial_ladder_when_large_sizes_exhaust():
    # quadratic sort with a budget that only admits the small sizes
    v = small_embed(BUBBLE, sched=SizeSchedule(4, 2.0, 6),
                    budgets=Budgets(max_steps=20_000))
    assert v.e == 1
    assert len(v.c) < 5  # ladder cut short, exponents only for finished sizes


def test_cache_reuse_and_determinism():
    cache = {}
    a = small_embed(BUBBLE, cache=cache)
    filled = len(cache)
    assert filled == 15  # 3 sizes x 5 probes
    b = small_embed(BUBBLE, cache=cache)
    assert len(cache) == filled
    assert a == b


def test_embed_corpus_bundled(manifests, eval_cache):
    man = manifests["search"]
    suite, vectors, errors = embed_corpus(
        man, schedule=SizeSchedule(4, 2.0, 3), seed=5, cache=eval_cache)
    assert errors == []
    assert [v.program_id for v in vectors] == [p.id for p in man.programs]
    assert all(v.e == 0 for v in vectors)
    assert all(v.label for v in vectors)


# --- distance ---

def vec(e=0, m=(0.0, 0.0), o=(0,) * 21, c=(0.0, 0.0), pid="x"):
    return EmocVector(program_id=pid, problem="p", e=e, m=tuple(m),
                      o=tuple(o), c=tuple(c), suite_fingerprint="s",
                      config_fingerprint="f")


def test_distance_zero_for_identical():
    assert distance(vec(), vec()) == 0.0


def test_single_o_bit_distance():
    a = vec()
    b = vec(o=(1,) + (0,) * 20)
    assert distance(a, b) == pytest.approx(math.sqrt(1 / 21))


def test_distance_weights():
    a = vec(c=(0.0, 0.0))
    b = vec(c=(2.0, 0.0))
    assert distance(a, b, DistanceWeights(wC=4.0)) == pytest.approx(4.0)
    assert distance(a, b, DistanceWeights(wC=0.0)) == 0.0


def test_distance_rejects_mismatched_configs():
    a = vec()
    b = EmocVector(program_id="y", problem="p", e=0, m=(0.0, 0.0),
                   o=(0,) * 21, c=(0.0, 0.0), suite_fingerprint="s",
                   config_fingerprint="other")
    with pytest.raises(ConfigMismatchError):
        distance(a, b)


def test_weights_validation():
    with pytest.raises(ValueError):
        DistanceWeights(wE=-1.0)
    with pytest.raises(ValueError):
        DistanceWeights(0.0, 0.0, 0.0, 0.0)


floats = st.floats(min_value=-4.0, max_value=4.0, allow_nan=False)
bits = st.integers(min_value=0, max_value=1)


@st.composite
def vectors(draw):
    return vec(
        e=draw(bits),
        m=tuple(draw(st.lists(floats, min_size=2, max_size=2))),
        o=tuple(draw(st.lists(bits, min_size=21, max_size=21))),
        c=tuple(draw(st.lists(floats, min_size=2, max_size=2))),
    )


@settings(max_examples=200, deadline=None)
@given(vectors(), vectors())
def test_distance_symmetry_and_nonnegativity(u, v):
    d = distance(u, v)
    assert d >= 0
    assert d == pytest.approx(distance(v, u))
    assert distance(u, u) == 0.0


@settings(max_examples=200, deadline=None)
@given(vectors(), vectors(), vectors())
def test_distance_triangle_inequality(u, v, w):
    assert distance(u, w) <= distance(u, v) + distance(v, w) + 1e-9


# --- export formats ---

def test_csv_round_trip():
    a = small_embed(BUBBLE)
    text = vectors_to_csv([a])
    header = text.splitlines()[0]
    assert header.startswith("id,label,e,m1,m2")
    (b,) = vectors_from_csv(text)
    assert b.program_id == a.program_id
    assert (b.e, b.m, b.o, b.c) == (a.e, a.m, a.o, a.c)


def test_json_round_trip_preserves_provenance():
    a = small_embed(BUBBLE)
    (b,) = vectors_from_json(vectors_to_json([a]))
    assert b == a


def test_csv_rejects_empty():
    with pytest.raises(ValueError):
        vectors_to_csv([])
