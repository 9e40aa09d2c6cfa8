import pytest

from conftest import make_program
from emoc.equiv import (ast_equivalent, encoding_equivalent,
                        functional_equivalent, instruction_equivalent)
from emoc.errors import EmocError
from emoc.lang import SourceUnit
from emoc.probes import PROBLEMS, SizeSchedule, build_probe_suite

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

BUBBLE_RENAMED = BUBBLE.replace("a[", "xs[").replace("(a)", "(xs)") \
                       .replace("len(a)", "len(xs)").replace("return a;", "return xs;")

# the inner comparison is off by one: the last pair is never swapped
BUBBLE_BROKEN = BUBBLE.replace("range(n - 1 - i)", "range(n - 2 - i)")


def small_suite(problem="sort_ascending"):
    return build_probe_suite(PROBLEMS[problem], SizeSchedule(4, 2.0, 3), seed=1)


def prog(text, entry="sort_ascending", id="p"):
    return make_program(text, entry, id=id)


def test_encoding_identity():
    v = encoding_equivalent(SourceUnit.from_text(BUBBLE),
                            SourceUnit.from_text(BUBBLE))
    assert v.equal and v.relation == "encoding"


def test_encoding_witness_is_first_diff_offset():
    v = encoding_equivalent(SourceUnit.from_text("fn f() { return 1; }"),
                            SourceUnit.from_text("fn f() { return 2; }"))
    assert not v.equal
    assert v.witness == {"byte_offset": 16}


def test_encoding_normalizes_newlines_only():
    v = encoding_equivalent(SourceUnit.from_text("fn f() {\r\n return 1; }"),
                            SourceUnit.from_text("fn f() {\n return 1; }"))
    assert v.equal


def test_ast_raw_ignores_names():
    v = ast_equivalent(prog(BUBBLE), prog(BUBBLE_RENAMED), "raw")
    assert v.equal


def test_ast_witness_points_into_tree():
    a = prog("fn f(x) { return x + 1; }", "f")
    b = prog("fn f(x) { return x + 2; }", "f")
    v = ast_equivalent(a, b, "raw")
    assert not v.equal
    assert v.witness["node_path"].startswith("ast")


def test_ast_rejects_unknown_mode():
    with pytest.raises(EmocError):
        ast_equivalent(prog(BUBBLE), prog(BUBBLE), "canonical")


def test_instruction_witness_names_function_and_index():
    a = prog("fn f(x) { return x + 1; }", "f")
    b = prog("fn f(x) { return x - 1; }", "f")
    v = instruction_equivalent(a, b, "raw")
    assert not v.equal
    assert v.witness["function"] == "f"
    assert isinstance(v.witness["instruction_index"], int)


def test_functional_detects_broken_mutant():
    suite = small_suite()
    v = functional_equivalent(prog(BUBBLE), prog(BUBBLE_BROKEN), suite)
    assert not v.equal
    assert v.witness["tag"]
    assert v.witness["outcome_a"] != v.witness["outcome_b"]
    assert 1 <= v.probes_examined <= len(suite.probes)


def test_functional_counts_every_probe_when_equal():
    suite = small_suite()
    v = functional_equivalent(prog(BUBBLE), prog(BUBBLE_RENAMED), suite)
    assert v.equal
    assert v.probes_examined == len(suite.probes)


def test_functional_trap_on_either_side_is_unequal():
    suite = small_suite()
    trapping = prog("fn sort_ascending(a) { return a[len(a)]; }")
    v = functional_equivalent(prog(BUBBLE), trapping, suite)
    assert not v.equal
    assert "Trap" in str(v.witness["outcome_b"])


def test_hierarchy_implications():
    """encoding => ast => instruction => functional, checked on a ladder
    of progressively weaker-equal pairs."""
    suite = small_suite()
    pairs = [
        (prog(BUBBLE), prog(BUBBLE, id="copy")),        # encoding-equal
        (prog(BUBBLE), prog(BUBBLE_RENAMED)),           # ast-equal only
    ]
    for a, b in pairs:
        verdicts = [
            encoding_equivalent(a.source, b.source),
            ast_equivalent(a, b, "raw"),
            instruction_equivalent(a, b, "raw"),
            functional_equivalent(a, b, suite),
        ]
        flags = [v.equal for v in verdicts]
        # once a relation holds, every weaker relation must hold too
        for stronger, weaker in zip(flags, flags[1:]):
            assert not stronger or weaker


def test_unequal_verdict_requires_witness():
    from emoc.equiv import EquivVerdict
    with pytest.raises(ValueError):
        EquivVerdict("ast", "raw", False)
