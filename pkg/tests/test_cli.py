"""End-to-end CLI checks through the installed ``emoc`` entry point."""

import json
import subprocess
import sys

import pytest

PROGRAM = """\
fn f(a) {
    let s = 0;
    for i in range(len(a)) {
        s = s + a[i];
    }
    return s;
}
"""

SORT = """\
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


def emoc(*args, **kw):
    return subprocess.run([sys.executable, "-m", "emoc.cli", *args],
                          capture_output=True, text=True, **kw)


@pytest.fixture
def prog(tmp_path):
    p = tmp_path / "prog.alg"
    p.write_text(PROGRAM)
    return str(p)


@pytest.fixture
def sort_file(tmp_path):
    p = tmp_path / "sort.alg"
    p.write_text(SORT)
    return str(p)


def test_parse_round_trips(prog):
    r = emoc("parse", prog)
    assert r.returncode == 0
    again = emoc("parse", "/dev/stdin", input=r.stdout)
    assert again.returncode == 0
    assert again.stdout == r.stdout


def test_parse_disasm(prog):
    r = emoc("parse", prog, "--disasm")
    assert r.returncode == 0
    assert "fn f/1" in r.stdout


def test_parse_error_exit_code(tmp_path):
    bad = tmp_path / "bad.alg"
    bad.write_text("fn f( { return 1; }")
    r = emoc("parse", str(bad))
    assert r.returncode == 2
    assert "parse error" in r.stderr


def test_missing_file_is_usage_error():
    r = emoc("parse", "/no/such/file.alg")
    assert r.returncode == 1


def test_run_reports_value(prog):
    r = emoc("run", prog, "--args", "[[1, 2, 3]]")
    assert r.returncode == 0
    doc = json.loads(r.stdout)
    assert doc["outcome"] == {"value": 6}
    assert doc["steps"] == sum(doc["op_counts"].values())


def test_run_reports_trap(prog):
    r = emoc("run", prog, "--args", "[5]")
    assert r.returncode == 0  # the report itself is the product
    assert json.loads(r.stdout)["outcome"] == {"trap": "type-error"}


def test_run_budget_flag(prog):
    r = emoc("run", prog, "--args", "[[1, 2, 3]]", "--max-steps", "3")
    assert json.loads(r.stdout)["outcome"] == {"budget_exhausted": "steps"}


def test_run_bad_args_json(prog):
    r = emoc("run", prog, "--args", "not json")
    assert r.returncode == 1


def test_normalize_removes_dead_code(tmp_path):
    p = tmp_path / "p.alg"
    p.write_text("fn f(a) { let dead = a * 9; return a; }")
    r = emoc("normalize", str(p))
    assert r.returncode == 0
    assert "dead" not in r.stdout and "* 9" not in r.stdout


def test_probes_deterministic():
    a = emoc("probes", "--problem", "is_prime", "--seed", "7")
    b = emoc("probes", "--problem", "is_prime", "--seed", "7")
    assert a.returncode == 0
    assert a.stdout == b.stdout
    assert json.loads(a.stdout)["problem"] == "is_prime"


def test_equiv_equal_and_not_equal(tmp_path, sort_file):
    renamed = tmp_path / "renamed.alg"
    renamed.write_text(SORT.replace("a[", "q[").replace("(a)", "(q)")
                       .replace("return a;", "return q;"))
    r = emoc("equiv", sort_file, str(renamed), "--relation", "ast",
             "--entry", "sort_ascending")
    assert r.returncode == 0
    assert json.loads(r.stdout)["equal"] is True

    r = emoc("equiv", sort_file, str(renamed), "--relation", "encoding")
    assert r.returncode == 4
    assert json.loads(r.stdout)["equal"] is False


def test_equiv_functional_requires_problem(tmp_path, sort_file):
    r = emoc("equiv", sort_file, sort_file, "--relation", "functional")
    assert r.returncode == 1


def test_embed_csv_and_json(sort_file, tmp_path):
    out_csv = tmp_path / "v.csv"
    r = emoc("embed", sort_file, "--problem", "sort_ascending",
             "--sizes", "4x2^3", "--out", str(out_csv))
    assert r.returncode == 0
    header = out_csv.read_text().splitlines()[0]
    assert header.split(",")[:3] == ["id", "label", "e"]

    r = emoc("embed", sort_file, "--problem", "sort_ascending",
             "--sizes", "4x2^3")
    assert r.returncode == 0
    (doc,) = json.loads(r.stdout)
    assert doc["e"] == 0
    assert len(doc["o"]) == 21


def test_embed_bad_sizes_spec(sort_file):
    r = emoc("embed", sort_file, "--problem", "sort_ascending",
             "--sizes", "banana")
    assert r.returncode == 1


def test_embed_nontermination_exit_code(tmp_path):
    p = tmp_path / "loop.alg"
    p.write_text("fn sort_ascending(a) { while 0 < 1 { } return a; }")
    r = emoc("embed", str(p), "--problem", "sort_ascending",
             "--sizes", "4x2^3", "--max-steps", "1000")
    assert r.returncode == 3


def test_corpus_pipeline(tmp_path):
    """embed-corpus -> dist -> knn -> cluster -> diversity on bundled primes."""
    vecs = tmp_path / "primes.json"
    r = emoc("embed-corpus", "primes", "--seed", "42", "--out", str(vecs))
    assert r.returncode == 0, r.stderr

    doc = json.loads(vecs.read_text())
    assert len(doc) == 15

    r = emoc("dist", str(vecs), "trial_baseline.alg", "trial_renamed.alg")
    assert r.returncode == 0
    assert json.loads(r.stdout)["distance"] == 0.0

    r = emoc("knn", str(vecs), "--query", "trial_baseline.alg", "--top", "4")
    assert r.returncode == 0
    top = json.loads(r.stdout)
    assert all(item["distance"] == 0.0 for item in top)

    r = emoc("cluster", str(vecs), "--k", "3", "--seed", "42")
    assert r.returncode == 0
    assert json.loads(r.stdout)["accuracy"] == 1.0

    r = emoc("diversity", str(vecs))
    assert r.returncode == 0
    assert json.loads(r.stdout)["population"] == 15


def test_dist_unknown_id(tmp_path):
    vecs = tmp_path / "primes.csv"
    r = emoc("embed-corpus", "primes", "--sizes", "3x1.5^3",
             "--out", str(vecs))
    assert r.returncode == 0, r.stderr
    r = emoc("dist", str(vecs), "trial_baseline.alg", "nope")
    assert r.returncode == 1
