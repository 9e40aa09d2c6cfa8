"""Command-line interface.

Exit codes: 0 success (or "equal" verdict), 1 usage error, 2 parse
error, 3 evaluation or nontermination error, 4 not-equal verdict or
failed check.  All reports are JSON; embeddings are CSV or JSON.
"""

from __future__ import annotations

import dataclasses
import json
import re
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

import click

from . import analyze
from .bytecode import disassemble
from .corpus import BUNDLED_GROUPS, Program, bundled_manifest_path, load_manifest
from .embedding import (DistanceWeights, EmocConfig, distance, embed,
                        embed_corpus, vectors_from_csv, vectors_from_json,
                        vectors_to_csv, vectors_to_json)
from .equiv import (ast_equivalent, encoding_equivalent, functional_equivalent,
                    instruction_equivalent)
from .errors import (EmocError, EvaluationError, MiniAlgSyntaxError,
                     NonTerminationError)
from .lang import SourceUnit, lower, parse, render
from .normalize import PassConfig, normalize
from .probes import (PROBLEMS, SizeSchedule, build_probe_suite, suite_to_json)
from .vm import Budgets, evaluate

EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_EVAL = 3
EXIT_VERDICT = 4


def _emit(text: str, out: str):
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=not text.endswith("\n"))


def _load_config(path: str) -> dict:
    if not path:
        return {}
    raw = Path(path).read_bytes()
    if path.endswith(".toml"):
        return tomllib.loads(raw.decode())
    return json.loads(raw)


def _emoc_config(doc: dict) -> EmocConfig:
    kwargs = {}
    if "o_alphabet" in doc:
        kwargs["o_alphabet"] = tuple(doc["o_alphabet"])
    if "o_mode" in doc:
        kwargs["o_mode"] = doc["o_mode"]
    if "passes" in doc:
        kwargs["pass_config"] = _pass_config(",".join(doc["passes"]))
    return EmocConfig(**kwargs)


def _weights(doc: dict) -> DistanceWeights:
    kwargs = {k: doc[k] for k in ("wE", "wM", "wO", "wC") if k in doc}
    return DistanceWeights(**kwargs)


def _pass_config(spec: str) -> PassConfig:
    names = [s for s in spec.split(",") if s]
    known = {"alpha", "dce", "inline", "commute"}
    bad = [s for s in names if s not in known]
    if bad:
        raise click.UsageError(f"unknown passes {bad}; choose from {sorted(known)}")
    return PassConfig(alpha="alpha" in names, dce="dce" in names,
                      inline="inline" in names, commute="commute" in names)


def _schedule(spec: str) -> SizeSchedule:
    """Parse '8x2^10' as SizeSchedule(s0=8, r=2, n=10)."""
    if not spec:
        return None
    m = re.fullmatch(r"(\d+)x([\d.]+)\^(\d+)", spec)
    if not m:
        raise click.UsageError(f"bad --sizes {spec!r}; expected s0xr^n, e.g. 8x2^10")
    return SizeSchedule(s0=int(m.group(1)), r=float(m.group(2)), n=int(m.group(3)))


def _budgets(max_steps, max_cells, max_depth) -> Budgets:
    kwargs = {}
    if max_steps:
        kwargs["max_steps"] = max_steps
    if max_cells:
        kwargs["max_cells"] = max_cells
    if max_depth:
        kwargs["max_call_depth"] = max_depth
    return Budgets(**kwargs)


def _load_program(path: str, entry: str, problem: str) -> Program:
    source = SourceUnit.from_path(path)
    if not entry:
        entry = problem if problem else parse(source).functions[0].name
    return Program.from_source(source, entry, id=Path(path).name)


def _manifest_path(spec: str):
    if spec in BUNDLED_GROUPS:
        return bundled_manifest_path(spec)
    return spec


def _read_vectors(path: str):
    text = Path(path).read_text()
    if path.endswith(".csv"):
        return vectors_from_csv(text)
    return vectors_from_json(text)


@click.group()
def cli():
    """EMOC: embed, compare, and cluster algorithm implementations."""


@cli.command("parse")
@click.argument("file")
@click.option("--out", default="", help="Write output here instead of stdout.")
@click.option("--disasm", is_flag=True, help="Show the lowered instructions.")
def cmd_parse(file, out, disasm):
    """Parse FILE and print its canonical rendering."""
    tree = parse(SourceUnit.from_path(file))
    if disasm:
        _emit(disassemble(lower(tree)), out)
    else:
        _emit(render(tree).text, out)


@cli.command("normalize")
@click.argument("file")
@click.option("--passes", default="alpha,dce,inline",
              help="Comma list from alpha,dce,inline,commute.")
@click.option("--out", default="")
def cmd_normalize(file, passes, out):
    """Normalize FILE and print its canonical rendering."""
    tree = parse(SourceUnit.from_path(file))
    _emit(render(normalize(tree, _pass_config(passes))).text, out)


@cli.command("run")
@click.argument("file")
@click.option("--entry", default="", help="Entry function (default: first).")
@click.option("--args", "args_json", default="[]", help="JSON argument list.")
@click.option("--max-steps", type=int, default=0)
@click.option("--max-cells", type=int, default=0)
@click.option("--max-depth", type=int, default=0)
@click.option("--out", default="")
def cmd_run(file, entry, args_json, max_steps, max_cells, max_depth, out):
    """Evaluate FILE on --args and print the evaluation report."""
    tree = parse(SourceUnit.from_path(file))
    if not entry:
        entry = tree.functions[0].name
    try:
        args = json.loads(args_json)
    except json.JSONDecodeError as exc:
        raise click.UsageError(f"--args is not valid JSON: {exc}")
    report = evaluate(lower(tree), entry, args,
                      _budgets(max_steps, max_cells, max_depth))
    _emit(json.dumps(report.to_json_dict(), indent=2), out)


@cli.command("probes")
@click.option("--problem", required=True,
              type=click.Choice(sorted(PROBLEMS)))
@click.option("--sizes", default="", help="Schedule as s0xr^n, e.g. 8x2^10.")
@click.option("--seed", type=int, default=0)
@click.option("--out", "-o", default="")
def cmd_probes(problem, sizes, seed, out):
    """Generate a probe suite and print it as JSON."""
    spec = PROBLEMS[problem]
    suite = build_probe_suite(spec, _schedule(sizes), seed)
    _emit(suite_to_json(suite), out)


@cli.command("equiv")
@click.argument("file_a")
@click.argument("file_b")
@click.option("--relation", required=True,
              type=click.Choice(["encoding", "ast", "instr", "functional"]))
@click.option("--mode", default="raw", type=click.Choice(["raw", "normalized"]))
@click.option("--problem", default="", type=click.Choice([""] + sorted(PROBLEMS)))
@click.option("--entry", default="", help="Entry function (default: problem name).")
@click.option("--sizes", default="")
@click.option("--seed", type=int, default=0)
@click.option("--out", default="")
@click.pass_context
def cmd_equiv(ctx, file_a, file_b, relation, mode, problem, entry, sizes, seed, out):
    """Decide an equivalence relation between two programs."""
    if relation == "encoding":
        verdict = encoding_equivalent(SourceUnit.from_path(file_a),
                                      SourceUnit.from_path(file_b))
    else:
        a = _load_program(file_a, entry, problem)
        b = _load_program(file_b, entry, problem)
        if relation == "ast":
            verdict = ast_equivalent(a, b, mode)
        elif relation == "instr":
            verdict = instruction_equivalent(a, b, mode)
        else:
            if not problem:
                raise click.UsageError("--problem is required for functional")
            spec = PROBLEMS[problem]
            suite = build_probe_suite(spec, _schedule(sizes), seed)
            verdict = functional_equivalent(a, b, suite)
    _emit(json.dumps(dataclasses.asdict(verdict), indent=2, default=str), out)
    if not verdict.equal:
        ctx.exit(EXIT_VERDICT)


@cli.command("embed")
@click.argument("file")
@click.option("--problem", required=True, type=click.Choice(sorted(PROBLEMS)))
@click.option("--entry", default="")
@click.option("--sizes", default="")
@click.option("--seed", type=int, default=0)
@click.option("--config", "config_path", default="")
@click.option("--max-steps", type=int, default=0)
@click.option("--out", default="", help="Destination; .csv selects CSV.")
def cmd_embed(file, problem, entry, sizes, seed, config_path, max_steps, out):
    """Embed one program over a generated probe suite."""
    doc = _load_config(config_path)
    spec = PROBLEMS[problem]
    suite = build_probe_suite(spec, _schedule(sizes), seed)
    prog = _load_program(file, entry, problem)
    vector = embed(prog, spec, suite, _emoc_config(doc),
                   _budgets(max_steps, 0, 0))
    if out.endswith(".csv"):
        _emit(vectors_to_csv([vector]), out)
    else:
        _emit(vectors_to_json([vector]), out)


@cli.command("embed-corpus")
@click.argument("manifest")
@click.option("--sizes", default="")
@click.option("--seed", type=int, default=0)
@click.option("--config", "config_path", default="")
@click.option("--max-steps", type=int, default=0)
@click.option("--out", default="", help="Destination; .json selects JSON.")
@click.pass_context
def cmd_embed_corpus(ctx, manifest, sizes, seed, config_path, max_steps, out):
    """Embed every program in MANIFEST (a path, or sorting/search/primes)."""
    doc = _load_config(config_path)
    man = load_manifest(_manifest_path(manifest))
    suite, vectors, errors = embed_corpus(
        man, _emoc_config(doc), _schedule(sizes), seed,
        _budgets(max_steps, 0, 0))
    for pid, message in errors:
        click.echo(f"error: {pid}: {message}", err=True)
    if out.endswith(".json"):
        _emit(vectors_to_json(vectors), out)
    else:
        _emit(vectors_to_csv(vectors), out)
    if errors:
        ctx.exit(EXIT_EVAL)


@cli.command("dist")
@click.argument("embeddings")
@click.argument("id_a")
@click.argument("id_b")
@click.option("--config", "config_path", default="")
@click.option("--out", default="")
def cmd_dist(embeddings, id_a, id_b, config_path, out):
    """Distance between two vectors of an embeddings file."""
    doc = _load_config(config_path)
    by_id = {v.program_id: v for v in _read_vectors(embeddings)}
    for pid in (id_a, id_b):
        if pid not in by_id:
            raise click.UsageError(f"unknown id {pid!r}")
    d = distance(by_id[id_a], by_id[id_b], _weights(doc))
    _emit(json.dumps({"a": id_a, "b": id_b, "distance": d}, indent=2), out)


@cli.command("cluster")
@click.argument("embeddings")
@click.option("--k", type=int, required=True)
@click.option("--seed", type=int, default=0)
@click.option("--restarts", type=int, default=32)
@click.option("--labels", "labels_path", default="",
              help="Manifest supplying algorithm labels.")
@click.option("--out", default="")
def cmd_cluster(embeddings, k, seed, restarts, labels_path, out):
    """K-means over an embeddings file."""
    vectors = _read_vectors(embeddings)
    labels = None
    if labels_path:
        man = load_manifest(_manifest_path(labels_path))
        labels = man.labels()
    elif all(v.label for v in vectors):
        labels = {v.program_id: v.label for v in vectors}
    result = analyze.kmeans_cluster(vectors, k, seed, restarts, labels=labels)
    _emit(json.dumps(dataclasses.asdict(result), indent=2), out)


@cli.command("knn")
@click.argument("embeddings")
@click.option("--query", required=True)
@click.option("--top", type=int, default=5)
@click.option("--config", "config_path", default="")
@click.option("--out", default="")
def cmd_knn(embeddings, query, top, config_path, out):
    """Nearest neighbors of --query inside an embeddings file."""
    doc = _load_config(config_path)
    vectors = _read_vectors(embeddings)
    try:
        ranked = analyze.nearest_neighbors(query, vectors, top,
                                           _weights(doc))
    except KeyError as exc:
        raise click.UsageError(str(exc))
    _emit(json.dumps([{"id": i, "distance": d} for i, d in ranked],
                     indent=2), out)


@cli.command("diversity")
@click.argument("embeddings")
@click.option("--out", default="")
def cmd_diversity(embeddings, out):
    """Diversity report over an embeddings file."""
    report = analyze.diversity_report(_read_vectors(embeddings))
    _emit(json.dumps(dataclasses.asdict(report), indent=2), out)


def main():
    try:
        code = cli.main(standalone_mode=False)
        if isinstance(code, int):
            sys.exit(code)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        sys.exit(EXIT_USAGE)
    except click.Abort:
        sys.exit(EXIT_USAGE)
    except MiniAlgSyntaxError as exc:
        click.echo(f"parse error: {exc}", err=True)
        sys.exit(EXIT_PARSE)
    except (EvaluationError, NonTerminationError) as exc:
        click.echo(f"evaluation error: {exc}", err=True)
        sys.exit(EXIT_EVAL)
    except EmocError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    except FileNotFoundError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)


if __name__ == "__main__":
    main()
