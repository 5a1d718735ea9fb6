"""Command-line behavior: exit codes, output formats, and round trips."""

from __future__ import annotations

import json
import subprocess
import sys

import pytest

from factlog.cli import EXIT_ANALYSIS, EXIT_INPUT, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture()
def example_go(samples_dir):
    return str(samples_dir / "example.go")


@pytest.fixture()
def arith_sample(samples_dir):
    return str(samples_dir / "liveness.arith")


class TestFacts:
    def test_dl_output(self, capsys, tmp_path, example_go):
        code, out, err = run(
            capsys, "facts", example_go, "--preset", "callgraph-go",
            "--format", "dl", "--out", str(tmp_path),
        )
        assert code == EXIT_OK
        text = (tmp_path / "facts.dl").read_text(encoding="utf-8")
        assert text == (
            'edge("incr", "one").\n'
            'edge("main", "fmt.Printf").\n'
            'edge("main", "incr").\n'
            'edge("main", "one").\n'
        )
        assert "files=1" in out and "facts=4" in out and "functions=3" in out

    def test_tsv_output(self, capsys, tmp_path, arith_sample):
        code, out, _ = run(
            capsys, "facts", arith_sample, "--preset", "liveness-arith",
            "--format", "tsv", "--out", str(tmp_path),
        )
        assert code == EXIT_OK
        names = sorted(p.name for p in tmp_path.glob("*.facts"))
        assert names == ["next.facts", "read.facts", "write.facts"]
        assert (tmp_path / "next.facts").read_text(encoding="utf-8") == (
            "1\t2\n2\t3\n3\t4\n"
        )

    def test_missing_input_is_input_error(self, capsys, tmp_path):
        code, _, err = run(
            capsys, "facts", str(tmp_path / "nope.go"), "--preset", "callgraph-go",
            "--out", str(tmp_path),
        )
        assert code == EXIT_INPUT
        assert "factlog:" in err

    def test_preset_and_spec_conflict(self, capsys, tmp_path, example_go):
        code, _, err = run(
            capsys, "facts", example_go, "--preset", "callgraph-go",
            "--spec", "x.spec", "--out", str(tmp_path),
        )
        assert code == EXIT_USAGE
        assert "mutually exclusive" in err

    def test_spec_requires_lang(self, capsys, tmp_path, example_go):
        code, _, err = run(
            capsys, "facts", example_go, "--spec", "x.spec", "--out", str(tmp_path)
        )
        assert code == EXIT_USAGE


class TestSolve:
    def test_writes_idb_and_counts(self, capsys, tmp_path, example_go):
        code, out, _ = run(
            capsys, "solve", example_go, "--preset", "callgraph-go",
            "--format", "dl", "--out", str(tmp_path),
        )
        assert code == EXIT_OK
        assert "calls: 4 tuples" in out
        text = (tmp_path / "idb.dl").read_text(encoding="utf-8")
        assert 'calls("main", "one").' in text
        assert "edge(" not in text  # idb only

    def test_solve_from_facts_file(self, capsys, tmp_path):
        facts = tmp_path / "in.dl"
        facts.write_text('edge("a", "b").\nedge("b", "c").\n', encoding="utf-8")
        program = tmp_path / "tc.dl"
        program.write_text(
            "calls(X, Y) :- edge(X, Y).\ncalls(X, Y) :- edge(X, K), calls(K, Y).\n",
            encoding="utf-8",
        )
        code, out, _ = run(
            capsys, "solve", str(facts), "--lang", "go",
            "--program", str(program), "--format", "dl", "--out", str(tmp_path),
        )
        assert code == EXIT_OK
        assert "calls: 3 tuples" in out

    def test_solve_from_tsv_dir_with_types(self, capsys, tmp_path):
        (tmp_path / "edb").mkdir()
        (tmp_path / "edb" / "next.facts").write_text("1\t2\n", encoding="utf-8")
        program = tmp_path / "p.dl"
        program.write_text(
            ".decl next(i:number, j:number)\nfollows(J, I) :- next(I, J).\n",
            encoding="utf-8",
        )
        code, out, _ = run(
            capsys, "solve", str(tmp_path / "edb"), "--lang", "arith",
            "--program", str(program), "--format", "dl",
            "--out", str(tmp_path / "out"),
        )
        assert code == EXIT_OK
        text = (tmp_path / "out" / "idb.dl").read_text(encoding="utf-8")
        assert "follows(2, 1)." in text

    def test_needs_program(self, capsys, tmp_path, example_go):
        spec = tmp_path / "s.spec"
        spec.write_text('[match]\nf($x)\n\n[rewrite]\nseen("$x").\n', encoding="utf-8")
        code, _, err = run(
            capsys, "solve", example_go, "--lang", "go", "--spec", str(spec),
            "--out", str(tmp_path),
        )
        assert code == EXIT_USAGE
        assert "program" in err

    def test_unstratifiable_is_analysis_error(self, capsys, tmp_path):
        facts = tmp_path / "in.dl"
        facts.write_text('q("a").\n', encoding="utf-8")
        program = tmp_path / "bad.dl"
        program.write_text("p(X) :- q(X), !p(X).\n", encoding="utf-8")
        code, _, err = run(
            capsys, "solve", str(facts), "--lang", "go",
            "--program", str(program), "--out", str(tmp_path),
        )
        assert code == EXIT_ANALYSIS
        assert "depends negatively" in err


class TestQuery:
    def test_variable_query_rows(self, capsys, example_go):
        code, out, _ = run(
            capsys, "query", example_go, "--preset", "callgraph-go",
            "-q", 'calls("main", X)',
        )
        assert code == EXIT_OK
        assert out.splitlines() == ["fmt.Printf", "incr", "one"]

    def test_ground_query_prints_boolean(self, capsys, example_go):
        code, out, _ = run(
            capsys, "query", example_go, "--preset", "callgraph-go",
            "-q", 'calls("main", "one")',
        )
        assert (code, out.strip()) == (EXIT_OK, "true")
        code, out, _ = run(
            capsys, "query", example_go, "--preset", "callgraph-go",
            "-q", 'calls("one", "main")',
        )
        assert (code, out.strip()) == (EXIT_OK, "false")

    def test_liveness_spot_checks(self, capsys, arith_sample):
        code, out, _ = run(
            capsys, "query", arith_sample, "--preset", "liveness-arith",
            "-q", 'live("b", L)',
        )
        assert out.split() == ["1", "3", "4"]
        code, out, _ = run(
            capsys, "query", arith_sample, "--preset", "liveness-arith",
            "-q", "live(X, 2)",
        )
        assert out.split() == ["a", "c", "d"]

    def test_malformed_query_is_analysis_error(self, capsys, example_go):
        code, _, err = run(
            capsys, "query", example_go, "--preset", "callgraph-go", "-q", "calls(",
        )
        assert code == EXIT_ANALYSIS


class TestGraph:
    def test_dot_to_stdout(self, capsys, example_go):
        code, out, _ = run(capsys, "graph", example_go, "--preset", "callgraph-go")
        assert code == EXIT_OK
        assert out.startswith("digraph edge {")
        assert '  "incr" -> "one";' in out
        lines = [l for l in out.splitlines() if "->" in l]
        assert lines == sorted(lines)

    def test_closure_uses_primary_output(self, capsys, example_go):
        code, out, _ = run(
            capsys, "graph", example_go, "--preset", "callgraph-go", "--closure",
        )
        assert code == EXIT_OK
        assert out.startswith("digraph calls {")

    def test_relation_override_and_out_file(self, capsys, tmp_path, arith_sample):
        out_file = tmp_path / "g" / "next.dot"
        code, out, _ = run(
            capsys, "graph", arith_sample, "--preset", "liveness-arith",
            "--relation", "next", "--out", str(out_file),
        )
        assert code == EXIT_OK
        text = out_file.read_text(encoding="utf-8")
        assert '"1" -> "2";' in text

    def test_non_binary_relation_rejected(self, capsys, tmp_path):
        facts = tmp_path / "in.dl"
        facts.write_text('t("a", "b", "c").\n', encoding="utf-8")
        code, _, err = run(
            capsys, "graph", str(facts), "--lang", "go", "--relation", "t",
        )
        assert code == EXIT_INPUT
        assert "binary" in err

    def test_unknown_relation_rejected(self, capsys, example_go):
        code, _, err = run(
            capsys, "graph", example_go, "--preset", "callgraph-go",
            "--relation", "nope",
        )
        assert code == EXIT_ANALYSIS


class TestMatch:
    def test_jsonl_records(self, capsys, example_go):
        code, out, _ = run(
            capsys, "match", example_go, "--lang", "go", "-t", "func $f(",
        )
        assert code == EXIT_OK
        records = [json.loads(line) for line in out.splitlines()]
        assert [r["holes"]["f"]["text"] for r in records] == ["one", "incr", "main"]
        assert all(r["path"].endswith("example.go") for r in records)

    def test_template_and_spec_conflict(self, capsys, example_go):
        code, _, err = run(
            capsys, "match", example_go, "--lang", "go", "-t", "x", "--spec", "y",
        )
        assert code == EXIT_USAGE


class TestBench:
    def test_table(self, capsys, samples_dir):
        code, out, _ = run(
            capsys, "bench", str(samples_dir / "go"), "--preset", "callgraph-go",
        )
        assert code == EXIT_OK
        header, row = out.splitlines()[:2]
        assert header.split() == [
            "corpus", "files", "kloc", "facts", "funcs", "time_s", "facts/func",
        ]
        assert row.split()[1] == "1"  # one file in samples/go

    def test_json_lines(self, capsys, samples_dir, example_go):
        code, out, _ = run(
            capsys, "bench", example_go, str(samples_dir / "go"),
            "--preset", "callgraph-go", "--json",
        )
        assert code == EXIT_OK
        rows = [json.loads(line) for line in out.splitlines()]
        assert len(rows) == 2
        assert rows[0]["fact_count"] == 4 and rows[0]["function_count"] == 3
        assert rows[1]["function_count"] > 0


class TestDeterminism:
    def test_facts_byte_identical_across_jobs(self, tmp_path, samples_dir, capsys):
        outputs = []
        for jobs in ("1", "3", "1"):
            out_dir = tmp_path / f"run-{len(outputs)}"
            code, _, _ = run(
                capsys, "facts", str(samples_dir), "--preset", "callgraph-go",
                "--format", "dl", "--out", str(out_dir), "--jobs", jobs,
            )
            assert code == EXIT_OK
            outputs.append((out_dir / "facts.dl").read_bytes())
        assert outputs[0] == outputs[1] == outputs[2]


class TestEntryPoint:
    def test_console_script(self):
        proc = subprocess.run(
            ["factlog", "--help"], capture_output=True, text=True, check=False
        )
        assert proc.returncode == 0
        assert "facts" in proc.stdout and "solve" in proc.stdout

    def test_module_invocation(self):
        proc = subprocess.run(
            [sys.executable, "-m", "factlog", "--help"],
            capture_output=True, text=True, check=False,
        )
        assert proc.returncode == 0


class TestLangdef:
    def test_custom_language_flows_through(self, capsys, tmp_path):
        langdef = tmp_path / "toy.lang"
        langdef.write_text(
            "[toy2]\nline_comments = #\nstrings = \" \" \\\n", encoding="utf-8"
        )
        src = tmp_path / "prog.toy"
        src.write_text("call(alpha)\n# call(skipped)\n", encoding="utf-8")
        code, out, _ = run(
            capsys, "match", str(src), "--lang", "toy2", "-t", "call($x)",
            "--langdef", str(langdef),
        )
        assert code == EXIT_OK
        records = [json.loads(line) for line in out.splitlines()]
        assert [r["holes"]["x"]["text"] for r in records] == ["alpha"]
