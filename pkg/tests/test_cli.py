import csv
import io
import json

import pytest

from skolem.cli import EXIT_INVALID, EXIT_OK, EXIT_TIMEOUT, EXIT_USAGE, main


def test_synth_then_verify(ex1_file, tmp_path, capsys):
    out = tmp_path / "ex1.aag"
    stats = tmp_path / "stats.json"
    assert main(["synth", str(ex1_file), "-o", str(out), "--stats", str(stats)]) == EXIT_OK
    assert main(["verify", str(ex1_file), str(out)]) == EXIT_OK
    assert capsys.readouterr().out.strip().endswith("valid")
    data = json.loads(stats.read_text())
    assert data["schema"] == 1 and data["status"].startswith("solved")


def test_synth_to_stdout(ex1_file, capsys):
    assert main(["synth", str(ex1_file)]) == EXIT_OK
    assert capsys.readouterr().out.startswith("aag ")


def test_verify_rejects_wrong_vector(ex1_file, tmp_path, capsys):
    out = tmp_path / "bad.aag"
    # all outputs constant 0 violates x1 or x2 or y1 at x = 00
    out.write_text("aag 2 2 0 4 0\n2\n4\n0\n0\n0\n0\n")
    assert main(["verify", str(ex1_file), str(out)]) == EXIT_INVALID
    assert capsys.readouterr().out.strip() == "invalid"


def test_verify_corrupted(ex1_file, tmp_path):
    out = tmp_path / "ex1.aag"
    main(["synth", str(ex1_file), "-o", str(out)])
    lines = out.read_text().splitlines()
    n_in, n_out = int(lines[0].split()[2]), int(lines[0].split()[4])
    lines[1 + n_in + n_out] = "junk"
    out.write_text("\n".join(lines) + "\n")
    assert main(["verify", str(ex1_file), str(out)]) == EXIT_INVALID
    out.write_text("aag 2 2 0 1 0\n2\n4\n0\n")
    assert main(["verify", str(ex1_file), str(out)]) == EXIT_INVALID


def test_usage_errors(ex1_file, tmp_path, capsys):
    assert main(["synth", str(ex1_file), "--frobnicate"]) == EXIT_USAGE
    assert "usage" in capsys.readouterr().err
    assert main([]) == EXIT_USAGE
    assert main(["synth", str(tmp_path / "missing.qdimacs")]) == EXIT_USAGE
    bad = tmp_path / "bad.qdimacs"
    bad.write_text("p cnf 1 1\n")
    assert main(["synth", str(bad)]) == EXIT_USAGE
    assert main(["synth", str(ex1_file), "--s", "0"]) == EXIT_USAGE


def test_timeout_exit(ex1_file):
    assert main(["synth", str(ex1_file), "--timeout", "1e-9"]) == EXIT_TIMEOUT


def test_trace_samples_trees(ex1_file, tmp_path):
    trace = tmp_path / "t.jsonl"
    samples = tmp_path / "s.csv"
    trees = tmp_path / "trees"
    argv = ["synth", str(ex1_file), "-o", str(tmp_path / "o.aag"), "--no-unates", "--lex", "off", "--min-samples", "50"]
    argv += ["--trace", str(trace), "--dump-samples", str(samples), "--dump-trees", str(trees)]
    assert main(argv) == EXIT_OK
    for line in trace.read_text().splitlines():
        assert "iteration" in json.loads(line)
    assert samples.read_text().splitlines()[0] == "x1,x2,y1,y2,y3,y4"
    assert sorted(p.name for p in trees.iterdir()) == ["tree_y1_y2.dot", "tree_y3.dot"]


def test_defx_report(ex1_file, capsys):
    assert main(["defx", "report", str(ex1_file)]) == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    status = {r["name"]: r["status"] for r in rows}
    assert status == {"y1": "undefined", "y2": "unate-pos", "y3": "undefined", "y4": "unique"}
    assert rows[3]["defining"] == "1"


@pytest.mark.parametrize("flags", [["--lex", "off"], ["--cluster", "random"], ["--k", "2", "--s", "8"]])
def test_ablation_flags(ex1_file, tmp_path, flags):
    out = tmp_path / "o.aag"
    assert main(["synth", str(ex1_file), "-o", str(out), "--no-unates", "--min-samples", "50", *flags]) == EXIT_OK
    assert main(["verify", str(ex1_file), str(out)]) == EXIT_OK
