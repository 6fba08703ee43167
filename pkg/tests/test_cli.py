import json
import shutil
import subprocess
import sys

import pytest

from bcm.cli import main, parse_matrix
from bcm.instance import parse_instance
from bcm.oracle import RunReport

MATRIX_15 = "greedy,alg3,alg4(0),alg4(1/2),half"


def run(capsys, *argv):
    code = main(list(map(str, argv)))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def three(tmp_path, corpus_dir):
    d = tmp_path / "three"
    d.mkdir()
    for name in ("c4gap.bcm", "greedy-adversary.bcm", "budget-path-4.bcm"):
        shutil.copy(corpus_dir / name, d / name)
    return d


def test_solve_audit_json(capsys, corpus_dir):
    code, out, _ = run(capsys, "solve", "--algorithm", "lambda", "--lambda", "1/2",
                       "--input", corpus_dir / "c4gap.bcm", "--audit")
    assert code == 0
    d = json.loads(out)
    assert d["ratio_to_lp0"] == "1" and d["violation"] == [1, 0]
    assert d["ok"] is True and "structure" in d
    RunReport.from_dict({k: v for k, v in d.items() if k not in ("structure", "formulation")})


def test_solve_text(capsys, corpus_dir):
    code, out, _ = run(capsys, "solve", "-a", "half", "-i", corpus_dir / "c4gap.bcm")
    assert code == 0
    assert "edges 0" in out.splitlines()


def test_solve_trace_and_dump(capsys, corpus_dir, tmp_path):
    tr, lp = tmp_path / "t.jsonl", tmp_path / "m.lp"
    code, _, _ = run(capsys, "solve", "-a", "relax", "-i", corpus_dir / "c4gap.bcm",
                     "--trace", tr, "--dump-lp", lp)
    assert code == 0
    recs = [json.loads(line) for line in tr.read_text().splitlines()]
    assert recs[0]["iteration"] == 0 and recs[-1]["action"] == "finish"
    assert lp.read_text().startswith("\\") or "Maximize" in lp.read_text()


@pytest.mark.parametrize("argv, fragment", [
    (["solve", "-a", "lambda", "--lambda", "3/2"], "lambda"),
    (["solve", "-a", "alpha", "--alpha", "2"], "alpha"),
    (["solve", "-a", "nope"], "unknown algorithm"),
])
def test_usage_errors(capsys, corpus_dir, argv, fragment):
    code, out, err = run(capsys, *argv, "-i", corpus_dir / "c4gap.bcm")
    assert code == 2 and fragment in err and out == ""


def test_missing_file_is_usage_error(capsys, tmp_path):
    code, _, err = run(capsys, "solve", "-i", tmp_path / "absent.bcm")
    assert code == 2 and err.startswith("bcm:")


def test_generate_gap_cycle(capsys, corpus_dir):
    code, out, _ = run(capsys, "generate", "--family", "gap-cycle", "--n", 4, "--seed", 7)
    assert code == 0
    assert out == (corpus_dir / "c4gap.bcm").read_text()


def test_generate_random_json(capsys):
    code, out, _ = run(capsys, "generate", "--family", "random-general", "--n", 7, "--m", 9,
                       "--k", 3, "--seed", 2, "--profit-range", "1:4", "--format", "json")
    assert code == 0 and json.loads(out)["n"] == 7


def test_verify_exit_codes(capsys, corpus_dir):
    c4 = corpus_dir / "c4gap.bcm"
    assert run(capsys, "verify", "-i", c4, "-M", "0,2")[0] == 0
    assert run(capsys, "verify", "-i", c4, "-M", "0,2", "--strict")[0] == 1
    assert run(capsys, "verify", "-i", c4, "-M", "0,1")[0] == 1
    assert run(capsys, "verify", "-i", c4, "-M", "9")[0] == 2


def test_verify_reads_solve_json(capsys, corpus_dir, tmp_path):
    c4 = corpus_dir / "c4gap.bcm"
    out = tmp_path / "m.json"
    assert run(capsys, "solve", "-a", "half", "-i", c4, "--format", "json", "-o", out)[0] == 0
    code, text, _ = run(capsys, "verify", "-i", c4, "-M", out, "--strict", "--format", "json")
    assert code == 0 and json.loads(text)["is_matching"] is True


def test_oracle_command(capsys, corpus_dir):
    code, out, _ = run(capsys, "oracle", "-i", corpus_dir / "greedy-adversary.bcm",
                       "--extendibility", 20, "--format", "json")
    assert code == 0
    d = json.loads(out)
    assert d["opt"] == "3" and d["extendibility"]["counterexamples"] == []


def test_parse_matrix_forms():
    assert parse_matrix(MATRIX_15) == parse_matrix("greedy,relax,lambda=0,lambda=1/2,half")
    assert parse_matrix("alpha=4")[0][1] == 4


def test_bench_single_edge_all_algorithms(capsys, tmp_path, corpus_dir):
    d = tmp_path / "one"
    d.mkdir()
    shutil.copy(corpus_dir / "single-edge.bcm", d)
    code, out, _ = run(capsys, "bench", "--corpus", d)
    rows = [line.split(",") for line in out.splitlines()[1:-1]]
    assert len(rows) == 5
    assert [r[7] for r in rows] == ["ok"] * 5, out
    assert out.splitlines()[-1] == "# summary: 5/5 ok"
    assert code == 0


def test_bench_fifteen_rows(capsys, three, tmp_path):
    csv_path = tmp_path / "results.csv"
    code, out, err = run(capsys, "bench", "--corpus", three, "--matrix", MATRIX_15, "--out", csv_path)
    lines = csv_path.read_text().splitlines()
    assert len(lines) == 17
    assert lines[-1] == "# summary: 15/15 ok"
    assert code == 0 and err == ""


def test_bench_corrupted_file(capsys, three, tmp_path):
    (three / "broken.bcm").write_text("bcm 2 1 1\nbounds 1\nedge 0 0 0 1\n")
    code, out, err = run(capsys, "bench", "--corpus", three, "--matrix", "half")
    rows = [line.split(",") for line in out.splitlines()[1:-1]]
    broken = [r for r in rows if r[0] == "broken.bcm"]
    assert len(broken) == 1 and broken[0][7] == "ERROR"
    assert sum(r[7] == "ok" for r in rows) == 3
    assert code == 1 and "broken.bcm" in err


def test_bench_bad_matrix(capsys, three):
    code, _, err = run(capsys, "bench", "--corpus", three, "--matrix", "alg9")
    assert code == 2 and "bad matrix entry" in err


def test_bench_json_reports_self_check(capsys, three, tmp_path):
    js = tmp_path / "r.json"
    run(capsys, "bench", "--corpus", three, "--matrix", MATRIX_15, "--json", js)
    for d in json.loads(js.read_text()):
        RunReport.from_dict(d)


def test_bench_determinism_across_jobs(three, tmp_path):
    outs = []
    for jobs in (1, 1, 3):
        p = tmp_path / f"r{len(outs)}.csv"
        j = tmp_path / f"r{len(outs)}.json"
        subprocess.run([sys.executable, "-m", "bcm", "bench", "--corpus", str(three),
                        "--matrix", MATRIX_15, "--jobs", str(jobs), "--out", str(p),
                        "--json", str(j)], check=False, capture_output=True)
        outs.append((p.read_bytes(), j.read_bytes()))
    assert outs[0] == outs[1] == outs[2]


def test_generated_instance_parses(capsys):
    code, out, _ = run(capsys, "generate", "--family", "budget-path", "--n", 4)
    assert code == 0 and parse_instance(out).m == 7
