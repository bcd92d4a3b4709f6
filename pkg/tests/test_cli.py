import json
import subprocess
import sys

import pytest

from fullerene_wiener.cli import main, parse_range
from fullerene_wiener.codec import read_planar_code, write_planar_code
from fullerene_wiener.survey import survey_row


def run(*args, stdin=None):
    return subprocess.run([sys.executable, "-m", "fullerene_wiener", *args], input=stdin,
                          capture_output=True)


def test_parse_range():
    assert parse_range("20..30") == [20, 24, 26, 28, 30]
    assert parse_range("61..64") == [62, 64]
    assert parse_range("40") == [40]


def test_generate_n20():
    proc = run("generate", "--n", "20")
    assert proc.returncode == 0
    assert len(list(read_planar_code(proc.stdout))) == 1


def test_generate_n22_exit_2():
    proc = run("generate", "--n", "22")
    assert proc.returncode == 2
    assert b"n >= 24" in proc.stderr and b"n = 20" in proc.stderr


def test_generate_ipr_60():
    proc = run("generate", "--n", "60", "--ipr")
    assert proc.returncode == 0
    assert len(list(read_planar_code(proc.stdout))) == 1


def test_generate_spiral_text_and_partitions(capsys):
    assert main(["generate", "--n", "30", "--format", "spiral"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 3 and all(l.startswith("30: ") for l in lines)
    assert main(["generate", "--n", "30", "--list-partitions", "--partition-depth", "3"]) == 0
    prefixes = capsys.readouterr().out.split()
    parts = []
    for p in prefixes:
        assert main(["generate", "--n", "30", "--format", "spiral", "--prefix", p]) == 0
        parts += capsys.readouterr().out.splitlines()
    assert parts == lines


def test_analyze_dodecahedron(tmp_path, dodecahedron, capsys):
    path = tmp_path / "c20.pc"
    path.write_bytes(write_planar_code([dodecahedron]))
    assert main(["analyze", str(path)]) == 0
    (line,) = capsys.readouterr().out.splitlines()
    rec = json.loads(line)
    assert rec["W"] == 500 and rec["WW"] == "1020"
    assert set(rec["complexity"].values()) == {1}
    assert not any(rec["irregular"].values())
    assert rec["ipr"] is False


def test_analyze_stdin_and_spiral_text(c60):
    proc = run("analyze", "-", stdin=write_planar_code([c60]))
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["W"] == 8340
    proc = run("analyze", "-", "--pairs", "1,1", stdin=b"60: 1 7 9 11 13 15 18 20 22 24 26 32\n")
    rec = json.loads(proc.stdout)
    assert rec["ipr"] is True and rec["complexity"] == {"1,1": 1}


def test_analyze_corrupt_exit_3(tmp_path, dodecahedron):
    data = write_planar_code([dodecahedron, dodecahedron])
    path = tmp_path / "bad.pc"
    path.write_bytes(data[:-7])
    proc = run("analyze", str(path))
    assert proc.returncode == 3
    assert b"record 1" in proc.stderr


@pytest.mark.slow
def test_analyze_irregular_62(tmp_path):
    row = survey_row(62, pairs=[(3, 3)])
    assert row.irregular((3, 3))
    (spiral,) = row.stats[(3, 3)].representatives
    path = tmp_path / "irr.txt"
    path.write_text(str(spiral) + "\n")
    proc = run("analyze", str(path), "--pairs", "3,3")
    assert json.loads(proc.stdout)["irregular"] == {"3,3": True}


def test_survey_and_verify(tmp_path):
    out = tmp_path / "results.jsonl"
    proc = run("survey", "--n", "20..30", "--workers", "1", "--out", str(out))
    assert proc.returncode == 0
    lines = [json.loads(l) for l in proc.stdout.splitlines()]
    assert [l["n"] for l in lines] == [20, 24, 26, 28, 30]
    assert lines[-1]["C_max"] == [7, 8, 8, 8, 8, 8]

    proc = run("verify", str(out), "--fixtures", "tests/fixtures/table1_all.json")
    assert proc.returncode == 0, proc.stdout
    assert b"MATCH" in proc.stdout and b"OUT_OF_RANGE" in proc.stdout

    tampered = tmp_path / "fixture.json"
    fixture = json.loads(open("tests/fixtures/table1_all.json").read())
    fixture["rows"]["28"][0] = [6, 1]
    tampered.write_text(json.dumps(fixture))
    proc = run("verify", str(out), "--fixtures", str(tampered))
    assert proc.returncode == 4
    assert b"n=28" in proc.stdout


def test_survey_checkpoint_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("FULLERENE_WIENER_CHECKPOINT_DIR", str(tmp_path / "cp"))
    out = tmp_path / "r.jsonl"
    assert main(["survey", "--n", "24..28", "--workers", "1", "--out", str(out), "--pretty"]) == 0
    assert (tmp_path / "cp" / "survey-all-24-28.json").exists()
    assert "28" in capsys.readouterr().out


def test_survey_unsupported(tmp_path):
    assert main(["survey", "--n", "21", "--out", str(tmp_path / "x")]) == 2


def test_verify_missing_file(tmp_path):
    assert main(["verify", str(tmp_path / "nope.jsonl")]) == 3


def test_resumed_survey_file_identical(tmp_path):
    from fullerene_wiener.metrics import DEFAULT_PAIRS
    from fullerene_wiener.spiral import iter_spirals, partition_prefixes
    from fullerene_wiener.survey import Checkpoint, partition_key, scan_spirals

    clean = tmp_path / "clean.jsonl"
    assert main(["survey", "--n", "40..44", "--workers", "1", "--no-timing", "--out", str(clean)]) == 0

    # interrupted run: n=40 written, half of n=44's partitions checkpointed
    cp_path = tmp_path / "cp.json"
    resumed = tmp_path / "resumed.jsonl"
    assert main(["survey", "--n", "40", "--workers", "1", "--no-timing", "--out", str(resumed),
                 "--checkpoint", str(cp_path)]) == 0
    cp = Checkpoint(cp_path, DEFAULT_PAIRS, 10)
    prefixes = partition_prefixes(44)
    for p in prefixes[: len(prefixes) // 2]:
        cp.record(partition_key(44, False, p), scan_spirals(iter_spirals(44, prefixes=[p])))
    assert main(["survey", "--n", "40..44", "--workers", "1", "--no-timing", "--out", str(resumed),
                 "--checkpoint", str(cp_path)]) == 0
    assert resumed.read_bytes() == clean.read_bytes()
