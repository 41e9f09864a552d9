import json
import subprocess
import sys

import pytest

from mcids.cli import main
from mcids.signatures import ATTACK_IDS

SMALL_ARGS = ["--counts", *[f"{a}=1" for a in ATTACK_IDS], "--benign-count", "3", "--decoys-per-attack", "1",
              "--threads", "1"]


def _trace(path, events):
    path.write_text("".join(json.dumps(e) + "\n" for e in events))
    return path


def test_parse(capsys):
    assert main(["parse", "<>p", "--logic", "itl"]) == 0
    out = capsys.readouterr().out
    assert "core: true ; p" in out and "Chop(" in out


def test_parse_infers_logic(capsys):
    assert main(["parse", "p ;[x<1] q"]) == 0
    assert "logic: RASL" in capsys.readouterr().out


def test_parse_errors(capsys):
    assert main(["parse", "a & & b"]) == 1
    assert "position 4" in capsys.readouterr().err
    assert main(["parse", "a ; b", "--logic", "ltl"]) == 1


def test_check_pod(tmp_path, capsys):
    t = _trace(tmp_path / "t.jsonl", [{"t": 0, "props": ["x"]}, {"t": 1, "attrs": {"m.size": 70000}}])
    assert main(["check", "--attack", "pod", "--logic", "prop", "--trace", str(t)]) == 0
    assert "detected, witness event 1" in capsys.readouterr().out


def test_check_formula_and_signature_file(tmp_path, capsys):
    t = _trace(tmp_path / "t.jsonl", [{"t": 0, "props": ["a"]}, {"t": 1, "props": ["b"]}])
    assert main(["check", "--formula", "a ; b", "--logic", "itl", "--trace", str(t)]) == 0
    assert "witness interval [0, 1]" in capsys.readouterr().out
    sig = tmp_path / "x.sig"
    sig.write_text("attack: custom\nlogic: LTL\nthresholds:\nb & X b\n")
    assert main(["check", "--formula-file", str(sig), "--logic", "ltl", "--trace", str(t)]) == 0
    assert "not detected" in capsys.readouterr().out


def test_check_failures(tmp_path):
    t = _trace(tmp_path / "t.jsonl", [{"t": 0}])
    assert main(["check", "--attack", "nmap", "--logic", "prop", "--trace", str(t)]) == 1
    assert main(["check", "--attack", "pod", "--logic", "prop", "--trace", str(tmp_path / "none")]) == 1
    assert main(["check", "--attack", "pod", "--logic", "nonsense", "--trace", str(t)]) == 2


def test_usage_errors(capsys):
    assert main(["bench"]) == 2
    assert "usage" in capsys.readouterr().err
    assert main([]) == 2
    assert main(["generate", "--out", "x", "--counts", "nope=3"]) == 2


def _tree(path):
    return {p.relative_to(path): p.read_bytes() for p in sorted(path.rglob("*")) if p.is_file()}


def test_generate_twice_identical(tmp_path):
    assert main(["generate", "--seed", "42", "--out", str(tmp_path / "a"), *SMALL_ARGS]) == 0
    assert main(["generate", "--seed", "42", "--out", str(tmp_path / "b"), *SMALL_ARGS]) == 0
    assert _tree(tmp_path / "a") == _tree(tmp_path / "b")


def test_bench_partial_logics(tmp_path, capsys):
    assert main(["generate", "--out", str(tmp_path / "c"), *SMALL_ARGS]) == 0
    out_csv = tmp_path / "r.csv"
    rc = main(["bench", "--corpus", str(tmp_path / "c"), "--out", str(out_csv), "--logics", "prop,ltl",
               "--threads", "1"])
    assert rc == 0
    assert out_csv.read_text().startswith("key,logic,")
    assert "comparison skipped" in capsys.readouterr().out


def test_bench_missing_corpus(tmp_path):
    assert main(["bench", "--corpus", str(tmp_path / "none")]) == 1


def test_export(tmp_path, capsys):
    assert main(["export-signatures", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "mailbomb.rasl.sig").is_file()
    assert (tmp_path / "mailbomb.itl.sig").is_file()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "mcids", "parse", "p & q"], capture_output=True, text=True)
    assert proc.returncode == 0 and "core:" in proc.stdout
