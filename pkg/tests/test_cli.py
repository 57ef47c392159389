import shutil
import subprocess
import sys

import pytest

from lsym import cli
from lsym import ds_eval as D
from lsym.corpus import corpus_dir

C = corpus_dir()


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def copy_entry(tmp_path, name):
    dst = tmp_path / name
    shutil.copytree(C / name, dst)
    return dst


def test_millionaires_prints_both_parties(capsys):
    code, out, _ = run(capsys, "run", "--manifest", C / "millionaires" / "manifest")
    assert code == 0 and out == "A: 1\nB: 1\n"


def test_stuck_program_exit_and_diagnostic(capsys):
    code, out, err = run(capsys, "run", "--manifest", C / "stuck-assign" / "manifest")
    assert code == 1 and out == ""
    assert "ST-ASSIGN" in err and "creators" in err
    code, _, err = run(capsys, "run", "--manifest", C / "stuck-assign" / "manifest", "--mode", "st")
    assert code == 1 and err.startswith("stuck") and "ST-ASSIGN" in err


def test_gcd_manifest(capsys):
    code, out, _ = run(capsys, "run", "--manifest", C / "gcd" / "manifest")
    assert code == 0 and out == "A: 6\nB: 6\n"
    code, out, _ = run(capsys, "run", "--manifest", C / "gcd" / "manifest", "--mode", "st")
    assert out == "6@{A,B}\n"


def test_program_with_inline_inputs(capsys):
    code, out, _ = run(capsys, "run", C / "millionaires" / "program.lsym",
                       "--input", "A=3", "--input", "B=8", "--schedule", "random", "--seed", "4")
    assert code == 0 and out == "A: 0\nB: 0\n"


def test_concrete_mode_agrees(capsys):
    _, a, _ = run(capsys, "run", "--manifest", C / "reshare" / "manifest")
    _, c, _ = run(capsys, "run", "--manifest", C / "reshare" / "manifest", "--mode", "ds-concrete")
    assert a == c == "A: 14\nB: 14\nC: 14\n"


def test_output_sinks(tmp_path, capsys):
    d = copy_entry(tmp_path, "mux-case")
    code, out, _ = run(capsys, "run", "--manifest", d / "manifest")
    assert code == 0
    assert (d / "a.out").read_text() == "7\n"
    assert (d / "b.out").read_text() == "14\n"


def test_manifest_errors_are_listed_together(tmp_path, capsys):
    m = tmp_path / "manifest"
    m.write_text("mode = fast\nfuel = 0\ncolour = red\n[party A]\ninputs = x\n")
    code, _, err = run(capsys, "run", "--manifest", m)
    assert code == 3
    lines = err.strip().splitlines()
    assert len(lines) == 5
    assert any("program" in l for l in lines) and any("fuel" in l for l in lines)


def test_undeclared_party_in_manifest(tmp_path, capsys):
    d = copy_entry(tmp_path, "millionaires")
    (d / "manifest").write_text((d / "manifest").read_text() + "\n[party Z]\ninputs = 1\n")
    code, _, err = run(capsys, "run", "--manifest", d / "manifest")
    assert code == 3 and "Z" in err


def test_usage_errors(capsys, tmp_path):
    assert run(capsys, "run")[0] == 3
    assert run(capsys, "run", "--nonsense")[0] == 3
    assert run(capsys, "run", tmp_path / "missing.lsym")[0] == 3
    bad = tmp_path / "bad.lsym"
    bad.write_text("principal A\ndef main () = let x = in 3")
    code, _, err = run(capsys, "run", bad)
    assert code == 3 and "2:23" in err


def test_trace_is_reproducible(capsys):
    args = ("trace", "--manifest", C / "delegation" / "manifest", "--schedule", "random")
    _, one, _ = run(capsys, *args, "--seed", 3)
    _, two, _ = run(capsys, *args, "--seed", 3)
    _, other, _ = run(capsys, *args, "--seed", 4)
    assert one == two
    assert one != other
    # same final values whatever the interleaving
    assert one.splitlines()[-6:] == other.splitlines()[-6:]


def test_trace_with_one_step_of_fuel(capsys):
    code, out, err = run(capsys, "trace", "--manifest", C / "millionaires" / "manifest", "--fuel", 1)
    assert code == 2 and len(out.splitlines()) == 1 and "out of fuel" in err


def test_scripted_schedule(tmp_path, capsys):
    s = tmp_path / "sched"
    s.write_text("B B B  # B first\n")
    code, out, _ = run(capsys, "trace", "--manifest", C / "millionaires" / "manifest",
                       "--schedule", f"scripted:{s}")
    assert code == 0
    assert [l.split()[1] for l in out.splitlines()[:3]] == ["B", "B", "B"]
    s.write_text("Z\n")
    code, _, err = run(capsys, "run", "--manifest", C / "millionaires" / "manifest",
                       "--schedule", f"scripted:{s}")
    assert code == 2 and "Z" in err


def test_check_subcommand(tmp_path, capsys):
    summary = tmp_path / "summary.txt"
    code, out, _ = run(capsys, "check", "--seeds", 2, "--generated", 5, "--no-diamond",
                       "--summary", summary)
    assert code == 0
    lines = summary.read_text().splitlines()
    assert "fail=0" in lines and "inconclusive=0" in lines
    assert "PASS" in out


def test_check_with_no_seeds(capsys):
    code, out, _ = run(capsys, "check", "--seeds", 0, "--generated", 3, "--quiet")
    assert code == 0
    assert "pass=0" in out and "fail=0" in out


def test_check_fails_on_a_broken_evaluator(monkeypatch, capsys):
    from test_harness import _broken_local_step
    monkeypatch.setattr(D, "local_step", _broken_local_step(D.local_step))
    code, _, err = run(capsys, "check", "--seeds", 2, "--generated", 0, "--no-diamond", "--quiet")
    assert code == 1 and "FAIL" in err


def test_corpus_subcommand(capsys):
    code, out, _ = run(capsys, "corpus")
    assert code == 0 and "millionaires" in out
    code, out, _ = run(capsys, "corpus", "--verify", "gcd", "stuck-assign")
    assert code == 0 and out.split() == ["gcd", "ok", "stuck-assign", "ok"]
    assert run(capsys, "corpus", "nosuch")[0] == 3


def test_pretty_subcommand(capsys):
    code, out, _ = run(capsys, "pretty", C / "millionaires" / "program.lsym")
    assert code == 0 and out.startswith("principal A B")


def test_console_script_entry_point():
    r = subprocess.run([sys.executable, "-m", "lsym.cli", "run", "--manifest",
                        str(C / "millionaires" / "manifest")], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout == "A: 1\nB: 1\n"
