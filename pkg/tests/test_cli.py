import random
import subprocess
import sys

import pytest

from posslearn.cli import EXIT_NONE, run_cli
from posslearn.data import read_dataset
from posslearn.mapinf import random_weighted_theory
from posslearn.possibilistic import PossTheory

from conftest import PENGUIN_DATA, XY_DATA

T2STAR = "0.5\tflies\n1\t!penguin | !flies\n"


@pytest.fixture
def files(tmp_path):
    (tmp_path / "penguin.txt").write_text(PENGUIN_DATA)
    (tmp_path / "xy.txt").write_text(XY_DATA)
    (tmp_path / "t2star.txt").write_text(T2STAR)
    (tmp_path / "empty.txt").write_text("")
    (tmp_path / "xy_pool.txt").write_text("!x\n!y\n!x | a\n!y | b\n")
    (tmp_path / "penguin_pool.txt").write_text("bird\nflies\npenguin\n!penguin | !flies\n")
    return tmp_path


def test_eval_t2star(files, capsys):
    assert run_cli(["eval", "--theory", str(files / "t2star.txt"), "--data", str(files / "penguin.txt")]) == 0
    out = capsys.readouterr().out
    assert out == "n\terrors\tsample_error\taccuracy\n5\t1\t0.2\t0.8\n"


@pytest.mark.parametrize("theory,rule,expected", [
    ("t2star.txt", "penguin ~> !flies", "+"),
    ("t2star.txt", "penguin ~> bird", "-"),
    ("empty.txt", "true ~> x", "-"),
])
def test_query(files, capsys, theory, rule, expected):
    assert run_cli(["query", "--theory", str(files / theory), "--default", rule]) == 0
    assert capsys.readouterr().out == expected + "\n"


def test_learn_exact_found_and_none(files, capsys):
    out = files / "h.txt"
    code = run_cli(["learn-exact", "--theory", str(files / "xy_pool.txt"),
                    "--train", str(files / "xy.txt"), "--out", str(out)])
    assert code == 0
    assert "FOUND" in capsys.readouterr().out
    assert PossTheory.from_text(out.read_text()) == PossTheory.of(["!x"], ["!x | a"], ["!y"], ["!y | b"])
    code = run_cli(["learn-exact", "--theory", str(files / "penguin_pool.txt"),
                    "--train", str(files / "penguin.txt")])
    assert code == EXIT_NONE
    assert capsys.readouterr().out == "NONE\n"


def test_zrank_warns_and_writes(files, capsys):
    out = files / "hz.txt"
    assert run_cli(["zrank", "--defaults", str(files / "xy.txt"), "--out", str(out)]) == 0
    assert "negative" in capsys.readouterr().err
    assert PossTheory.from_text(out.read_text()) == PossTheory.of(["!x", "!y"], ["!x | a", "!y | b"])


def test_learn_heur_logs_tsv(files, capsys):
    out = files / "learned.txt"
    code = run_cli(["learn-heur", "--train", str(files / "xy.txt"), "--iters", "20", "--seed", "1",
                    "--out", str(out)])
    assert code == 0
    err = capsys.readouterr().err.splitlines()
    assert err[0] == "iteration\terrors\tn\tsample_error\tstrata\tclauses"
    assert err[-1].split("\t")[1] == "0"
    assert run_cli(["eval", "--theory", str(out), "--data", str(files / "xy.txt")]) == 0
    assert capsys.readouterr().out.splitlines()[1].split("\t")[1] == "0"


def test_learn_heur_hard_file(files, capsys):
    (files / "hard.txt").write_text("!penguin | !flies\n")
    out = files / "learned.txt"
    run_cli(["learn-heur", "--train", str(files / "penguin.txt"), "--iters", "5",
             "--hard", str(files / "hard.txt"), "--out", str(out)])
    assert "HARD\t!flies | !penguin" in out.read_text()


def test_gen_map_deterministic(files):
    m = random_weighted_theory(6, 8, random.Random(0))
    (files / "m.txt").write_text(m.to_text())
    outs = []
    for i in range(2):
        tr, te = files / f"tr{i}.txt", files / f"te{i}.txt"
        assert run_cli(["--seed", "4", "gen-map", "--weighted", str(files / "m.txt"), "--k", "3",
                        "--n-train", "40", "--n-test", "20", "--out-train", str(tr), "--out-test", str(te)]) == 0
        outs.append((tr.read_bytes(), te.read_bytes()))
    assert outs[0] == outs[1]
    assert len(read_dataset(files / "tr0.txt")) == 40


def test_vc(capsys):
    assert run_cli(["vc", "--bounds", "8", "4", "2"]) == 0
    assert capsys.readouterr().out == "vc_upper\tvc_lower\tvc_subset\n16\t2\t10\n"
    assert run_cli(["vc", "--shatter", "4"]) == 0
    assert capsys.readouterr().out == "PASS\n"


def test_usage_errors(capsys):
    assert run_cli(["frobnicate"]) == 2
    assert "usage" in capsys.readouterr().err
    assert run_cli([]) == 2
    assert run_cli(["vc"]) == 2


def test_semantic_failures(files, capsys):
    (files / "bad.txt").write_text("a ~> b ; +\nnot a rule\n")
    assert run_cli(["eval", "--theory", str(files / "t2star.txt"), "--data", str(files / "bad.txt")]) == 1
    assert "line 2" in capsys.readouterr().err
    assert run_cli(["query", "--theory", str(files / "missing.txt"), "--default", "a ~> b"]) == 1
    assert run_cli(["vc", "--shatter", "3"]) == 1


def test_module_entry_point(files):
    r = subprocess.run([sys.executable, "-m", "posslearn", "query", "--theory", str(files / "t2star.txt"),
                        "--default", "penguin ~> !flies"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout == "+\n"
