import os
import re
import subprocess
import sys

import numpy as np

from reachplan import scenario as S
from reachplan.cli import run_cli

QUICK = """# reach-scenario v1
[arm]
model = discrete
profile = paper-discrete
[task]
name = quick
[optimizer]
line_search = backtracking
step = 1e-8
tau0 = 2e-10
max_inner = 40
[obstacles]
circle r=0.08 center=(0.1,-0.35)
"""


def write(tmp_path, text, name="s.scenario"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_solve_writes_csvs(tmp_path, capsys):
    out = tmp_path / "out"
    assert run_cli(["solve", write(tmp_path, QUICK), "--out", str(out), "--svg"]) == 0
    assert sorted(os.listdir(out)) == ["configuration.csv", "controls.csv", "plot.svg", "trace.csv"]
    text = capsys.readouterr().out
    assert re.search(r"tip error\s+\d", text)
    u = np.loadtxt(out / "controls.csv", delimiter=",", skiprows=1)
    assert u.shape == (8, 2) and np.all(np.abs(u[:, 1]) <= 1)


def test_missing_file_exit_2(tmp_path, capsys):
    assert run_cli(["solve", str(tmp_path / "absent.scenario"), "--out", str(tmp_path)]) == 2
    assert "error" in capsys.readouterr().err


def test_invalid_scenario_exit_1(tmp_path, capsys):
    bad = QUICK.replace("r=0.08", "r=-0.08")
    assert run_cli(["solve", write(tmp_path, bad), "--out", str(tmp_path / "o")]) == 1
    assert not (tmp_path / "o").exists()
    garbled = QUICK.replace("[task]", "[tusk]")
    assert run_cli(["check-grad", write(tmp_path, garbled)]) == 1
    assert ":5: unknown section" in capsys.readouterr().err


def test_unwritable_output_exit_2(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert run_cli(["solve", write(tmp_path, QUICK), "--out", str(blocker / "sub")]) == 2


def test_check_grad_bundled(capsys):
    assert run_cli(["check-grad", "test2-discrete", "--trials", "20"]) == 0
    err = float(re.search(r"max relative error (\S+)", capsys.readouterr().out).group(1))
    assert err <= 1e-5


def test_distfield(tmp_path):
    assert run_cli(["distfield", "test5-soft", "--grid", "0.01", "--out", str(tmp_path)]) == 0
    d = np.loadtxt(tmp_path / "distfield.csv", delimiter=",", skiprows=1)
    assert d.shape[1] == 3 and d[:, 2].max() > 0.05


def test_distfield_without_obstacles(tmp_path):
    assert run_cli(["distfield", "test1-soft", "--grid", "0.01", "--out", str(tmp_path)]) == 1


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "reachplan", "check-grad", S.bundled_path("test3-soft"),
                        "--trials", "3"], capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    assert "max relative error" in r.stdout
