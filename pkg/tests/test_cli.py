from __future__ import annotations

import subprocess
import sys
from importlib import resources

import pytest

from wfsched.cli import main
from wfsched.derive import read_schedule_csv
from wfsched.harness import BENCH_COLUMNS


def _fixture_paths(name: str) -> tuple[str, str]:
    root = resources.files("wfsched") / "fixtures"
    return str(root / f"{name}.workflow.json"), str(root / f"{name}.cluster.json")


@pytest.fixture
def chain3():
    return _fixture_paths("chain3")


def test_validate_ok(chain3, capsys):
    assert main(["validate", *chain3]) == 0
    out = capsys.readouterr().out
    assert "3 tasks, 2 edges" in out
    assert "order: A B C" in out


def test_validate_cycle_exits_nonzero(tmp_path, chain3, capsys):
    wf = tmp_path / "cyc.json"
    wf.write_text(
        '{"tasks": [{"id": "A", "work": 1}, {"id": "B", "work": 1}],'
        ' "edges": [{"src": "A", "dst": "B"}, {"src": "B", "dst": "A"}]}'
    )
    assert main(["validate", str(wf), chain3[1]]) == 1
    assert "error:" in capsys.readouterr().err


def test_validate_missing_file(chain3, capsys):
    assert main(["validate", "/nonexistent.json", chain3[1]]) == 1
    assert "error:" in capsys.readouterr().err


def test_schedule_to_stdout(chain3, capsys):
    assert main(["schedule", "--workflow", chain3[0], "--cluster", chain3[1], "--algo", "heft"]) == 0
    captured = capsys.readouterr()
    assert read_schedule_csv(captured.out).makespan == 6.0
    assert "makespan=6.0" in captured.err


def test_schedule_to_file_and_revalidate(tmp_path, chain3, capsys):
    out = tmp_path / "s.csv"
    argv = ["schedule", "--workflow", chain3[0], "--cluster", chain3[1], "--algo", "olb", "--out", str(out)]
    assert main(argv) == 0
    assert "makespan=15.0" in capsys.readouterr().out
    assert main(["validate", *chain3, "--schedule", str(out)]) == 0
    assert "schedule: ok" in capsys.readouterr().out


def test_validate_reports_bad_schedule(tmp_path, chain3, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("task,node,start,finish\nA,N1,0.0,4.0\nB,N1,0.0,2.0\nC,N1,4.0,10.0\n")
    assert main(["validate", *chain3, "--schedule", str(bad)]) == 1
    assert "violation" in capsys.readouterr().err


def test_schedule_with_trace_and_weights(tmp_path, chain3, capsys):
    trace = tmp_path / "trace.csv"
    trace.write_text("time_seconds,intensity_g_per_kwh\n0,100\n5,300\n")
    argv = [
        "schedule", "--workflow", chain3[0], "--cluster", chain3[1], "--algo", "exhaustive",
        "--alpha", "1", "--beta", "0.001", "--gamma", "0.5", "--carbon-trace", str(trace),
    ]  # fmt: skip
    assert main(argv) == 0
    report = dict(line.split("=") for line in capsys.readouterr().err.splitlines())
    assert float(report["carbon"]) > 0
    assert float(report["gamma"]) == 0.5


def test_schedule_snapshot_excludes_node(tmp_path, chain3, capsys):
    snap = tmp_path / "snap.csv"
    snap.write_text("node,load,temperature,power\nN2,0.5,99,120\n")
    argv = ["schedule", "--workflow", chain3[0], "--cluster", chain3[1], "--algo", "heft", "--snapshot", str(snap)]
    assert main(argv) == 0
    sched = read_schedule_csv(capsys.readouterr().out)
    assert set(sched.mapping.assignment.values()) == {"N1"}
    assert sched.makespan == 12.0


def test_schedule_snapshot_unknown_node(tmp_path, chain3, capsys):
    snap = tmp_path / "snap.csv"
    snap.write_text("N9,0.5,20,120\n")
    argv = ["schedule", "--workflow", chain3[0], "--cluster", chain3[1], "--algo", "heft", "--snapshot", str(snap)]
    assert main(argv) == 1


def test_schedule_all_nodes_excluded(tmp_path, chain3, capsys):
    snap = tmp_path / "snap.csv"
    snap.write_text("N1,0.5,95,1\nN2,0.5,95,1\n")
    argv = ["schedule", "--workflow", chain3[0], "--cluster", chain3[1], "--algo", "heft", "--snapshot", str(snap)]
    assert main(argv) == 1
    assert "excluded" in capsys.readouterr().err


def test_schedule_infeasible_class(tmp_path, chain3, capsys):
    wf = tmp_path / "wf.json"
    wf.write_text('{"tasks": [{"id": "A", "work": 1, "class": "gpu"}], "edges": []}')
    assert main(["schedule", "--workflow", str(wf), "--cluster", chain3[1], "--algo", "heft"]) == 1


def test_unknown_algo_rejected(chain3):
    with pytest.raises(SystemExit):
        main(["schedule", "--workflow", chain3[0], "--cluster", chain3[1], "--algo", "magic"])


def test_bench_to_file(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    sched_dir = tmp_path / "schedules"
    argv = ["bench", "--scenarios", "W1", "--algos", "heft,olb,sa,bnb", "--reps", "2",
            "--sequential", "--out", str(out), "--schedules-dir", str(sched_dir)]  # fmt: skip
    assert main(argv) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(BENCH_COLUMNS)
    assert len(lines) == 1 + 4 * 2
    assert len(list(sched_dir.iterdir())) == 8


def test_bench_unknown_scenario(capsys):
    assert main(["bench", "--scenarios", "W7", "--algos", "heft"]) == 1


def test_sweep_stdout(capsys):
    assert main(["sweep", "--sizes", "5,12x4", "--density", "0.2", "--algos", "heft,olb", "--workers", "2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 1 + 2 * 2
    assert all(line.split(",")[7] == "ok" for line in lines[1:])


def test_module_entry_point(chain3):
    proc = subprocess.run(
        [sys.executable, "-m", "wfsched", "schedule", "--workflow", chain3[0], "--cluster", chain3[1], "--algo", "heft"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert read_schedule_csv(proc.stdout).makespan == 6.0
