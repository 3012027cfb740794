import json
import subprocess
import sys
from pathlib import Path

import pytest

from alquant import cli
from alquant.compiler import RUN_STATS_SCHEMA

FIX = Path(__file__).parent / "fixtures"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_sat_fig1(capsys):
    assert run(capsys, "sat", str(FIX / "fig1.qptl"))[:2] == (0, "SAT\n")


def test_sat_oracle_engine(capsys):
    assert run(capsys, "sat", "--engine", "oracle", str(FIX / "fig2.qptl"))[:2] == (0, "SAT\n")


def test_sat_from_stdin(monkeypatch, capsys):
    import io
    monkeypatch.setattr(sys, "stdin", io.StringIO("exists b. forall a. G (a <-> b)\n"))
    assert run(capsys, "sat")[:2] == (0, "UNSAT\n")


@pytest.mark.parametrize("argv,code", [
    (["sat", str(FIX / "broken.qptl")], 2),
    (["sat", str(FIX / "liveness.qptl")], 3),
    (["sat", str(FIX / "missing.qptl")], 2),
    (["compile", str(FIX / "fig1.qptl"), "--var", "z"], 2),
    (["compile", str(FIX / "fig1.qptl"), "--var", "a", "--max-macro-states", "1"], 4),
])
def test_exit_codes(capsys, argv, code):
    got, _, err = run(capsys, *argv)
    assert got == code
    assert err


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as e:
        cli.main(["sat", "--engine", "magic"])
    assert e.value.code == 2


def test_stats_json(tmp_path, capsys):
    jsonschema = pytest.importorskip("jsonschema")
    out = tmp_path / "stats.json"
    code, _, _ = run(capsys, "sat", str(FIX / "fig1.qptl"), "--stats", str(out), "--no-timing")
    assert code == 0
    data = json.loads(out.read_text())
    jsonschema.validate(data, RUN_STATS_SCHEMA)
    assert data["verdict"] == "SAT" and data["totalMillis"] == 0.0
    assert data["perRound"][0]["conflictSetSize"] == 2


def test_compile_fig1_text_and_dot(capsys):
    code, out, _ = run(capsys, "compile", str(FIX / "fig1.aut"), "--var", "a", "--mode", "exists")
    assert code == 0
    assert 'state "{q0,q1}": a & b & "{q0,q1}"' in out
    code, out, _ = run(capsys, "compile", str(FIX / "fig1.qptl"), "--var", "a", "--emit-dot")
    assert out.startswith("digraph")


def test_compile_eliminate(capsys):
    _, out, _ = run(capsys, "compile", str(FIX / "fig1.qptl"), "--var", "a", "--eliminate")
    assert "alphabet b" in out
    assert 'b & "{q0,q1}"' in out


def test_compile_fig2_pairwise(capsys):
    _, out, _ = run(capsys, "compile", str(FIX / "fig2.qptl"), "--var", "a", "--pairwise-refine")
    assert 'state "{q1,q2}": true' in out


def test_conflicts_trace(capsys):
    code, out, _ = run(capsys, "conflicts", str(FIX / "fig1.qptl"), "--var", "a", "--trace", "--pairs")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "{q0, q1}"
    assert "pair q0 q1" in lines
    assert any(l.startswith("state") and "i=0" in l for l in lines)


def test_conflicts_mode_from_prefix(capsys):
    _, out, _ = run(capsys, "conflicts", str(FIX / "fig2.qptl"), "--var", "a")
    assert out == "{q0, q1, q2}\n"


def test_diff_equivalent(capsys):
    assert run(capsys, "diff", str(FIX / "fig2.qptl"), "--var", "a")[:2] == (0, "equivalent\n")


def test_diff_reports_counterexample(capsys):
    code, out, _ = run(capsys, "diff", str(FIX / "equal_labels.aut"), "--var", "a", "--mode", "exists",
                       "--no-decider-closure")
    assert code == 1
    assert out.startswith("pipeline-only: stem")


def test_env_options_are_overridden_by_flags(monkeypatch):
    monkeypatch.setenv("ALQUANT_OPTS", "--universal-construction disjunctive")
    argv = cli.expand_env(["sat", "--universal-construction", "dual", "x.qptl"])
    assert argv[:3] == ["sat", "--universal-construction", "disjunctive"]
    args = cli.build_parser().parse_args(argv)
    assert args.universal_construction == "dual"
    assert cli.expand_env(["sat"], env="") == ["sat"]


def test_bench_empty_dir_prints_header(tmp_path, capsys):
    code, out, _ = run(capsys, "bench", str(tmp_path))
    assert code == 0
    assert out == "instance,verdict,millis,states_final,macros_total\n"


def test_bench_checks_expected(tmp_path, capsys):
    (tmp_path / "one.qptl").write_text("forall a. G a\n")
    (tmp_path / "two.qptl").write_text("exists a. G a\n")
    (tmp_path / "expected.txt").write_text("# instance verdict\none UNSAT\ntwo UNSAT\n")
    code, out, err = run(capsys, "bench", str(tmp_path), "--no-timing")
    assert code == 1
    assert "two: expected UNSAT, got SAT" in err
    assert out.splitlines()[1].startswith("one,UNSAT,0,")


def test_bench_timeout(tmp_path, capsys):
    slow = cli.bundled("scalability") / "replay4_10.qptl"
    (tmp_path / "slow.qptl").write_text(slow.read_text())
    _, out, _ = run(capsys, "bench", str(tmp_path), "--timeout", "0.3")
    assert out.splitlines()[1].startswith("slow,TIMEOUT,")


def test_bench_random_instances_are_seeded(tmp_path, capsys):
    _, a, _ = run(capsys, "bench", str(tmp_path), "--random", "3", "--seed", "4", "--no-timing")
    _, b, _ = run(capsys, "bench", str(tmp_path), "--random", "3", "--seed", "4", "--no-timing")
    assert a == b and len(a.splitlines()) == 4


def test_console_script_runs():
    r = subprocess.run([sys.executable, "-m", "alquant.cli", "sat", str(FIX / "fig1.qptl")],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout == "SAT\n"
