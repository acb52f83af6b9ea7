from __future__ import annotations

import json
import subprocess
import sys

import pytest

from ntacomp.cli import main


def run(capsys, *argv: str) -> tuple:
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv: str) -> tuple:
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_mc_producer_consumer_safe(capsys):
    code, rep = run_json(capsys, "mc", "models/producer_consumer.tanet", "--prop", "safe", "--param", "N=2")
    assert code == 0
    assert rep["verdict"] == "Safe" and rep["stats"]["states"] > 0


def test_mc_buffer_zero_violated_with_trace(capsys):
    code, rep = run_json(capsys, "mc", "models/producer_consumer.tanet", "--prop", "safe", "--param", "N=2", "--param", "BUF=0")
    assert code == 1
    assert rep["verdict"] == "Violated"
    assert rep["trace"][-1]["state"]["loc(Producer)"] == "overflow"


def test_mc_accepts_expression(capsys):
    code, rep = run_json(capsys, "mc", "models/producer_consumer.tanet", "--prop", "Producer.num <= 10")
    assert code == 0 and rep["verdict"] == "Safe"


def test_mc_budget_exit_code(capsys):
    code, rep = run_json(capsys, "mc", "models/producer_consumer.tanet", "--prop", "safe", "--budget", "10")
    assert code == 3 and rep["verdict"] == "BudgetExceeded"


def test_validate_fig1(capsys):
    code, out, _ = run(capsys, "validate", "models/fig1_axiom_xi_violation.tanet")
    assert code == 2
    assert "AxiomXI" in out


def test_validate_ok(capsys):
    code, rep = run_json(capsys, "validate", "models/wsn.tanet")
    assert code == 0 and rep["violations"] == []


def test_mc_on_invalid_model(capsys):
    code, _, _ = run(capsys, "mc", "models/fig1_axiom_xi_violation.tanet", "--prop", "small")
    assert code == 2


def test_usage_errors_exit_2(capsys):
    assert main(["nonsense"]) == 2
    assert main(["mc", "models/nope.tanet", "--prop", "x"]) == 2
    assert main(["mc", "models/producer_consumer.tanet", "--prop", "no_such_name"]) == 2
    assert main(["mc", "models/producer_consumer.tanet", "--prop", "safe", "--param", "N"]) == 2
    _, err = capsys.readouterr()
    assert err


def test_cv_producer_consumer(capsys):
    code, rep = run_json(capsys, "cv", "models/producer_consumer.tanet", "--plan", "plans/pc.cvplan", "--param", "N=3")
    assert code == 0
    assert rep["verdict"] == "Safe"
    assert [o["name"] for o in rep["obligations"]] == ["comparable", "simulation", "side-condition", "safety"]
    assert all(o["status"] == "pass" for o in rep["obligations"])


def test_cv_mutated_abstraction_refuted(capsys):
    code, rep = run_json(capsys, "cv", "models/producer_consumer.tanet", "--plan", "plans/pc_mutated.cvplan")
    assert code == 1
    sim = next(o for o in rep["obligations"] if o["name"] == "simulation")
    assert sim["status"] == "fail" and "witness" in sim


@pytest.mark.slow
def test_cv_wsn_pair(capsys):
    code, rep = run_json(capsys, "cv", "models/wsn.tanet", "--plan", "plans/wsn_pair_0_1.cvplan", "--param", "N=3")
    assert code == 0
    assert rep["verdict"] == "Safe"


def test_sim_check_self(capsys, tmp_path):
    dump = tmp_path / "rel.txt"
    code, rep = run_json(capsys, "sim-check", "models/producer_consumer.tanet", "models/producer_consumer.tanet",
                         "--restrict", "start,in,read,out,go[0],go[1],go[2],id", "--dump-relation", str(dump))
    assert code == 0
    assert rep["status"] == "Simulated" and rep["relation_size"] > 0
    assert len(dump.read_text().splitlines()) == rep["relation_size"]


def test_sim_check_unknown_restriction(capsys):
    code, _, _ = run(capsys, "sim-check", "models/producer_consumer.tanet", "models/producer_consumer.tanet",
                     "--restrict", "nope")
    assert code == 2


def test_semantics_equiv(capsys):
    code, rep = run_json(capsys, "semantics-equiv", "models/producer_consumer.tanet", "--param", "N=2")
    assert code == 0
    assert rep["status"] == "Equal" and rep["states_lhs"] == rep["states_rhs"]
    code, rep = run_json(capsys, "semantics-equiv", "random", "--seed", "7")
    assert code == 0 and rep["status"] == "Equal"


def test_explore_is_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert main(["explore", "models/producer_consumer.tanet", "--param", "N=2", "--out", str(a)]) == 0
    assert main(["explore", "models/producer_consumer.tanet", "--param", "N=2", "--out", str(b)]) == 0
    text = a.read_text()
    assert text == b.read_text()
    lines = text.splitlines()
    assert lines[0].startswith("#") and lines[1].startswith("initial ")
    edges = [ln for ln in lines if not ln.startswith(("#", "initial", "state"))]
    assert edges == sorted(edges)


def test_console_script_entry():
    proc = subprocess.run([sys.executable, "-m", "ntacomp", "validate", "models/fig1_axiom_xi_violation.tanet"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    assert "AxiomXI" in proc.stdout
