from __future__ import annotations

import pytest

from helpers import WSN_REDUCED, corpus_model
from ntacomp.corpus import model_path, plan_path
from ntacomp.model.expr import TRUE
from ntacomp.verify import (
    InvalidProperty,
    SimulationRefuted,
    check_safety,
    compositional_verify,
    load_for_plan,
    load_plan,
    parse_plan,
    replays,
    verify_plan,
)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_producer_consumer_safe(N):
    v = check_safety(corpus_model("producer_consumer", N=N), "safe")
    assert v.status == "Safe" and v.trace is None


@pytest.mark.parametrize("name", ["producer_consumer", "wsn"])
def test_true_is_safe(name):
    net = corpus_model(name, **(WSN_REDUCED if name == "wsn" else {}))
    assert check_safety(net, TRUE).status == "Safe"


def test_buffer_zero_violated_with_minimal_trace():
    net = corpus_model("producer_consumer", N=2, BUF=0)
    v = check_safety(net, "safe")
    assert v.status == "Violated"
    assert replays(net, v.trace, "safe")
    last = v.trace[-1].as_dict()
    assert last["loc(Producer)"] == "overflow"
    # the producer needs 8 time units before it can overflow
    assert sum(1 for st in v.trace if st.step is not None and st.step.action == "delay") == 8


def test_replays_rejects_tampered_trace():
    net = corpus_model("producer_consumer", N=2, BUF=0)
    v = check_safety(net, "safe")
    assert not replays(net, v.trace[1:], "safe")
    assert not replays(net, v.trace[:-1], "safe")


def test_invalid_property():
    net = corpus_model("producer_consumer")
    with pytest.raises(InvalidProperty):
        check_safety(net, "missing")


def test_invalid_model_verdict():
    v = check_safety(corpus_model("fig1_axiom_xi_violation"), "small")
    assert v.status == "Invalid" and v.violations


def test_budget_exceeded():
    v = check_safety(corpus_model("producer_consumer", N=3), "safe", budget=100, engine="python")
    assert v.status == "BudgetExceeded"


# -- plans -------------------------------------------------------------------------------


def test_parse_plan():
    p = parse_plan('keep = [0, Clock[A]];\nabstraction = "x.tanet"; // c\nproperty = "p";\nparam A = 1;', "/base")
    assert p.keep == (0, "Clock[A]")
    assert str(p.abstraction) == "/base/x.tanet"
    assert p.property == "p" and p.params == (("A", 1),)
    for bad in ["keep = [0];", 'keep = 0; abstraction = "a"; property = "p";', 'keep = [0]; keep = [1]; abstraction = "a"; property = "p";']:
        with pytest.raises(ValueError):
            parse_plan(bad)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_producer_consumer_cv_matches_monolithic(N):
    res = verify_plan(model_path("producer_consumer"), load_plan(plan_path("pc")), {"N": N})
    assert res.verdict.status == "Safe"
    assert res.report.green
    assert [o.name for o in res.report.obligations] == ["comparable", "simulation", "side-condition", "safety"]
    assert check_safety(corpus_model("producer_consumer", N=N), "safe").status == "Safe"


def test_abstract_network_is_n_independent():
    sizes = {verify_plan(model_path("producer_consumer"), load_plan(plan_path("pc")), {"N": n}).verdict.states for n in (2, 3)}
    assert len(sizes) == 1


def test_mutated_abstraction_refuted():
    with pytest.raises(SimulationRefuted) as info:
        verify_plan(model_path("producer_consumer"), load_plan(plan_path("pc_mutated")))
    assert info.value.report.get("simulation").status == "fail"
    assert info.value.refuted.chain


def test_property_must_stay_inside_kept_automata():
    net, abst = load_for_plan(model_path("producer_consumer"), load_plan(plan_path("pc")))
    with pytest.raises(InvalidProperty):
        compositional_verify(net, abst, ["Producer"], "loc(Coordinator) != count")


def test_restriction_set_excludes_kept_interface():
    res = verify_plan(model_path("producer_consumer"), load_plan(plan_path("pc")), {"N": 2})
    assert "read" not in res.report.restricted
    assert {"start", "in", "out"} <= set(res.report.restricted)
