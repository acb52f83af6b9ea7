from __future__ import annotations

import pytest

from helpers import WSN_REDUCED, corpus_model
from ntacomp.compose import mutation
from ntacomp.corpus.generate import NetworkConfig, random_network
from ntacomp.model.parser import parse_model
from ntacomp.nta import (
    Counterexample,
    Equal,
    NetworkEngine,
    check_semantics_equivalence,
    compositional_lts,
    monolithic_lts,
)
from ntacomp.semantics import ttsb_of
from ntacomp.ttsb import DELAY, underlying_lts

BROADCAST = """
broadcast chan d;
automaton S { init a; location a, b; trans a -> b { sync d!; } }
automaton R1 { init a; location a, b; trans a -> b { sync d?; } }
automaton R2 { init a; location a, b; trans a -> b { sync d?; } }
system S, R1, R2;
"""

LONELY = """
broadcast chan d;
automaton S { init a; location a, b; trans a -> b { sync d!; } }
automaton R { init a; location a, b; trans b -> a { sync d?; } }
system S, R;
"""


def first_steps(net):
    eng = NetworkEngine(net)
    return [(eng.valuation(tgt), step) for step, tgt in eng.steps(eng.initial) if step.action != "delay"]


def test_broadcast_reaches_every_listening_receiver():
    net = parse_model(BROADCAST)
    steps = first_steps(net)
    assert len(steps) == 1
    tgt, _ = steps[0]
    assert [tgt[a.loc_name] for a in net.automata] == ["b", "b", "b"]


def test_broadcast_without_receivers_moves_only_sender():
    net = parse_model(LONELY)
    [(tgt, _)] = first_steps(net)
    assert tgt[net.automaton("S").loc_name] == "b"
    assert tgt[net.automaton("R").loc_name] == "a"


def test_producer_consumer_start_reaches_all_consumers():
    net = corpus_model("producer_consumer", N=2)
    eng = NetworkEngine(net)
    seen = [eng.valuation(tgt) for _, tgt in eng.steps(eng.initial)]
    assert any(all(v[f"loc(Consumer[{i}])"] == "req" for i in (1, 2)) for v in seen) or any(
        all(v[net.automaton(f"Consumer[{i}]").loc_name] == "req" for i in (1, 2)) for v in seen
    )


def test_single_automaton_pipeline_is_its_ttsb():
    src = "automaton A { local clock x; init l; location l, m; inv l { x <= 2 } trans l -> m { guard x >= 1; } }\nsystem A;"
    net = parse_model(src)
    assert compositional_lts(net) == underlying_lts(ttsb_of(net.automata[0], net))


def test_no_delay_from_committed_locations():
    net = corpus_model("producer_consumer", N=2)
    lts = monolithic_lts(net)
    for src, a, _ in lts.transitions:
        if a == DELAY:
            assert all(src[A.loc_name] not in A.committed for A in net.automata)


@pytest.mark.parametrize("N", [1, 2])
def test_producer_consumer_equal(N):
    res = check_semantics_equivalence(corpus_model("producer_consumer", N=N))
    assert isinstance(res, Equal) and res.states > 0


def test_wsn_reduced_equal():
    # about 1.8 million states: compiled engine only
    res = check_semantics_equivalence(corpus_model("wsn", **WSN_REDUCED), budget=10_000_000, engine="fast")
    assert isinstance(res, Equal) and res.states > 1_000_000


def test_random_networks_equal():
    for seed in range(1, 51):
        res = check_semantics_equivalence(random_network(NetworkConfig(seed=seed)))
        assert isinstance(res, Equal), (seed, str(res))


def test_broken_send_rule_is_caught():
    # receivers reading the pre-send state must show up on some generated net
    found = []
    with mutation("snd-stale-receiver"):
        for seed in range(1, 51):
            res = check_semantics_equivalence(random_network(NetworkConfig(seed=seed)))
            if isinstance(res, Counterexample):
                found.append(seed)
                assert str(res)
    assert found

