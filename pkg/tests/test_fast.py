"""The compiled engine against the reference Python semantics."""

from __future__ import annotations

import pytest

from helpers import corpus_model
from ntacomp.corpus.generate import NetworkConfig, random_network
from ntacomp.fast.engine import COMP, MONO, FastEngine
from ntacomp.nta import NetworkEngine, check_semantics_equivalence, compositional_ttsb
from ntacomp.verify import check_safety, replays


@pytest.fixture(scope="module")
def pc():
    net = corpus_model("producer_consumer", N=2)
    return net, NetworkEngine(net), FastEngine(net)


def test_encoding_round_trips(pc):
    _, py, fe = pc
    for s in py.explore(10_000).parent:
        assert fe.decode(fe.encode(s)) == s


def test_monolithic_successors_match(pc):
    _, py, fe = pc
    for s in py.explore(10_000).parent:
        want = {(step.action == "delay", tgt) for step, tgt in py.steps(s)}
        assert set(fe.successors(s, MONO)) == want


def test_compositional_successors_match(pc):
    net, py, fe = pc
    T = compositional_ttsb(net)
    for s in list(py.explore(10_000).parent)[:500]:
        v = py.valuation(s)
        want = {(a.kind == "delay", tuple(tgt[n] for n in py.domain.names)) for a, _, tgt in T.successors(v)}
        assert set(fe.successors(s, COMP)) == want


def test_safety_verdicts_match():
    for params in ({"N": 2}, {"N": 2, "BUF": 0}):
        net = corpus_model("producer_consumer", **params)
        a = check_safety(net, "safe", engine="python")
        b = check_safety(net, "safe", engine="fast")
        assert a.status == b.status
        if a.status == "Safe":
            assert a.states == b.states
        else:
            # both searches are breadth first: counterexamples have equal length
            assert len(a.trace) == len(b.trace)
            assert replays(net, b.trace, "safe")


@pytest.mark.parametrize("seed", [3, 11])
def test_random_network_equivalence_matches(seed):
    net = random_network(NetworkConfig(seed=seed))
    a = check_semantics_equivalence(net)
    b = check_semantics_equivalence(net, engine="fast")
    assert a.status == b.status == "Equal"
    assert a.states == b.states
